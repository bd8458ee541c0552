#pragma once

#include <ostream>
#include <string>
#include <string_view>

namespace polyan {

/// Runs a desk-calculator script and returns what its `print` and `gens`
/// statements wrote. Variable names are numbered in order of first use.
///
///   A = {x >= 0, y = 1};
///   print hull(A, {x <= -2, y = 3})
///
/// Functions: hull, meet, elapse (rates written `dx`), widen, closure,
/// image/preimage (polyhedron, variable, expression), project (polyhedron,
/// variables...), contains, equals, isempty, isuniverse.
/// Throws ParseError on malformed input and the polyhedra errors otherwise.
std::string run_calculator(std::string_view script);
/// Same, writing each result as soon as it is computed.
void run_calculator(std::string_view script, std::ostream& out);

}  // namespace polyan
