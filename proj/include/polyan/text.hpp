#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "polyan/linalg.hpp"
#include "polyan/polyhedron.hpp"

namespace polyan {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t col, const std::string& msg)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg), line_(line), col_(col) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return col_; }

private:
    std::size_t line_, col_;
};

struct SourcePos {
    std::size_t line = 1, col = 1;
};

/// Character cursor shared by the text front ends. Whitespace and `#` line
/// comments are skipped before every token.
class Scanner {
public:
    explicit Scanner(std::string_view src) : src_(src) {}

    void skip_space();
    bool at_end();
    SourcePos pos();
    std::size_t offset() const { return i_; }

    /// Punctuation or a keyword; keywords only match at a word boundary.
    bool accept(std::string_view tok);
    void expect(std::string_view tok);
    bool peek_is(std::string_view tok);
    /// Identifier `[A-Za-z_][A-Za-z0-9_]*`, optionally followed by `'`.
    std::optional<std::string> ident();
    std::optional<Integer> integer();
    std::string peek_text(std::size_t n = 12);

    [[noreturn]] void fail(const std::string& msg);
    [[noreturn]] void fail_at(SourcePos p, const std::string& msg);

private:
    void advance();
    std::string_view src_;
    std::size_t i_ = 0;
    SourcePos at_;
};

/// Maps an identifier to its dimension, or nothing when unknown.
using NameResolver = std::function<std::optional<std::size_t>(std::string_view)>;

NameResolver resolver_for(const std::vector<std::string>& names);

LinExpr parse_linexpr(Scanner& s, std::size_t dim, const NameResolver& names);
/// One constraint, possibly a chain such as `0 <= x <= 4`, hence several results.
std::vector<Constraint> parse_constraint(Scanner& s, std::size_t dim, const NameResolver& names);
/// Comma separated, at least one element.
std::vector<Constraint> parse_constraint_list(Scanner& s, std::size_t dim, const NameResolver& names);

/// Whole-string parse; optional surrounding braces; empty text is the empty list.
std::vector<Constraint> parse_constraints(std::string_view text, const std::vector<std::string>& names);

std::string render_linexpr(std::span<const Integer> coeffs, const std::vector<std::string>& names);
std::string render_constraint(const Constraint& c, const std::vector<std::string>& names);
/// `{c1, c2, ...}`: equalities first, then inequalities grouped by leading
/// variable with lower bounds before upper bounds.
std::string render_system(std::span<const Constraint> cs, const std::vector<std::string>& names);
std::string render(const Polyhedron& p, const std::vector<std::string>& names);

}  // namespace polyan
