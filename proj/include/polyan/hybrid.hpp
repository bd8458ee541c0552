#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "polyan/polyhedron.hpp"
#include "polyan/powerset.hpp"

namespace polyan {

class HybridError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Location {
    std::string name;
    Polyhedron init, act, inv;
};

/// `rel` has 2n dimensions: source values at 0..n-1, target values at n..2n-1.
struct Transition {
    std::size_t source = 0, target = 0;
    std::optional<std::string> label;
    Polyhedron rel;
};

struct HybridAutomaton {
    std::string name;
    std::vector<std::string> vars;
    std::vector<Location> locations;
    std::vector<std::string> labels;
    std::vector<Transition> transitions;
    /// Widening locations; empty together with `widen_given == false` means
    /// they are derived by `default_cutset`.
    std::vector<std::size_t> widen_at;
    bool widen_given = false;
    std::vector<std::string> warnings;

    std::size_t dimension() const { return vars.size(); }
    std::optional<std::size_t> find_location(std::string_view name) const;
};

/// Reads a `.lha` file. Several `automaton NAME { ... }` blocks are composed
/// left to right.
HybridAutomaton parse_automaton(std::string_view text);
/// The individual blocks, uncomposed.
std::vector<HybridAutomaton> parse_components(std::string_view text);

/// Product automaton. Product locations drop the names of single-location
/// components; the others are joined with `.`.
HybridAutomaton parallel_compose(const HybridAutomaton& a, const HybridAutomaton& b);

/// Every cycle of the location graph (self-loops included) meets `w`.
bool is_cutset(const HybridAutomaton& h, const std::vector<std::size_t>& w);
/// Targets of back edges of a depth-first search started at the initial locations.
std::vector<std::size_t> default_cutset(const HybridAutomaton& h);
/// `widen_at` if given, otherwise the default cutset. A given set is used as
/// is; each location on a cycle it misses gets a warning.
std::vector<std::size_t> widening_locations(const HybridAutomaton& h, std::vector<std::string>* warnings = nullptr);

enum class Schedule { gauss_seidel, jacobi };

struct ReachOptions {
    DomainKind domain = DomainKind::poly;
    std::size_t cap = 4;
    std::size_t delay = 0;
    std::size_t max_iter = 100;
    /// Powerset widenings allowed at one location before the hull widening takes over.
    std::size_t powerset_widenings = 8;
    Schedule schedule = Schedule::gauss_seidel;
    /// Jacobi sweeps only: evaluate the locations of a sweep on worker threads.
    bool parallel = false;
};

struct ReachResult {
    std::vector<PolySet> regions;
    /// Sweeps that changed some region; the confirming sweep is not counted.
    std::size_t iterations = 0;
    std::size_t sweeps = 0;
    bool converged = false;
    /// Only meaningful when converged: F(result) is included in result everywhere.
    bool post_fixpoint = false;
    std::vector<std::size_t> widen_at;
    std::vector<std::string> warnings;
};

/// One application of the location equation; with the poly domain the
/// incoming contributions are poly-hulled.
PolySet location_update(const HybridAutomaton& h, std::size_t loc, const std::vector<PolySet>& current,
                        DomainKind domain = DomainKind::poly);

ReachResult reach(const HybridAutomaton& h, const ReachOptions& opts = {});

}  // namespace polyan
