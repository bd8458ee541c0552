#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "polyan/hybrid.hpp"
#include "polyan/polyhedron.hpp"

namespace polyan::testing {

using Rng = std::mt19937_64;

int uniform(Rng& rng, int lo, int hi);
bool coin(Rng& rng, double p = 0.5);

/// Coefficients in [-range, range], rhs in [-8, 8]; never all-zero.
Constraint random_constraint(Rng& rng, std::size_t n, Topology t, int range = 8, double eq_prob = 0.15);
std::vector<Constraint> random_system(Rng& rng, std::size_t n, std::size_t k, Topology t, int range = 8);
/// At least one point; coordinates in [-8, 8].
std::vector<Generator> random_generators(Rng& rng, std::size_t n, std::size_t points, std::size_t rays);

/// Row  a.x >= b, or > when strict.
struct Row {
    std::vector<Rational> a;
    Rational b;
    bool strict = false;
};

std::vector<Row> rows_of(const std::vector<Constraint>& cs);
/// Fourier-Motzkin elimination with strictness tracking; exact over the rationals.
bool fm_feasible(std::vector<Row> rows, std::size_t n);
/// Every point satisfying `inner` satisfies each constraint of `outer`.
bool fm_includes(const std::vector<Constraint>& inner, const std::vector<Constraint>& outer, std::size_t n);
bool satisfies_all(const std::vector<Constraint>& cs, std::span<const Rational> v);

/// Random element of an NNC or closed polyhedron, built from its generators.
std::vector<Rational> sample_point(Rng& rng, const Polyhedron& p);

struct SuiteResult {
    std::string name;
    std::size_t cases = 0;
    std::size_t failures = 0;
    std::string first_failure;
    std::string note;
    double seconds = 0;

    void fail(const std::string& what) {
        if (failures++ == 0) first_failure = what;
    }
    bool ok() const { return failures == 0; }
};

SuiteResult dd_round_trip(std::uint64_t seed, std::size_t cases);
SuiteResult hull_bounds(std::uint64_t seed, std::size_t cases);
SuiteResult inclusion_vs_fm(std::uint64_t seed, std::size_t cases);
SuiteResult widening_chains(std::uint64_t seed, std::size_t cases);
SuiteResult elapse_idempotent(std::uint64_t seed, std::size_t cases);
SuiteResult closure_idempotent(std::uint64_t seed, std::size_t cases);
SuiteResult nnc_emptiness(std::uint64_t seed, std::size_t cases);

/// Random terminating programs run against the analyzer; exit stores and
/// loop-head stores seen concretely must lie in the abstract ones.
SuiteResult analyzer_soundness(std::uint64_t seed, std::size_t programs);
std::string random_program(Rng& rng, std::size_t vars);

/// Random runs of `h`; every state visited must lie in the region of its location.
SuiteResult simulate_runs(const HybridAutomaton& h, const std::vector<PolySet>& regions, std::uint64_t seed,
                          std::size_t runs, std::size_t steps);

/// `rel` of some transition from `from` to `to` relates the two valuations.
bool jump_allowed(const HybridAutomaton& h, std::size_t from, std::size_t to, const std::vector<Rational>& x,
                  const std::vector<Rational>& y, const std::string& label = "");
/// x + s*d stays in Inv(loc) for all 0 <= s < t and reaches its closure at t,
/// with d in Act(loc).
bool flow_allowed(const HybridAutomaton& h, std::size_t loc, const std::vector<Rational>& x,
                  const std::vector<Rational>& d, const Rational& t);

std::string read_file(const std::string& path);

/// Constraint text over `names`; NNC when any constraint is strict.
Polyhedron parse_poly(const std::string& text, const std::vector<std::string>& names);

}  // namespace polyan::testing
