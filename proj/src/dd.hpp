#pragma once

// Homogenized cone conversion and the lazily-converted closed kernel used by
// Polyhedron. Vectors have length m+1 where index m is the homogenizing
// coordinate: a constraint (a, c) reads a.x + c >= 0 (or = 0), a generator
// (p, t) is the point p/t when t > 0 and a ray or line when t = 0.

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "polyan/linalg.hpp"

namespace polyan::detail {

/// Either a constraint system (eq = equalities, ineq = inequalities) or a
/// generator system (eq = lines, ineq = rays and points).
struct HomSys {
    std::vector<IntVector> eq;
    std::vector<IntVector> ineq;
};

/// Extreme rays and lineality basis of { v : e.v = 0 for e in eqs, i.v >= 0 for i in ineqs }.
HomSys dd_cone(std::size_t d, const std::vector<IntVector>& eqs, const std::vector<IntVector>& ineqs);

Integer dot(const IntVector& a, const IntVector& b);

class Kernel;
using KPtr = std::shared_ptr<const Kernel>;

class Kernel {
public:
    static KPtr from_cons(std::size_t m, HomSys cons);
    static KPtr from_gens(std::size_t m, HomSys gens);
    static KPtr empty(std::size_t m);
    static KPtr universe(std::size_t m);

    std::size_t space_dim() const { return m_; }
    bool is_empty() const;
    /// Minimized, canonically ordered systems.
    const HomSys& cons() const;
    const HomSys& gens() const;
    /// Whatever constraint / generator system is at hand without forcing a
    /// minimization when a raw one exists.
    const HomSys& any_cons() const;
    const HomSys& any_gens() const;
    bool has_cons() const;

    explicit Kernel(std::size_t m) : m_(m) {}

private:
    void compute_min_gens() const;
    void compute_min_cons() const;
    void set_empty() const;

    std::size_t m_;
    mutable std::recursive_mutex mu_;
    mutable std::optional<HomSys> raw_cons_, raw_gens_, min_cons_, min_gens_;
};

KPtr k_meet(const Kernel& a, const Kernel& b);
KPtr k_add_cons(const Kernel& a, const HomSys& extra);
KPtr k_hull(const KPtr& a, const KPtr& b);
KPtr k_add_gens(const Kernel& a, const HomSys& extra);
/// b is a subset of a.
bool k_contains(const Kernel& a, const Kernel& b);
/// x_k := (e . (x,1)) / den with den > 0; e has length m+1.
KPtr k_affine_image(const Kernel& a, std::size_t k, const IntVector& e, const Integer& den);
KPtr k_affine_preimage(const Kernel& a, std::size_t k, const IntVector& e, const Integer& den);
/// Projects away the listed coordinates.
KPtr k_remove_dims(const Kernel& a, const std::vector<std::size_t>& dims);
/// Inserts `count` unconstrained coordinates before position `pos`.
KPtr k_insert_dims(const Kernel& a, std::size_t pos, std::size_t count);
/// Coordinate i of the input becomes coordinate perm[i].
KPtr k_map_dims(const Kernel& a, const std::vector<std::size_t>& perm);
/// Standard widening; requires a to be a subset of b.
KPtr k_widen(const KPtr& a, const KPtr& b);

bool sat_all(const IntVector& c, bool is_eq, const HomSys& gens);

}  // namespace polyan::detail
