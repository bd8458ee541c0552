#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "polyan/linalg.hpp"

namespace polyan {

enum class Topology { closed, nnc };

class TopologyError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

namespace detail {
class Kernel;
struct PolyState;
}  // namespace detail

/// Infimum / supremum of a linear expression over a polyhedron. An absent
/// value means unbounded in that direction; `*_attained` is false when the
/// bound is only approached through closure points.
struct ExprBounds {
    std::optional<Rational> lower, upper;
    bool lower_attained = true, upper_attained = true;
};

/// Convex polyhedron of R^n, closed or not necessarily closed. Value type:
/// every operation returns a new polyhedron and leaves its operands alone.
class Polyhedron {
public:
    Polyhedron();

    static Polyhedron universe(std::size_t n, Topology t = Topology::closed);
    static Polyhedron empty(std::size_t n, Topology t = Topology::closed);
    static Polyhedron from_constraints(std::size_t n, std::span<const Constraint> cs,
                                       Topology t = Topology::closed);
    static Polyhedron from_generators(std::size_t n, std::span<const Generator> gs,
                                      Topology t = Topology::closed);

    std::size_t dimension() const { return n_; }
    Topology topology() const { return topo_; }
    bool is_nnc() const { return topo_ == Topology::nnc; }

    /// Equalities first, then inequalities, each in canonical order.
    std::vector<Constraint> minimized_constraints() const;
    /// Points, then rays, then closure points; a line shows up as two opposite rays.
    std::vector<Generator> minimized_generators() const;

    bool is_empty() const;
    bool is_universe() const;
    bool contains_point(std::span<const Rational> v) const;
    /// q is a subset of *this.
    bool contains(const Polyhedron& q) const;
    bool equals(const Polyhedron& q) const;
    bool entails(const Constraint& c) const;
    ExprBounds bounds(const LinExpr& e) const;

    Polyhedron intersection(const Polyhedron& q) const;
    Polyhedron add_constraint(const Constraint& c) const;
    Polyhedron add_constraints(std::span<const Constraint> cs) const;
    Polyhedron poly_hull(const Polyhedron& q) const;

    Polyhedron affine_image(std::size_t k, const LinExpr& e) const;
    Polyhedron affine_preimage(std::size_t k, const LinExpr& e) const;
    /// lo <= x_k' <= hi; a missing bound leaves that side open.
    Polyhedron bounded_affine_image(std::size_t k, const std::optional<LinExpr>& lo,
                                    const std::optional<LinExpr>& hi) const;
    /// rel lives in 2n dimensions: unprimed 0..n-1, primed n..2n-1.
    Polyhedron relation_image(const Polyhedron& rel) const;
    Polyhedron time_elapse(const Polyhedron& rates) const;
    Polyhedron topological_closure() const;

    Polyhedron add_dimensions(std::size_t m) const;
    Polyhedron remove_dimensions(std::vector<std::size_t> dims) const;
    /// Dimension i becomes dimension perm[i].
    Polyhedron map_dimensions(const std::vector<std::size_t>& perm) const;
    Polyhedron concatenate(const Polyhedron& q) const;
    /// Keeps only the listed dimensions, in the given order.
    Polyhedron project_onto(const std::vector<std::size_t>& dims) const;
    Polyhedron with_topology(Topology t) const;

    /// *this widened by q; q must contain *this.
    Polyhedron standard_widening(const Polyhedron& q) const;

private:
    Polyhedron(std::size_t n, Topology t, std::shared_ptr<const detail::Kernel> k);
    const detail::Kernel& kernel() const;
    const detail::PolyState& state() const;
    void same_space(const Polyhedron& q, const char* op) const;

    std::size_t n_ = 0;
    Topology topo_ = Topology::closed;
    std::shared_ptr<detail::PolyState> st_;
};

}  // namespace polyan
