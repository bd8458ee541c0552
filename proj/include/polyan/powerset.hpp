#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "polyan/polyhedron.hpp"

namespace polyan {

enum class DomainKind { poly, powerset };

/// Finite set of pairwise incomparable nonempty polyhedra, read as their
/// union. The empty set is bottom.
class PolySet {
public:
    explicit PolySet(std::size_t n = 0, Topology t = Topology::closed) : n_(n), topo_(t) {}
    explicit PolySet(const Polyhedron& p);

    static PolySet reduce(std::size_t n, Topology t, std::vector<Polyhedron> raw);

    std::size_t dimension() const { return n_; }
    Topology topology() const { return topo_; }
    const std::vector<Polyhedron>& elements() const { return elems_; }
    std::size_t size() const { return elems_.size(); }
    bool is_bottom() const { return elems_.empty(); }

    PolySet join(const PolySet& o) const;
    PolySet meet(const PolySet& o) const;
    /// Every element of *this lies inside some element of o.
    bool entails(const PolySet& o) const;
    bool equals(const PolySet& o) const { return entails(o) && o.entails(*this); }
    bool contains_point(std::span<const Rational> v) const;

    PolySet lift(const std::function<Polyhedron(const Polyhedron&)>& op) const;
    /// Elementwise map where one element may split into several.
    PolySet lift_split(const std::function<std::vector<Polyhedron>(const Polyhedron&)>& op) const;
    /// Poly-hull of all elements.
    Polyhedron collapse() const;

    /// *this widened by t; requires entails(t) and cap >= 1. Elements of t are
    /// merged down to `cap`, then each is widened from the hull of the
    /// elements of *this it contains. That result is kept when it lowers the
    /// padded multiset of element certificates (codimension, inequality
    /// count); otherwise the answer is the hull widening.
    PolySet widening(const PolySet& t, std::size_t cap) const;
    /// {collapse() widened by t.collapse()}.
    PolySet hull_widening(const PolySet& t) const;

private:
    std::size_t n_;
    Topology topo_;
    std::vector<Polyhedron> elems_;
};

/// Merges elements of s pairwise until at most `cap` remain.
PolySet collapse_to(const PolySet& s, std::size_t cap);

}  // namespace polyan
