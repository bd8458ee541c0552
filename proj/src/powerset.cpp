#include "polyan/powerset.hpp"

#include <algorithm>
#include <limits>

namespace polyan {

namespace {

void check_space(const PolySet& a, const PolySet& b, const char* op) {
    if (a.dimension() != b.dimension()) throw DimensionError(std::string(op) + ": dimension mismatch");
    if (a.topology() != b.topology()) throw TopologyError(std::string(op) + ": topology mismatch");
}

// Constraints of h that appear in neither a nor b.
std::size_t new_constraints(const Polyhedron& h, const Polyhedron& a, const Polyhedron& b) {
    auto ca = a.minimized_constraints();
    auto cb = b.minimized_constraints();
    std::size_t count = 0;
    for (const auto& c : h.minimized_constraints())
        if (std::find(ca.begin(), ca.end(), c) == ca.end() && std::find(cb.begin(), cb.end(), c) == cb.end()) ++count;
    return count;
}

}  // namespace

PolySet::PolySet(const Polyhedron& p) : n_(p.dimension()), topo_(p.topology()) {
    if (!p.is_empty()) elems_.push_back(p);
}

PolySet PolySet::reduce(std::size_t n, Topology t, std::vector<Polyhedron> raw) {
    PolySet out(n, t);
    std::vector<Polyhedron> live;
    for (auto& p : raw) {
        if (p.dimension() != n) throw DimensionError("PolySet: element dimension mismatch");
        if (p.topology() != t) throw TopologyError("PolySet: element topology mismatch");
        if (!p.is_empty()) live.push_back(std::move(p));
    }
    std::vector<bool> dead(live.size(), false);
    for (std::size_t i = 0; i < live.size(); ++i) {
        if (dead[i]) continue;
        for (std::size_t j = 0; j < live.size() && !dead[i]; ++j) {
            if (i == j || dead[j]) continue;
            if (live[j].contains(live[i])) dead[i] = true;
        }
    }
    for (std::size_t i = 0; i < live.size(); ++i)
        if (!dead[i]) out.elems_.push_back(std::move(live[i]));
    return out;
}

PolySet PolySet::join(const PolySet& o) const {
    check_space(*this, o, "join");
    std::vector<Polyhedron> all = elems_;
    all.insert(all.end(), o.elems_.begin(), o.elems_.end());
    return reduce(n_, topo_, std::move(all));
}

PolySet PolySet::meet(const PolySet& o) const {
    check_space(*this, o, "meet");
    std::vector<Polyhedron> all;
    for (const auto& a : elems_)
        for (const auto& b : o.elems_) all.push_back(a.intersection(b));
    return reduce(n_, topo_, std::move(all));
}

bool PolySet::entails(const PolySet& o) const {
    check_space(*this, o, "entails");
    return std::all_of(elems_.begin(), elems_.end(), [&](const Polyhedron& a) {
        return std::any_of(o.elems_.begin(), o.elems_.end(), [&](const Polyhedron& b) { return b.contains(a); });
    });
}

bool PolySet::contains_point(std::span<const Rational> v) const {
    return std::any_of(elems_.begin(), elems_.end(), [&](const Polyhedron& p) { return p.contains_point(v); });
}

PolySet PolySet::lift(const std::function<Polyhedron(const Polyhedron&)>& op) const {
    std::vector<Polyhedron> out;
    std::size_t n = n_;
    Topology t = topo_;
    for (const auto& p : elems_) {
        out.push_back(op(p));
        n = out.back().dimension();
        t = out.back().topology();
    }
    return reduce(n, t, std::move(out));
}

PolySet PolySet::lift_split(const std::function<std::vector<Polyhedron>(const Polyhedron&)>& op) const {
    std::vector<Polyhedron> out;
    for (const auto& p : elems_) {
        auto parts = op(p);
        out.insert(out.end(), parts.begin(), parts.end());
    }
    return reduce(n_, topo_, std::move(out));
}

Polyhedron PolySet::collapse() const {
    Polyhedron h = Polyhedron::empty(n_, topo_);
    for (const auto& p : elems_) h = h.poly_hull(p);
    return h;
}

namespace {

// True when the hull of a and b is exactly their union (closed case only).
bool hull_is_union(const Polyhedron& h, const Polyhedron& a, const Polyhedron& b) {
    if (h.is_nnc()) return false;
    for (const auto& c : a.minimized_constraints()) {
        LinExpr e = c.expression();
        std::vector<LinExpr> sides{e};
        if (c.is_equality()) sides.push_back(-e);
        for (const auto& s : sides) {
            Polyhedron part = h.add_constraint(Constraint::from_expr(s, RelOp::le));
            if (part.is_empty() || part.entails(Constraint::from_expr(s, RelOp::eq))) continue;
            if (!b.contains(part)) return false;
        }
    }
    return true;
}

// Convergence certificate of a polyhedron: codimension, then inequality count.
// Smaller is closer to convergence.
using Cert = std::pair<std::size_t, std::size_t>;

Cert cert(const Polyhedron& p) {
    Cert c{0, 0};
    for (const auto& k : p.minimized_constraints()) (k.is_equality() ? c.first : c.second)++;
    return c;
}

// Multiset order: a > b when b arises from a by replacing elements with
// finitely many strictly smaller ones.
bool multiset_greater(std::vector<Cert> a, std::vector<Cert> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a == b) return false;
    std::vector<Cert> only_a, only_b;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_a));
    std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only_b));
    return std::all_of(only_b.begin(), only_b.end(), [&](const Cert& y) {
        return std::any_of(only_a.begin(), only_a.end(), [&](const Cert& x) { return y < x; });
    });
}

// Element certificates padded to `cap` entries with a top value, so that a
// fresh disjunct counts as progress.
std::vector<Cert> certs(const PolySet& s, std::size_t cap) {
    const Cert top{std::numeric_limits<std::size_t>::max(), 0};
    std::vector<Cert> out;
    for (const auto& p : s.elements()) out.push_back(cert(p));
    while (out.size() < cap) out.push_back(top);
    return out;
}

}  // namespace

PolySet collapse_to(const PolySet& s, std::size_t cap) {
    if (cap == 0) throw std::invalid_argument("powerset cap must be at least 1");
    std::vector<Polyhedron> el = s.elements();
    while (el.size() > cap) {
        std::size_t bi = 0, bj = 1;
        std::pair<bool, std::size_t> best{true, std::numeric_limits<std::size_t>::max()};
        Polyhedron best_hull;
        for (std::size_t i = 0; i < el.size(); ++i)
            for (std::size_t j = i + 1; j < el.size(); ++j) {
                Polyhedron h = el[i].poly_hull(el[j]);
                std::pair<bool, std::size_t> score{!hull_is_union(h, el[i], el[j]), new_constraints(h, el[i], el[j])};
                if (score < best) {
                    best = score;
                    bi = i;
                    bj = j;
                    best_hull = h;
                }
            }
        el.erase(el.begin() + static_cast<std::ptrdiff_t>(bj));
        el[bi] = best_hull;
        el = PolySet::reduce(s.dimension(), s.topology(), std::move(el)).elements();
    }
    return PolySet::reduce(s.dimension(), s.topology(), std::move(el));
}

PolySet PolySet::widening(const PolySet& t, std::size_t cap) const {
    check_space(*this, t, "widening");
    if (cap == 0) throw std::invalid_argument("powerset cap must be at least 1");
    if (!entails(t)) throw PreconditionError("powerset widening: first argument must entail the second");
    if (t.entails(*this)) return *this;
    PolySet tc = collapse_to(t, cap);
    std::vector<Polyhedron> out;
    for (const auto& te : tc.elements()) {
        Polyhedron h = Polyhedron::empty(n_, topo_);
        bool paired = false;
        for (const auto& se : elems_)
            if (te.contains(se)) {
                h = h.poly_hull(se);
                paired = true;
            }
        out.push_back(paired ? h.standard_widening(te) : te);
    }
    PolySet r = reduce(n_, topo_, std::move(out));
    if (is_bottom()) return r;
    // Accept the elementwise result only when it makes progress on the
    // (element certificates, hull certificate) measure.
    auto before = certs(*this, cap), after = certs(r, cap);
    if (multiset_greater(before, after)) return r;
    std::sort(before.begin(), before.end());
    std::sort(after.begin(), after.end());
    Polyhedron hs = collapse();
    if (before == after && cert(r.collapse()) < cert(hs)) return r;
    return PolySet(hs.standard_widening(t.collapse()));
}

PolySet PolySet::hull_widening(const PolySet& t) const {
    check_space(*this, t, "widening");
    if (!entails(t)) throw PreconditionError("powerset widening: first argument must entail the second");
    if (is_bottom()) return t.is_bottom() ? t : PolySet(t.collapse());
    return PolySet(collapse().standard_widening(t.collapse()));
}

}  // namespace polyan
