#include "polyan/polyhedron.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <string>

#include "dd.hpp"

namespace polyan {

namespace detail {

struct PolyState {
    KPtr kernel;
    mutable std::mutex mu;
    mutable std::optional<std::vector<Constraint>> cons;
    mutable std::optional<std::vector<Generator>> gens;
};

}  // namespace detail

using detail::HomSys;
using detail::Kernel;
using detail::KPtr;

namespace {

std::size_t kdim(std::size_t n, Topology t) { return t == Topology::nnc ? n + 1 : n; }

IntVector slice(const IntVector& v, std::size_t n) {
    return IntVector(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n));
}

bool is_zero(const IntVector& v) {
    return std::all_of(v.begin(), v.end(), [](const Integer& x) { return x == 0; });
}

IntVector hom_constraint(const Constraint& c, std::size_t n, Topology t) {
    if (c.dimension() > n) throw DimensionError("constraint dimension " + std::to_string(c.dimension()) +
                                                " exceeds space dimension " + std::to_string(n));
    if (c.is_strict() && t == Topology::closed) throw TopologyError("strict constraint in a closed polyhedron");
    const std::size_t m = kdim(n, t);
    IntVector v(m + 1, Integer(0));
    for (std::size_t i = 0; i < c.dimension(); ++i) v[i] = c.coefficient(i);
    if (c.is_strict()) v[n] = -1;
    v[m] = -c.rhs();
    return v;
}

void add_cons(HomSys& s, std::span<const Constraint> cs, std::size_t n, Topology t) {
    for (const auto& c : cs) {
        IntVector v = hom_constraint(c, n, t);
        (c.is_equality() ? s.eq : s.ineq).push_back(std::move(v));
    }
}

void add_eps_bounds(HomSys& s, std::size_t n) {
    IntVector lo(n + 2, Integer(0)), hi(n + 2, Integer(0));
    lo[n] = 1;
    hi[n] = -1;
    hi[n + 1] = 1;
    s.ineq.push_back(std::move(lo));
    s.ineq.push_back(std::move(hi));
}

// NNC generators in the slack-augmented space: points appear at both eps = 1
// and eps = 0, closure points only at eps = 0.
HomSys eps_gens(std::span<const Generator> gs, std::size_t n) {
    HomSys s;
    for (const auto& g : gs) {
        IntVector v = g.coefficients();
        v.resize(n, Integer(0));
        if (g.is_ray()) {
            v.push_back(0);
            v.push_back(0);
            s.ineq.push_back(std::move(v));
            continue;
        }
        v.push_back(0);
        v.push_back(g.divisor());
        if (g.is_point()) {
            IntVector top = v;
            top[n] = g.divisor();
            s.ineq.push_back(std::move(top));
        }
        s.ineq.push_back(std::move(v));
    }
    return s;
}

struct HomExpr {
    IntVector v;
    Integer den;
};

HomExpr hom_expr(const LinExpr& e, std::size_t n, Topology t) {
    if (e.dimension() > n) throw DimensionError("expression dimension exceeds space dimension");
    const std::size_t m = kdim(n, t);
    Integer den = 1;
    for (const auto& q : e.coefficients()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t());
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), e.constant().get_den_mpz_t());
    IntVector v(m + 1, Integer(0));
    for (std::size_t i = 0; i < e.dimension(); ++i) {
        Rational s = e.coefficient(i) * den;
        v[i] = s.get_num();
    }
    Rational c = e.constant() * den;
    v[m] = c.get_num();
    return {std::move(v), std::move(den)};
}

bool generator_ok(const Constraint& c, const Generator& g) {
    SatResult r = satisfies(c, g);
    if (c.is_equality()) return r == SatResult::saturates;
    if (c.is_strict() && g.is_point()) return r == SatResult::satisfies;
    return r != SatResult::violates;
}

}  // namespace

Polyhedron::Polyhedron() : Polyhedron(0, Topology::closed, Kernel::universe(0)) {}

Polyhedron::Polyhedron(std::size_t n, Topology t, std::shared_ptr<const Kernel> k)
    : n_(n), topo_(t), st_(std::make_shared<detail::PolyState>()) {
    st_->kernel = std::move(k);
}

const Kernel& Polyhedron::kernel() const { return *st_->kernel; }
const detail::PolyState& Polyhedron::state() const { return *st_; }

void Polyhedron::same_space(const Polyhedron& q, const char* op) const {
    if (n_ != q.n_)
        throw DimensionError(std::string(op) + ": dimension " + std::to_string(n_) + " vs " + std::to_string(q.n_));
    if (topo_ != q.topo_) throw TopologyError(std::string(op) + ": topology mismatch");
}

Polyhedron Polyhedron::universe(std::size_t n, Topology t) {
    if (t == Topology::closed) return Polyhedron(n, t, Kernel::universe(n));
    HomSys s;
    add_eps_bounds(s, n);
    return Polyhedron(n, t, Kernel::from_cons(n + 1, std::move(s)));
}

Polyhedron Polyhedron::empty(std::size_t n, Topology t) { return Polyhedron(n, t, Kernel::empty(kdim(n, t))); }

Polyhedron Polyhedron::from_constraints(std::size_t n, std::span<const Constraint> cs, Topology t) {
    HomSys s;
    add_cons(s, cs, n, t);
    if (t == Topology::nnc) add_eps_bounds(s, n);
    return Polyhedron(n, t, Kernel::from_cons(kdim(n, t), std::move(s)));
}

Polyhedron Polyhedron::from_generators(std::size_t n, std::span<const Generator> gs, Topology t) {
    bool any_point = false;
    for (const auto& g : gs) {
        if (g.dimension() > n) throw DimensionError("generator dimension exceeds space dimension");
        if (g.is_closure_point() && t == Topology::closed) throw TopologyError("closure point in a closed polyhedron");
        any_point = any_point || g.is_point();
    }
    if (gs.empty()) return empty(n, t);
    if (!any_point) throw std::invalid_argument("nonempty generator system without a point");
    if (t == Topology::nnc) return Polyhedron(n, t, Kernel::from_gens(n + 1, eps_gens(gs, n)));
    HomSys s;
    for (const auto& g : gs) {
        IntVector v = g.coefficients();
        v.resize(n, Integer(0));
        v.push_back(g.is_ray() ? Integer(0) : g.divisor());
        s.ineq.push_back(std::move(v));
    }
    return Polyhedron(n, t, Kernel::from_gens(n, std::move(s)));
}

std::vector<Generator> Polyhedron::minimized_generators() const {
    std::lock_guard lock(st_->mu);
    if (st_->gens) return *st_->gens;
    const HomSys& g = kernel().gens();
    const std::size_t m = kdim(n_, topo_);
    std::vector<Generator> out;
    for (const auto& l : g.eq) {
        IntVector r = slice(l, n_);
        if (is_zero(r)) continue;
        out.push_back(Generator::ray(r));
        for (auto& x : r) x = -x;
        out.push_back(Generator::ray(std::move(r)));
    }
    for (const auto& v : g.ineq) {
        IntVector p = slice(v, n_);
        if (v[m] == 0) {
            if (!is_zero(p)) out.push_back(Generator::ray(std::move(p)));
        } else if (topo_ == Topology::nnc && v[n_] == 0) {
            out.push_back(Generator::closure_point(std::move(p), v[m]));
        } else {
            out.push_back(Generator::point(std::move(p), v[m]));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (topo_ == Topology::nnc) {
        std::vector<Generator> pts;
        for (const auto& x : out)
            if (x.is_point()) pts.push_back(x);
        std::erase_if(out, [&](const Generator& x) {
            if (!x.is_closure_point()) return false;
            Generator as_point = Generator::point(x.coefficients(), x.divisor());
            return std::binary_search(pts.begin(), pts.end(), as_point);
        });
    }
    st_->gens = out;
    return out;
}

std::vector<Constraint> Polyhedron::minimized_constraints() const {
    if (is_empty()) return {Constraint::make(IntVector(n_, Integer(0)), 1, Relation::ge)};
    {
        std::lock_guard lock(st_->mu);
        if (st_->cons) return *st_->cons;
    }
    std::vector<Constraint> eqs, ineqs;
    if (topo_ == Topology::closed) {
        const HomSys& c = kernel().cons();
        for (const auto& v : c.eq) eqs.push_back(Constraint::make(slice(v, n_), -v[n_], Relation::eq));
        for (const auto& v : c.ineq) ineqs.push_back(Constraint::make(slice(v, n_), -v[n_], Relation::ge));
    } else {
        auto gens = minimized_generators();
        HomSys lines_too = eps_gens(gens, n_);
        KPtr star = Kernel::from_gens(n_ + 1, std::move(lines_too));
        const HomSys& c = star->cons();
        const std::size_t m = n_ + 1;
        for (const auto& v : c.eq) {
            IntVector a = slice(v, n_);
            if (is_zero(a)) continue;
            eqs.push_back(Constraint::make(std::move(a), -v[m], Relation::eq));
        }
        for (const auto& v : c.ineq) {
            IntVector a = slice(v, n_);
            if (is_zero(a)) continue;
            ineqs.push_back(Constraint::make(std::move(a), -v[m], v[n_] < 0 ? Relation::gt : Relation::ge));
        }
    }
    std::sort(eqs.begin(), eqs.end());
    std::sort(ineqs.begin(), ineqs.end());
    ineqs.erase(std::unique(ineqs.begin(), ineqs.end()), ineqs.end());
    eqs.insert(eqs.end(), ineqs.begin(), ineqs.end());
    std::lock_guard lock(st_->mu);
    st_->cons = eqs;
    return eqs;
}

bool Polyhedron::is_empty() const {
    const HomSys& g = kernel().gens();
    const std::size_t m = kdim(n_, topo_);
    for (const auto& v : g.ineq)
        if (v[m] > 0 && (topo_ == Topology::closed || v[n_] > 0)) return false;
    return true;
}

bool Polyhedron::is_universe() const { return !is_empty() && minimized_constraints().empty(); }

bool Polyhedron::contains_point(std::span<const Rational> v) const {
    if (v.size() != n_) throw DimensionError("contains_point: dimension mismatch");
    if (is_empty()) return false;
    Generator g = Generator::point(v);
    for (const auto& c : minimized_constraints())
        if (!generator_ok(c, g)) return false;
    return true;
}

bool Polyhedron::contains(const Polyhedron& q) const {
    same_space(q, "contains");
    if (topo_ == Topology::closed) return detail::k_contains(kernel(), q.kernel());
    if (q.is_empty()) return true;
    if (is_empty()) return false;
    auto gens = q.minimized_generators();
    for (const auto& c : minimized_constraints())
        for (const auto& g : gens)
            if (!generator_ok(c, g)) return false;
    return true;
}

bool Polyhedron::equals(const Polyhedron& q) const { return contains(q) && q.contains(*this); }

bool Polyhedron::entails(const Constraint& c) const {
    if (c.dimension() > n_) throw DimensionError("entails: dimension mismatch");
    Constraint cc = c.resized(n_);
    for (const auto& g : minimized_generators())
        if (!generator_ok(cc, g)) return false;
    return true;
}

ExprBounds Polyhedron::bounds(const LinExpr& e) const {
    if (e.dimension() != n_) throw DimensionError("bounds: dimension mismatch");
    ExprBounds b;
    bool lower_open = false, upper_open = false;
    bool first = true;
    for (const auto& g : minimized_generators()) {
        if (g.is_ray()) {
            Rational s = 0;
            for (std::size_t i = 0; i < n_; ++i) s += e.coefficient(i) * g.coefficients()[i];
            if (s < 0) lower_open = true;
            if (s > 0) upper_open = true;
            continue;
        }
        auto x = g.coordinates();
        Rational val = evaluate(e, x);
        bool pt = g.is_point();
        if (first) {
            b.lower = b.upper = val;
            b.lower_attained = b.upper_attained = pt;
            first = false;
            continue;
        }
        if (val < *b.lower) {
            b.lower = val;
            b.lower_attained = pt;
        } else if (val == *b.lower) {
            b.lower_attained = b.lower_attained || pt;
        }
        if (val > *b.upper) {
            b.upper = val;
            b.upper_attained = pt;
        } else if (val == *b.upper) {
            b.upper_attained = b.upper_attained || pt;
        }
    }
    if (lower_open) b.lower.reset();
    if (upper_open) b.upper.reset();
    return b;
}

Polyhedron Polyhedron::intersection(const Polyhedron& q) const {
    same_space(q, "intersection");
    return Polyhedron(n_, topo_, detail::k_meet(kernel(), q.kernel()));
}

Polyhedron Polyhedron::add_constraint(const Constraint& c) const { return add_constraints(std::span(&c, 1)); }

Polyhedron Polyhedron::add_constraints(std::span<const Constraint> cs) const {
    HomSys s;
    add_cons(s, cs, n_, topo_);
    return Polyhedron(n_, topo_, detail::k_add_cons(kernel(), s));
}

Polyhedron Polyhedron::poly_hull(const Polyhedron& q) const {
    same_space(q, "poly_hull");
    if (is_empty()) return q;
    if (q.is_empty()) return *this;
    return Polyhedron(n_, topo_, detail::k_hull(st_->kernel, q.st_->kernel));
}

Polyhedron Polyhedron::affine_image(std::size_t k, const LinExpr& e) const {
    if (k >= n_) throw DimensionError("affine_image: dimension out of range");
    HomExpr h = hom_expr(e, n_, topo_);
    return Polyhedron(n_, topo_, detail::k_affine_image(kernel(), k, h.v, h.den));
}

Polyhedron Polyhedron::affine_preimage(std::size_t k, const LinExpr& e) const {
    if (k >= n_) throw DimensionError("affine_preimage: dimension out of range");
    HomExpr h = hom_expr(e, n_, topo_);
    return Polyhedron(n_, topo_, detail::k_affine_preimage(kernel(), k, h.v, h.den));
}

Polyhedron Polyhedron::bounded_affine_image(std::size_t k, const std::optional<LinExpr>& lo,
                                            const std::optional<LinExpr>& hi) const {
    if (k >= n_) throw DimensionError("bounded_affine_image: dimension out of range");
    Polyhedron p = add_dimensions(1);
    LinExpr z = LinExpr::variable(n_, n_ + 1);
    std::vector<Constraint> cs;
    if (lo) {
        if (lo->dimension() > n_) throw DimensionError("bounded_affine_image: bound dimension");
        cs.push_back(Constraint::from_expr(z - lo->resized(n_ + 1), RelOp::ge));
    }
    if (hi) {
        if (hi->dimension() > n_) throw DimensionError("bounded_affine_image: bound dimension");
        cs.push_back(Constraint::from_expr(z - hi->resized(n_ + 1), RelOp::le));
    }
    p = p.add_constraints(cs);
    std::vector<std::size_t> perm(n_ + 1);
    std::iota(perm.begin(), perm.end(), 0);
    std::swap(perm[k], perm[n_]);
    return p.map_dimensions(perm).remove_dimensions({n_});
}

Polyhedron Polyhedron::relation_image(const Polyhedron& rel) const {
    if (rel.dimension() != 2 * n_) throw DimensionError("relation_image: relation must have dimension 2n");
    if (rel.topology() != topo_) throw TopologyError("relation_image: topology mismatch");
    if (is_empty()) return empty(n_, topo_);
    std::vector<std::size_t> front(n_);
    std::iota(front.begin(), front.end(), 0);
    return add_dimensions(n_).intersection(rel).remove_dimensions(front);
}

Polyhedron Polyhedron::time_elapse(const Polyhedron& rates) const {
    same_space(rates, "time_elapse");
    if (is_empty() || rates.is_empty()) return empty(n_, topo_);
    const std::size_t m = kdim(n_, topo_);
    HomSys extra;
    for (const auto& g : rates.minimized_generators()) {
        IntVector v = g.coefficients();
        if (is_zero(v)) continue;
        v.resize(m + 1, Integer(0));
        extra.ineq.push_back(std::move(v));
    }
    if (extra.ineq.empty()) return *this;
    return Polyhedron(n_, topo_, detail::k_add_gens(kernel(), extra));
}

Polyhedron Polyhedron::topological_closure() const {
    if (topo_ == Topology::closed || is_empty()) return *this;
    auto gens = minimized_generators();
    for (auto& g : gens)
        if (g.is_closure_point()) g = Generator::point(g.coefficients(), g.divisor());
    return from_generators(n_, gens, topo_);
}

Polyhedron Polyhedron::add_dimensions(std::size_t m) const {
    if (m == 0) return *this;
    return Polyhedron(n_ + m, topo_, detail::k_insert_dims(kernel(), n_, m));
}

Polyhedron Polyhedron::remove_dimensions(std::vector<std::size_t> dims) const {
    std::sort(dims.begin(), dims.end());
    dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
    for (auto d : dims)
        if (d >= n_) throw DimensionError("remove_dimensions: index out of range");
    if (dims.empty()) return *this;
    return Polyhedron(n_ - dims.size(), topo_, detail::k_remove_dims(kernel(), dims));
}

Polyhedron Polyhedron::map_dimensions(const std::vector<std::size_t>& perm) const {
    if (perm.size() != n_) throw DimensionError("map_dimensions: permutation size mismatch");
    std::vector<bool> seen(n_, false);
    for (auto p : perm) {
        if (p >= n_ || seen[p]) throw DimensionError("map_dimensions: not a permutation");
        seen[p] = true;
    }
    std::vector<std::size_t> full = perm;
    if (topo_ == Topology::nnc) full.push_back(n_);
    return Polyhedron(n_, topo_, detail::k_map_dims(kernel(), full));
}

Polyhedron Polyhedron::concatenate(const Polyhedron& q) const {
    if (topo_ != q.topo_) throw TopologyError("concatenate: topology mismatch");
    KPtr a = detail::k_insert_dims(kernel(), n_, q.n_);
    KPtr b = detail::k_insert_dims(q.kernel(), 0, n_);
    return Polyhedron(n_ + q.n_, topo_, detail::k_meet(*a, *b));
}

Polyhedron Polyhedron::project_onto(const std::vector<std::size_t>& dims) const {
    std::vector<bool> keep(n_, false);
    for (auto d : dims) {
        if (d >= n_ || keep[d]) throw DimensionError("project_onto: bad dimension list");
        keep[d] = true;
    }
    std::vector<std::size_t> drop;
    for (std::size_t i = 0; i < n_; ++i)
        if (!keep[i]) drop.push_back(i);
    Polyhedron p = remove_dimensions(drop);
    std::vector<std::size_t> sorted = dims;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> perm(dims.size());
    for (std::size_t j = 0; j < dims.size(); ++j) {
        auto pos = std::lower_bound(sorted.begin(), sorted.end(), dims[j]) - sorted.begin();
        perm[static_cast<std::size_t>(pos)] = j;
    }
    return p.map_dimensions(perm);
}

Polyhedron Polyhedron::with_topology(Topology t) const {
    if (t == topo_) return *this;
    if (is_empty()) return empty(n_, t);
    auto cs = topo_ == Topology::nnc ? topological_closure().minimized_constraints() : minimized_constraints();
    return from_constraints(n_, cs, t);
}

Polyhedron Polyhedron::standard_widening(const Polyhedron& q) const {
    same_space(q, "standard_widening");
    if (!q.contains(*this)) throw PreconditionError("standard_widening: second argument must contain the first");
    if (is_empty()) return q;
    if (topo_ == Topology::closed) return Polyhedron(n_, topo_, detail::k_widen(st_->kernel, q.st_->kernel));
    auto eps_form = [&](const Polyhedron& p) {
        HomSys s;
        auto cs = p.minimized_constraints();
        add_cons(s, cs, n_, topo_);
        add_eps_bounds(s, n_);
        return Kernel::from_cons(n_ + 1, std::move(s));
    };
    KPtr ps = eps_form(*this);
    KPtr qs = detail::k_hull(ps, eps_form(q));
    return Polyhedron(n_, topo_, detail::k_widen(ps, qs));
}

}  // namespace polyan
