#include "polyan/analyzer.hpp"

#include <algorithm>

namespace polyan {

using imp::Aexp;
using imp::Bexp;
using imp::Stmt;

AbstractStore::AbstractStore(DomainKind kind, std::size_t cap, PolySet value)
    : kind_(kind), cap_(cap), value_(std::move(value)) {
    if (cap_ == 0) throw std::invalid_argument("powerset cap must be at least 1");
}

AbstractStore AbstractStore::from(const Polyhedron& p, const AnalysisOptions& opts) {
    return AbstractStore(opts.domain, opts.cap, PolySet(p));
}

AbstractStore AbstractStore::bottom(std::size_t n, const AnalysisOptions& opts) {
    return AbstractStore(opts.domain, opts.cap, PolySet(n));
}

AbstractStore AbstractStore::join(const AbstractStore& o) const {
    if (kind_ == DomainKind::poly) return AbstractStore(kind_, cap_, PolySet(hull().poly_hull(o.hull())));
    return AbstractStore(kind_, cap_, value_.join(o.value_));
}

bool AbstractStore::leq(const AbstractStore& o) const {
    if (kind_ == DomainKind::poly) return o.hull().contains(hull());
    return value_.entails(o.value_);
}

AbstractStore AbstractStore::widen(const AbstractStore& o, bool hull_only) const {
    if (hull_only) return AbstractStore(kind_, cap_, value_.hull_widening(o.value_));
    if (kind_ == DomainKind::poly) return AbstractStore(kind_, cap_, PolySet(hull().standard_widening(o.hull())));
    return AbstractStore(kind_, cap_, value_.widening(o.value_, cap_));
}

AbstractStore AbstractStore::map(const std::function<Polyhedron(const Polyhedron&)>& f) const {
    return AbstractStore(kind_, cap_, value_.lift(f));
}

AbstractStore AbstractStore::map_split(const std::function<std::vector<Polyhedron>(const Polyhedron&)>& f) const {
    PolySet parts = value_.lift_split(f);
    if (kind_ == DomainKind::poly) return AbstractStore(kind_, cap_, PolySet(parts.collapse()));
    return AbstractStore(kind_, cap_, std::move(parts));
}

Interval AbstractStore::variable_range(std::size_t var) const {
    Interval out = Interval::bottom();
    LinExpr e = LinExpr::variable(var, dimension());
    for (const auto& p : value_.elements()) {
        ExprBounds b = p.bounds(e);
        std::optional<Integer> lo, hi;
        if (b.lower) {
            Integer c;
            mpz_cdiv_q(c.get_mpz_t(), b.lower->get_num_mpz_t(), b.lower->get_den_mpz_t());
            if (!b.lower_attained && Rational(c) == *b.lower) c += 1;
            lo = c;
        }
        if (b.upper) {
            Integer f;
            mpz_fdiv_q(f.get_mpz_t(), b.upper->get_num_mpz_t(), b.upper->get_den_mpz_t());
            if (!b.upper_attained && Rational(f) == *b.upper) f -= 1;
            hi = f;
        }
        out = out.join(Interval(lo, hi));
    }
    return out;
}

Interval abstract_eval(const Aexp& a, const AbstractStore& s) {
    if (s.is_bottom()) return Interval::bottom();
    switch (a.kind) {
        case Aexp::Kind::num: return alpha_int(a.value);
        case Aexp::Kind::var: return s.variable_range(a.var);
        case Aexp::Kind::add: return abstract_eval(*a.lhs, s) + abstract_eval(*a.rhs, s);
        case Aexp::Kind::sub: return abstract_eval(*a.lhs, s) - abstract_eval(*a.rhs, s);
        case Aexp::Kind::mul: return abstract_eval(*a.lhs, s) * abstract_eval(*a.rhs, s);
    }
    return Interval::top();
}

ABool abstract_eval(const Bexp& b, const AbstractStore& s) {
    if (s.is_bottom()) return ABool::bot;
    switch (b.kind) {
        case Bexp::Kind::lit: return b.value ? ABool::tt : ABool::ff;
        case Bexp::Kind::eq: return abstract_eq(abstract_eval(*b.lhs, s), abstract_eval(*b.rhs, s));
        case Bexp::Kind::lt: return abstract_lt(abstract_eval(*b.lhs, s), abstract_eval(*b.rhs, s));
    }
    return ABool::top;
}

AbstractStore filter(const AbstractStore& s, const Bexp& b, bool branch) {
    if (s.is_bottom()) return s;
    const std::size_t n = s.dimension();
    auto none = [&] { return s.map([](const Polyhedron& p) { return Polyhedron::empty(p.dimension()); }); };
    ABool ab = abstract_eval(b, s);
    if (branch ? !may_be_true(ab) : !may_be_false(ab)) return none();
    if (b.kind == Bexp::Kind::lit) return b.value == branch ? s : none();
    auto l = imp::linearize(*b.lhs, n);
    auto r = imp::linearize(*b.rhs, n);
    if (!l || !r) return s;
    LinExpr d = *l - *r;
    auto meet = [&](const Constraint& c) { return s.map([&](const Polyhedron& p) { return p.add_constraint(c); }); };
    if (b.kind == Bexp::Kind::lt) {
        if (branch) return meet(Constraint::from_expr(d + LinExpr(n, 1), RelOp::le));
        return meet(Constraint::from_expr(d, RelOp::ge));
    }
    if (branch) return meet(Constraint::from_expr(d, RelOp::eq));
    if (s.kind() == DomainKind::poly) return s;
    Constraint below = Constraint::from_expr(d + LinExpr(n, 1), RelOp::le);
    Constraint above = Constraint::from_expr(d - LinExpr(n, 1), RelOp::ge);
    return s.map_split([&](const Polyhedron& p) {
        return std::vector<Polyhedron>{p.add_constraint(below), p.add_constraint(above)};
    });
}

AbstractStore abstract_assign(const AbstractStore& s, std::size_t var, const Aexp& a) {
    if (s.is_bottom()) return s;
    if (auto e = imp::linearize(a, s.dimension()))
        return s.map([&](const Polyhedron& p) { return p.affine_image(var, *e); });
    Interval m = abstract_eval(a, s);
    std::optional<LinExpr> lo, hi;
    if (m.lower()) lo = LinExpr(s.dimension(), Rational(*m.lower()));
    if (m.upper()) hi = LinExpr(s.dimension(), Rational(*m.upper()));
    return s.map([&](const Polyhedron& p) { return p.bounded_affine_image(var, lo, hi); });
}

namespace {

class Engine {
public:
    Engine(const imp::Program& p, const AnalysisOptions& o) : prog_(p), opts_(o) {
        const std::size_t n = p.vars.size();
        for (std::size_t i = 0; i < p.points.size(); ++i) res_.entry.push_back(AbstractStore::bottom(n, o));
    }

    AnalysisResult run(const AbstractStore& init) {
        AbstractStore out = exec(*prog_.body, init);
        AnalysisResult r{std::move(res_.entry), out, std::move(res_.loop_heads), res_.widenings, res_.loop_expansions};
        return r;
    }

private:
    AbstractStore exec(const Stmt& s, const AbstractStore& in) {
        res_.entry[s.id] = res_.entry[s.id].join(in);
        switch (s.kind) {
            case Stmt::Kind::skip: return in;
            case Stmt::Kind::assign: return abstract_assign(in, s.var, *s.expr);
            case Stmt::Kind::seq: return exec(*s.s1, exec(*s.s0, in));
            case Stmt::Kind::ite:
                return exec(*s.s0, filter(in, *s.cond, true)).join(exec(*s.s1, filter(in, *s.cond, false)));
            case Stmt::Kind::loop: return loop(s, in);
        }
        return in;
    }

    void note_head(const Stmt& s, const AbstractStore& st) {
        auto it = res_.loop_heads.find(s.id);
        if (it == res_.loop_heads.end())
            res_.loop_heads.emplace(s.id, st);
        else
            it->second = it->second.join(st);
    }

    // The chain holds the stores of the successive unfoldings of this loop
    // node along the current path of the abstract tree.
    AbstractStore loop(const Stmt& s, const AbstractStore& in) {
        const std::size_t n = prog_.vars.size();
        std::vector<AbstractStore> chain{in};
        std::vector<AbstractStore> exits;
        std::size_t joins = 0, widenings = 0;
        for (;;) {
            const AbstractStore& cur = chain.back();
            note_head(s, cur);
            exits.push_back(filter(cur, *s.cond, false));
            AbstractStore next = exec(*s.s0, filter(cur, *s.cond, true));
            if (++res_.loop_expansions > opts_.max_local_iter)
                throw EngineError("loop at " + std::to_string(s.pos.line) + ":" + std::to_string(s.pos.col) +
                                  " did not stabilize");
            auto m = std::find_if(chain.begin(), chain.end(), [&](const AbstractStore& a) { return next.leq(a); });
            if (m != chain.end()) {
                note_head(s, next);
                std::size_t from = static_cast<std::size_t>(m - chain.begin());
                AbstractStore f = AbstractStore::bottom(n, opts_);
                for (std::size_t i = from; i < exits.size(); ++i) f = f.join(exits[i]);
                AbstractStore x = AbstractStore::bottom(n, opts_);
                for (std::size_t it = 0;; ++it) {
                    AbstractStore nx = f.join(x);
                    if (nx.equals(x)) break;
                    if (it > opts_.max_local_iter) throw EngineError("local fixpoint did not converge");
                    x = std::move(nx);
                }
                for (std::size_t i = 0; i < from; ++i) x = x.join(exits[i]);
                return x;
            }
            AbstractStore joined = cur.join(next);
            if (joins < opts_.delay) {
                ++joins;
                chain.push_back(std::move(joined));
            } else {
                ++res_.widenings;
                chain.push_back(cur.widen(joined, widenings++ >= opts_.powerset_widenings));
            }
        }
    }

    const imp::Program& prog_;
    AnalysisOptions opts_;
    AnalysisResult res_{{}, AbstractStore::bottom(0, {}), {}, 0, 0};
};

}  // namespace

AnalysisResult analyze(const imp::Program& p, const Polyhedron& initial, const AnalysisOptions& opts) {
    if (initial.dimension() != p.vars.size())
        throw DimensionError("analyze: initial store dimension does not match the program variables");
    if (initial.is_nnc()) throw TopologyError("analyze: initial store must be closed");
    if (opts.cap == 0) throw std::invalid_argument("powerset cap must be at least 1");
    Engine e(p, opts);
    return e.run(AbstractStore::from(initial, opts));
}

}  // namespace polyan
