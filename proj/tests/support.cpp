#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "polyan/analyzer.hpp"
#include "polyan/imp.hpp"
#include "polyan/text.hpp"

namespace polyan::testing {

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

Constraint random_constraint(Rng& rng, std::size_t n, Topology t, int range, double eq_prob) {
    while (true) {
        IntVector a(n);
        bool nonzero = false;
        for (auto& v : a) {
            v = coin(rng, 0.35) ? 0 : uniform(rng, -range, range);
            nonzero = nonzero || v != 0;
        }
        if (!nonzero) continue;
        Relation rel = Relation::ge;
        if (coin(rng, eq_prob))
            rel = Relation::eq;
        else if (t == Topology::nnc && coin(rng, 0.4))
            rel = Relation::gt;
        return Constraint::make(a, uniform(rng, -8, 8), rel);
    }
}

std::vector<Constraint> random_system(Rng& rng, std::size_t n, std::size_t k, Topology t, int range) {
    std::vector<Constraint> cs;
    for (std::size_t i = 0; i < k; ++i) cs.push_back(random_constraint(rng, n, t, range));
    return cs;
}

std::vector<Generator> random_generators(Rng& rng, std::size_t n, std::size_t points, std::size_t rays) {
    std::vector<Generator> gs;
    for (std::size_t i = 0; i < std::max<std::size_t>(points, 1); ++i) {
        IntVector c(n);
        for (auto& v : c) v = uniform(rng, -8, 8);
        gs.push_back(Generator::point(c, uniform(rng, 1, 2)));
    }
    for (std::size_t i = 0; i < rays; ++i) {
        IntVector c(n);
        bool nonzero = false;
        while (!nonzero)
            for (auto& v : c) {
                v = uniform(rng, -3, 3);
                nonzero = nonzero || v != 0;
            }
        gs.push_back(Generator::ray(c));
    }
    return gs;
}

std::vector<Row> rows_of(const std::vector<Constraint>& cs) {
    std::vector<Row> rows;
    for (const auto& c : cs) {
        Row r;
        for (const auto& v : c.coefficients()) r.a.emplace_back(v);
        r.b = c.rhs();
        r.strict = c.is_strict();
        rows.push_back(r);
        if (c.is_equality()) {
            for (auto& v : r.a) v = -v;
            r.b = -r.b;
            rows.push_back(r);
        }
    }
    return rows;
}

namespace {

Row scaled_sum(const Row& p, const Rational& kp, const Row& q, const Rational& kq) {
    Row r;
    r.a.resize(p.a.size());
    for (std::size_t i = 0; i < p.a.size(); ++i) r.a[i] = p.a[i] * kp + q.a[i] * kq;
    r.b = p.b * kp + q.b * kq;
    r.strict = p.strict || q.strict;
    return r;
}

std::string key(const Row& r) {
    // Scale so the first nonzero coefficient has magnitude one.
    Rational s = 1;
    for (const auto& v : r.a)
        if (v != 0) {
            s = abs(v);
            break;
        }
    std::string k;
    for (const auto& v : r.a) k += Rational(v / s).get_str() + ",";
    return k + Rational(r.b / s).get_str() + (r.strict ? ">" : ">=");
}

}  // namespace

bool fm_feasible(std::vector<Row> rows, std::size_t n) {
    for (std::size_t k = n; k-- > 0;) {
        std::vector<Row> pos, neg, next;
        for (auto& r : rows) {
            int s = sgn(r.a[k]);
            (s > 0 ? pos : s < 0 ? neg : next).push_back(std::move(r));
        }
        for (const auto& p : pos)
            for (const auto& q : neg) next.push_back(scaled_sum(p, Rational(1) / p.a[k], q, Rational(-1) / q.a[k]));
        std::set<std::string> seen;
        rows.clear();
        for (auto& r : next) {
            bool zero = std::all_of(r.a.begin(), r.a.end(), [](const Rational& v) { return v == 0; });
            if (zero) {
                if (r.strict ? r.b >= 0 : r.b > 0) return false;
                continue;
            }
            if (seen.insert(key(r)).second) rows.push_back(std::move(r));
        }
    }
    for (const auto& r : rows)
        if (r.strict ? r.b >= 0 : r.b > 0) return false;
    return true;
}

bool fm_includes(const std::vector<Constraint>& inner, const std::vector<Constraint>& outer, std::size_t n) {
    const std::vector<Row> base = rows_of(inner);
    for (const auto& c : outer) {
        for (const Row& r : rows_of({c})) {
            Row neg = r;
            for (auto& v : neg.a) v = -v;
            neg.b = -neg.b;
            neg.strict = !r.strict;
            std::vector<Row> sys = base;
            sys.push_back(neg);
            if (fm_feasible(sys, n)) return false;
        }
    }
    return true;
}

bool satisfies_all(const std::vector<Constraint>& cs, std::span<const Rational> v) {
    for (const auto& c : cs) {
        Rational s = 0;
        for (std::size_t i = 0; i < v.size(); ++i) s += c.coefficients()[i] * v[i];
        if (c.is_equality() ? s != c.rhs() : c.is_strict() ? s <= c.rhs() : s < c.rhs()) return false;
    }
    return true;
}

std::vector<Rational> sample_point(Rng& rng, const Polyhedron& p) {
    auto gs = p.minimized_generators();
    std::vector<Rational> v(p.dimension(), 0);
    std::vector<const Generator*> pts, cps, rays;
    for (const auto& g : gs) (g.is_point() ? pts : g.is_ray() ? rays : cps).push_back(&g);
    if (pts.empty()) return {};
    std::vector<int> lp(pts.size()), lc(cps.size());
    int total = 0;
    for (auto& w : lp) total += w = uniform(rng, 0, 3);
    if (total == 0) total += lp[uniform(rng, 0, static_cast<int>(lp.size()) - 1)] = 1;
    for (auto& w : lc) total += w = uniform(rng, 0, 3);
    auto add = [&](const Generator& g, const Rational& w) {
        auto c = g.is_ray() ? std::vector<Rational>(g.coefficients().begin(), g.coefficients().end()) : g.coordinates();
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += w * c[i];
    };
    for (std::size_t i = 0; i < pts.size(); ++i) add(*pts[i], Rational(lp[i], total));
    for (std::size_t i = 0; i < cps.size(); ++i) add(*cps[i], Rational(lc[i], total));
    for (const auto* r : rays) add(*r, Rational(uniform(rng, 0, 3), uniform(rng, 1, 2)));
    for (auto& x : v) x.canonicalize();
    return v;
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string show(const std::vector<Constraint>& cs, std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));
    return render_system(cs, names);
}

std::string show(const Polyhedron& p) { return show(p.minimized_constraints(), p.dimension()); }

Topology random_topology(Rng& rng) { return coin(rng, 0.5) ? Topology::nnc : Topology::closed; }

}  // namespace

SuiteResult dd_round_trip(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"dd round trip"};
    auto t0 = Clock::now();
    Rng rng(seed);
    for (std::size_t i = 0; i < cases; ++i, ++r.cases) {
        std::size_t n = uniform(rng, 1, 4);
        Topology t = random_topology(rng);
        if (i % 2 == 0) {
            auto cs = random_system(rng, n, uniform(rng, 1, 6), t);
            Polyhedron p = Polyhedron::from_constraints(n, cs, t);
            auto gs = p.minimized_generators();
            Polyhedron back = Polyhedron::from_generators(n, gs, t);
            auto mc = p.minimized_constraints();
            if (!back.equals(p)) r.fail("generators of " + show(cs, n) + " describe " + show(back));
            else if (!fm_includes(cs, mc, n) || !fm_includes(mc, cs, n))
                r.fail("minimized " + show(mc, n) + " differs from " + show(cs, n));
            else if (!Polyhedron::from_constraints(n, mc, t).equals(p))
                r.fail("constraints of " + show(cs, n) + " do not rebuild it");
        } else {
            auto gs = random_generators(rng, n, uniform(rng, 1, 4), uniform(rng, 0, 2));
            if (t == Topology::nnc && coin(rng)) {
                IntVector c(n);
                for (auto& v : c) v = uniform(rng, -8, 8);
                gs.push_back(Generator::closure_point(c));
            }
            Polyhedron p = Polyhedron::from_generators(n, gs, t);
            auto cs = p.minimized_constraints();
            Polyhedron back = Polyhedron::from_constraints(n, cs, t);
            if (!back.equals(p)) r.fail("constraints " + show(cs, n) + " do not rebuild their generators");
            for (const auto& g : gs)
                for (const auto& c : cs)
                    if (satisfies(c, g) == SatResult::violates || (g.is_point() && c.is_strict() && satisfies(c, g) == SatResult::saturates))
                        r.fail("input generator violates " + show({c}, n));
            if (!Polyhedron::from_generators(n, p.minimized_generators(), t).equals(p))
                r.fail("generator minimization changed " + show(p));
        }
    }
    r.seconds = since(t0);
    return r;
}

SuiteResult hull_bounds(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"hull bounds"};
    auto t0 = Clock::now();
    Rng rng(seed);
    for (std::size_t i = 0; i < cases; ++i, ++r.cases) {
        std::size_t n = uniform(rng, 1, 4);
        auto gp = random_generators(rng, n, uniform(rng, 1, 3), uniform(rng, 0, 1));
        auto gq = random_generators(rng, n, uniform(rng, 1, 3), uniform(rng, 0, 1));
        Polyhedron p = Polyhedron::from_generators(n, gp), q = Polyhedron::from_generators(n, gq);
        Polyhedron h = p.poly_hull(q);
        if (!h.contains(p) || !h.contains(q)) r.fail("hull misses an operand: " + show(h));
        auto hc = h.minimized_constraints();
        std::vector<Generator> all = gp;
        all.insert(all.end(), gq.begin(), gq.end());
        for (const auto& g : all)
            for (const auto& c : hc)
                if (satisfies(c, g) == SatResult::violates) r.fail("generator outside hull " + show(h));
        // Every half-space valid on both operands is valid on the hull.
        for (int k = 0; k < 6; ++k) {
            IntVector a(n);
            for (auto& v : a) v = uniform(rng, -8, 8);
            bool bounded = true;
            std::optional<Rational> lo;
            for (const auto& g : all) {
                Rational s = 0;
                if (g.is_ray()) {
                    for (std::size_t j = 0; j < n; ++j) s += a[j] * g.coefficients()[j];
                    if (s < 0) bounded = false;
                    continue;
                }
                auto x = g.coordinates();
                for (std::size_t j = 0; j < n; ++j) s += a[j] * x[j];
                if (!lo || s < *lo) lo = s;
            }
            if (!bounded) continue;
            LinExpr e(n);
            for (std::size_t j = 0; j < n; ++j) e.set_coefficient(j, a[j]);
            e.set_constant(-*lo);
            if (!h.entails(Constraint::from_expr(e, RelOp::ge))) r.fail("hull " + show(h) + " is not minimal");
        }
    }
    r.seconds = since(t0);
    return r;
}

SuiteResult inclusion_vs_fm(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"inclusion vs Fourier-Motzkin"};
    auto t0 = Clock::now();
    Rng rng(seed);
    std::size_t yes = 0;
    for (std::size_t i = 0; i < cases; ++i, ++r.cases) {
        std::size_t n = uniform(rng, 1, 4);
        Topology t = random_topology(rng);
        std::size_t kp = uniform(rng, 1, 3), kq = uniform(rng, 1, 6 - kp);
        auto cp = random_system(rng, n, kp, t), cq = random_system(rng, n, kq, t);
        int mode = uniform(rng, 0, 2);
        if (mode == 1) {
            cq = cp;
            cq.push_back(random_constraint(rng, n, t));
            while (cp.size() + cq.size() > 6) cq.erase(cq.begin());
        } else if (mode == 2) {
            for (auto& c : cp) {
                if (coin(rng)) continue;
                IntVector a = c.coefficients();
                c = Constraint::make(a, c.rhs() - uniform(rng, 0, 3), c.is_equality() ? Relation::ge : c.relation());
            }
            cq = cp;
            for (auto& c : cq) c = Constraint::make(c.coefficients(), c.rhs() + uniform(rng, 0, 2), c.relation());
        }
        Polyhedron p = Polyhedron::from_constraints(n, cp, t), q = Polyhedron::from_constraints(n, cq, t);
        bool got = p.contains(q), want = fm_includes(cq, cp, n);
        yes += want;
        if (got != want)
            r.fail(show(cp, n) + (want ? " contains " : " does not contain ") + show(cq, n));
    }
    if (yes == 0 || yes == cases) r.fail("inclusion instances are all of one kind");
    r.note = std::to_string(yes) + " included";
    r.seconds = since(t0);
    return r;
}

namespace {

Polyhedron random_affine_relation(Rng& rng, std::size_t n) {
    std::vector<Constraint> cs;
    for (std::size_t i = 0; i < n; ++i) {
        IntVector a(2 * n, 0);
        a[n + i] = 1;
        for (std::size_t j = 0; j < n; ++j) a[j] = -uniform(rng, -1, 2);
        cs.push_back(Constraint::make(a, uniform(rng, -3, 3), Relation::eq));
    }
    return Polyhedron::from_constraints(2 * n, cs);
}

}  // namespace

SuiteResult widening_chains(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"widening covariance and chains"};
    auto t0 = Clock::now();
    Rng rng(seed);
    std::size_t chains = 0, moves = 0, longest = 0;
    for (std::size_t i = 0; i < cases; ++i, ++r.cases) {
        std::size_t n = uniform(rng, 1, 4);
        Polyhedron p = Polyhedron::from_constraints(n, random_system(rng, n, uniform(rng, 1, 5), Topology::closed));
        if (p.is_empty()) p = Polyhedron::from_generators(n, random_generators(rng, n, 1, 0));
        Polyhedron extra = Polyhedron::from_constraints(n, random_system(rng, n, uniform(rng, 1, 4), Topology::closed));
        Polyhedron q = p.poly_hull(extra);
        Polyhedron w = p.standard_widening(q);
        if (!w.contains(q)) r.fail("covariance fails for " + show(p) + " and " + show(q));
        for (int k = 0; k < 4; ++k) {
            auto v = sample_point(rng, q);
            if (!v.empty() && !w.contains_point(v)) r.fail("sampled point of Q outside the widening");
        }

        Polyhedron rel = random_affine_relation(rng, n);
        Polyhedron x = p;
        const std::size_t bound = 2 * n + p.minimized_constraints().size();
        std::size_t steps = 0;
        ++chains;
        while (true) {
            Polyhedron next = x.poly_hull(x.relation_image(rel));
            Polyhedron y = x.standard_widening(next);
            if (!y.contains(next)) {
                r.fail("chain step lost covariance at " + show(x));
                break;
            }
            if (y.equals(x)) break;
            x = y;
            ++moves;
            longest = std::max(longest, steps + 1);
            if (++steps > bound) {
                r.fail("chain from " + show(p) + " still moving after " + std::to_string(bound) + " steps");
                break;
            }
        }
    }
    r.note = std::to_string(moves) + " strict steps over " + std::to_string(chains) + " chains, longest " +
             std::to_string(longest);
    r.seconds = since(t0);
    return r;
}

SuiteResult elapse_idempotent(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"time elapse"};
    auto t0 = Clock::now();
    Rng rng(seed);
    while (r.cases < cases) {
        std::size_t n = uniform(rng, 1, 4);
        Topology t = random_topology(rng);
        Polyhedron p = Polyhedron::from_constraints(n, random_system(rng, n, uniform(rng, 1, 4), t), t);
        Polyhedron d = Polyhedron::from_constraints(n, random_system(rng, n, uniform(rng, 1, 3), t, 3), t);
        if (p.is_empty() || d.is_empty()) continue;
        ++r.cases;
        Polyhedron e = p.time_elapse(d);
        if (!e.contains(p)) r.fail(show(p) + " is not inside its elapse " + show(e));
        if (!e.time_elapse(d).equals(e)) r.fail("elapse of " + show(p) + " under " + show(d) + " is not idempotent");
        auto x = sample_point(rng, p), dv = sample_point(rng, d);
        std::vector<Rational> y(n);
        Rational tau(uniform(rng, 0, 6), uniform(rng, 1, 3));
        for (std::size_t j = 0; j < n; ++j) y[j] = x[j] + tau * dv[j];
        if (!e.contains_point(y)) r.fail("trajectory point leaves the elapse of " + show(p));
    }
    r.seconds = since(t0);
    return r;
}

SuiteResult closure_idempotent(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"topological closure"};
    auto t0 = Clock::now();
    Rng rng(seed);
    for (std::size_t i = 0; i < cases; ++i, ++r.cases) {
        std::size_t n = uniform(rng, 1, 4);
        auto cs = random_system(rng, n, uniform(rng, 1, 5), Topology::nnc);
        Polyhedron p = Polyhedron::from_constraints(n, cs, Topology::nnc);
        Polyhedron c = p.topological_closure();
        if (!c.contains(p)) r.fail("closure misses " + show(p));
        if (!c.topological_closure().equals(c)) r.fail("closure of " + show(p) + " is not idempotent");
        if (p.is_empty() != c.is_empty()) r.fail("closure changed emptiness of " + show(p));
        if (!p.is_empty()) {
            // Relaxing strict inequalities gives the closure of a nonempty set.
            std::vector<Constraint> relaxed;
            for (const auto& k : cs)
                relaxed.push_back(Constraint::make(k.coefficients(), k.rhs(), k.is_strict() ? Relation::ge : k.relation()));
            if (!c.equals(Polyhedron::from_constraints(n, relaxed, Topology::nnc)))
                r.fail("closure of " + show(p) + " is " + show(c));
        }
    }
    if (!Polyhedron::empty(2, Topology::nnc).topological_closure().is_empty()) r.fail("closure of the empty set");
    r.seconds = since(t0);
    return r;
}

SuiteResult nnc_emptiness(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"NNC emptiness"};
    auto t0 = Clock::now();
    Rng rng(seed);
    std::size_t empties = 0;
    for (std::size_t i = 0; i < cases; ++i, ++r.cases) {
        std::size_t n = uniform(rng, 1, 4);
        auto cs = random_system(rng, n, uniform(rng, 1, 6), Topology::nnc, i % 2 ? 2 : 8);
        bool got = Polyhedron::from_constraints(n, cs, Topology::nnc).is_empty();
        bool want = !fm_feasible(rows_of(cs), n);
        empties += want;
        if (got != want) r.fail(show(cs, n) + (want ? " is empty" : " is nonempty"));
    }
    if (empties == 0 || empties == cases) r.fail("emptiness instances are all of one kind");
    r.note = std::to_string(empties) + " empty";
    r.seconds = since(t0);
    return r;
}

namespace {

std::string var(Rng& rng, std::size_t vars) { return "x" + std::to_string(uniform(rng, 0, static_cast<int>(vars) - 1)); }

// Products of variables only outside loops, so values stay small.
std::string aexp(Rng& rng, std::size_t vars, bool in_loop = false) {
    switch (uniform(rng, 0, in_loop ? 6 : 7)) {
        case 0: return std::to_string(uniform(rng, 0, 5));
        case 1: return var(rng, vars);
        case 2: return var(rng, vars) + " + " + std::to_string(uniform(rng, 1, 3));
        case 3: return var(rng, vars) + " - " + std::to_string(uniform(rng, 1, 3));
        case 4: return var(rng, vars) + " + " + var(rng, vars);
        case 5: return var(rng, vars) + " - " + var(rng, vars);
        case 6: return std::to_string(uniform(rng, 2, 3)) + " * " + var(rng, vars);
        default: return var(rng, vars) + " * " + var(rng, vars);
    }
}

std::string bexp(Rng& rng, std::size_t vars, bool in_loop = false) {
    switch (uniform(rng, 0, 5)) {
        case 0: return coin(rng, 0.8) ? "true" : "false";
        case 1: return aexp(rng, vars, in_loop) + " = " + aexp(rng, vars, in_loop);
        default: return aexp(rng, vars, in_loop) + " < " + aexp(rng, vars, in_loop);
    }
}

std::string stmt(Rng& rng, std::size_t vars, int depth, bool in_loop = false) {
    int k = depth <= 0 ? uniform(rng, 0, 1) : uniform(rng, 0, 6);
    auto sub = [&](bool loop) { return stmt(rng, vars, depth - 1, in_loop || loop); };
    switch (k) {
        case 0: return coin(rng, 0.1) ? "skip" : var(rng, vars) + " := " + aexp(rng, vars, in_loop);
        case 1: return var(rng, vars) + " := " + aexp(rng, vars, in_loop);
        case 2:
        case 3: return sub(false) + "; " + sub(false);
        case 4: return "if " + bexp(rng, vars, in_loop) + " then { " + sub(false) + " } else { " + sub(false) + " }";
        case 5: {
            std::string v = var(rng, vars);
            return "while 0 < " + v + " do { " + sub(true) + "; " + v + " := " + v + " - " +
                   std::to_string(uniform(rng, 1, 2)) + " }";
        }
        default: return "while " + bexp(rng, vars, true) + " do { " + sub(true) + " }";
    }
}

}  // namespace

std::string random_program(Rng& rng, std::size_t vars) {
    std::string out = "var ";
    for (std::size_t i = 0; i < vars; ++i) out += (i ? ", x" : "x") + std::to_string(i);
    return out + ";\n" + stmt(rng, vars, uniform(rng, 1, 3)) + "\n";
}

SuiteResult analyzer_soundness(std::uint64_t seed, std::size_t programs) {
    SuiteResult r{"analyzer soundness"};
    auto t0 = Clock::now();
    Rng rng(seed);
    while (r.cases < programs) {
        std::size_t n = uniform(rng, 1, 3);
        std::string src = random_program(rng, n);
        imp::Program prog = imp::parse_program(src);
        imp::Store st(prog.vars.size());
        for (auto& v : st) v = uniform(rng, -4, 4);
        std::map<std::size_t, std::vector<imp::Store>> seen;
        auto res = imp::exec(prog, st, 400, [&](const imp::Stmt& s, const imp::Store& cur) {
            auto& v = seen[s.id];
            if (v.size() < 50) v.push_back(cur);
        });
        if (res.diverged) continue;
        ++r.cases;

        // Initial abstraction: the store itself, a box around it, or a box cut by a relation it satisfies.
        std::vector<Constraint> init;
        int mode = uniform(rng, 0, 2);
        for (std::size_t i = 0; i < st.size(); ++i) {
            IntVector a(st.size(), 0);
            a[i] = 1;
            if (mode == 0) {
                init.push_back(Constraint::make(a, st[i], Relation::eq));
            } else {
                init.push_back(Constraint::make(a, st[i] - uniform(rng, 0, 3), Relation::ge));
                IntVector b(st.size(), 0);
                b[i] = -1;
                init.push_back(Constraint::make(b, -(st[i] + uniform(rng, 0, 3)), Relation::ge));
            }
        }
        if (mode == 2 && st.size() > 1) {
            IntVector a(st.size());
            Integer s = 0;
            for (std::size_t i = 0; i < st.size(); ++i) s += (a[i] = uniform(rng, -2, 2)) * st[i];
            init.push_back(Constraint::make(a, s, Relation::ge));
        }
        Polyhedron p0 = Polyhedron::from_constraints(st.size(), init);
        AnalysisOptions o;
        if (r.cases % 3 == 0) {
            o.domain = DomainKind::powerset;
            o.cap = uniform(rng, 1, 4);
        }
        o.delay = uniform(rng, 0, 2);
        auto as_q = [](const imp::Store& s) { return std::vector<Rational>(s.begin(), s.end()); };
        try {
            AnalysisResult a = analyze(prog, p0, o);
            if (!a.exit.contains_point(as_q(res.store))) r.fail("exit store escapes the analysis of\n" + src);
            for (const auto& [id, stores] : seen) {
                auto it = a.loop_heads.find(id);
                if (it == a.loop_heads.end()) {
                    r.fail("no loop-head invariant for statement " + std::to_string(id));
                    continue;
                }
                for (const auto& s : stores)
                    if (!it->second.contains_point(as_q(s))) {
                        r.fail("loop-head store escapes the invariant of statement " + std::to_string(id) + " in\n" + src);
                        break;
                    }
            }
        } catch (const std::exception& e) {
            r.fail(std::string(e.what()) + " on\n" + src);
        }
    }
    r.seconds = since(t0);
    return r;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Polyhedron parse_poly(const std::string& text, const std::vector<std::string>& names) {
    auto cs = parse_constraints(text, names);
    bool strict = std::any_of(cs.begin(), cs.end(), [](const Constraint& c) { return c.is_strict(); });
    return Polyhedron::from_constraints(names.size(), cs, strict ? Topology::nnc : Topology::closed);
}

namespace {

Polyhedron as_nnc(const Polyhedron& p) { return p.with_topology(Topology::nnc); }

Polyhedron point_poly(const std::vector<Rational>& x) {
    std::vector<Generator> g{Generator::point(x)};
    return Polyhedron::from_generators(x.size(), g, Topology::nnc);
}

std::vector<Rational> along(const std::vector<Rational>& x, const std::vector<Rational>& d, const Rational& t) {
    std::vector<Rational> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = x[i] + t * d[i];
        y[i].canonicalize();
    }
    return y;
}

std::string show_state(const HybridAutomaton& h, std::size_t loc, const std::vector<Rational>& x) {
    std::string s = h.locations[loc].name + " (";
    for (std::size_t i = 0; i < x.size(); ++i) s += (i ? ", " : "") + h.vars[i] + "=" + x[i].get_str();
    return s + ")";
}

}  // namespace

bool jump_allowed(const HybridAutomaton& h, std::size_t from, std::size_t to, const std::vector<Rational>& x,
                  const std::vector<Rational>& y, const std::string& label) {
    std::vector<Rational> xy = x;
    xy.insert(xy.end(), y.begin(), y.end());
    if (!h.locations[to].inv.contains_point(y)) return false;
    for (const auto& t : h.transitions)
        if (t.source == from && t.target == to && (label.empty() || t.label == label) && t.rel.contains_point(xy))
            return true;
    return false;
}

bool flow_allowed(const HybridAutomaton& h, std::size_t loc, const std::vector<Rational>& x,
                  const std::vector<Rational>& d, const Rational& t) {
    const Location& l = h.locations[loc];
    return t >= 0 && l.act.contains_point(d) && l.inv.contains_point(x) &&
           l.inv.topological_closure().contains_point(along(x, d, t));
}

SuiteResult simulate_runs(const HybridAutomaton& h, const std::vector<PolySet>& regions, std::uint64_t seed,
                          std::size_t runs, std::size_t steps) {
    SuiteResult r{"simulation of " + h.name};
    auto t0 = Clock::now();
    Rng rng(seed);
    const std::size_t n = h.dimension();
    std::vector<std::size_t> starts;
    std::vector<Polyhedron> start_set;
    for (std::size_t l = 0; l < h.locations.size(); ++l) {
        Polyhedron s = as_nnc(h.locations[l].init).intersection(as_nnc(h.locations[l].inv));
        if (!s.is_empty()) {
            starts.push_back(l);
            start_set.push_back(s);
        }
    }
    if (starts.empty()) {
        r.fail("no initial state");
        return r;
    }
    std::vector<std::size_t> unprimed(n);
    for (std::size_t i = 0; i < n; ++i) unprimed[i] = n + i;
    std::vector<std::vector<Constraint>> guards;
    for (const auto& t : h.transitions) guards.push_back(t.rel.remove_dimensions(unprimed).minimized_constraints());

    std::size_t jumps = 0;
    for (std::size_t run = 0; run < runs; ++run, ++r.cases) {
        std::size_t k = uniform(rng, 0, static_cast<int>(starts.size()) - 1);
        std::size_t loc = starts[k];
        std::vector<Rational> x = sample_point(rng, start_set[k]);
        auto check = [&](const std::vector<Rational>& v, const char* what) {
            if (regions[loc].contains_point(v)) return true;
            // A dwell may end on the boundary of a strict invariant; only the limit is reached.
            if (!h.locations[loc].inv.contains_point(v) &&
                regions[loc].lift([](const Polyhedron& p) { return p.topological_closure(); }).contains_point(v))
                return true;
            r.fail(std::string(what) + " state " + show_state(h, loc, v) + " is outside its region");
            return false;
        };
        if (!check(x, "initial")) continue;
        for (std::size_t step = 0; step < steps; ++step) {
            const Location& l = h.locations[loc];
            std::vector<Rational> d = sample_point(rng, as_nnc(l.act));
            if (!d.empty()) {
                std::vector<Rational> cand{0, Rational(1, 2), 1, 3};
                for (std::size_t ti = 0; ti < h.transitions.size(); ++ti) {
                    if (h.transitions[ti].source != loc) continue;
                    for (const auto& c : guards[ti]) {
                        Rational ax = 0, ad = 0;
                        for (std::size_t i = 0; i < n; ++i) {
                            ax += c.coefficients()[i] * x[i];
                            ad += c.coefficients()[i] * d[i];
                        }
                        if (ad == 0) continue;
                        Rational t = (c.rhs() - ax) / ad;
                        if (t > 0) cand.push_back(t);
                    }
                }
                std::vector<Rational> ok;
                for (const auto& t : cand)
                    if (flow_allowed(h, loc, x, d, t)) ok.push_back(t);
                if (!ok.empty()) {
                    Rational t = ok[uniform(rng, 0, static_cast<int>(ok.size()) - 1)];
                    if (!check(along(x, d, t / 2), "flowing")) break;
                    x = along(x, d, t);
                    if (!check(x, "dwell")) break;
                }
            }
            std::vector<std::pair<std::size_t, Polyhedron>> enabled;
            Polyhedron here = point_poly(x);
            for (const auto& t : h.transitions) {
                if (t.source != loc) continue;
                Polyhedron post = here.relation_image(as_nnc(t.rel)).intersection(as_nnc(h.locations[t.target].inv));
                if (!post.is_empty()) enabled.emplace_back(t.target, post);
            }
            if (enabled.empty()) break;
            auto& [to, post] = enabled[uniform(rng, 0, static_cast<int>(enabled.size()) - 1)];
            std::vector<Rational> y = sample_point(rng, post);
            if (!jump_allowed(h, loc, to, x, y)) {
                r.fail("sampled jump is not a transition from " + show_state(h, loc, x));
                break;
            }
            loc = to;
            x = y;
            ++jumps;
            if (!check(x, "post-jump")) break;
        }
    }
    if (jumps == 0) r.fail("no run took a transition");
    r.note = std::to_string(jumps) + " jumps";
    r.seconds = since(t0);
    return r;
}

}  // namespace polyan::testing
