#include "polyan/hybrid.hpp"

#include <algorithm>
#include <functional>
#include <future>
#include <set>

#include "polyan/text.hpp"

namespace polyan {

std::optional<std::size_t> HybridAutomaton::find_location(std::string_view n) const {
    for (std::size_t i = 0; i < locations.size(); ++i)
        if (locations[i].name == n) return i;
    return std::nullopt;
}

namespace {

struct NameRef {
    std::string name;
    SourcePos pos;
};

struct PendingTransition {
    NameRef source, target;
    std::optional<std::string> label;
    Polyhedron rel;
};

struct Component {
    HybridAutomaton h;
    std::vector<PendingTransition> pending;
    std::vector<NameRef> widen;
    bool widen_given = false;
    bool have_vars = false;
};

struct ParsedFile {
    std::vector<HybridAutomaton> comps;
    std::vector<NameRef> top_widen;
    bool top_widen_given = false;
};

std::vector<std::string> renamed(const std::vector<std::string>& vars, const std::string& prefix,
                                 const std::string& suffix) {
    std::vector<std::string> out;
    for (const auto& v : vars) out.push_back(prefix + v + suffix);
    return out;
}

std::vector<Constraint> section(Scanner& s, std::size_t dim, const std::vector<std::string>& names) {
    std::vector<Constraint> cs;
    if (!s.accept("true")) cs = parse_constraint_list(s, dim, resolver_for(names));
    s.expect(";");
    return cs;
}

std::vector<NameRef> name_list(Scanner& s) {
    std::vector<NameRef> out;
    do {
        SourcePos p = s.pos();
        auto id = s.ident();
        if (!id) s.fail("expected a name");
        out.push_back({*id, p});
    } while (s.accept(","));
    s.expect(";");
    return out;
}

// `widen: l1, l2;` or `widen: none;` after the keyword.
void widen_directive(Scanner& s, std::vector<NameRef>& into, bool& given) {
    s.expect(":");
    given = true;
    if (s.accept("none")) {
        s.expect(";");
        return;
    }
    auto w = name_list(s);
    into.insert(into.end(), w.begin(), w.end());
}

void parse_location(Scanner& s, Component& c) {
    const auto& vars = c.h.vars;
    const std::size_t n = vars.size();
    SourcePos p = s.pos();
    auto name = s.ident();
    if (!name) s.fail("expected a location name");
    if (c.h.find_location(*name)) s.fail_at(p, "duplicate location '" + *name + "'");
    Location loc{*name, Polyhedron::empty(n, Topology::nnc), Polyhedron::universe(n, Topology::nnc),
                 Polyhedron::universe(n, Topology::nnc)};
    std::vector<Constraint> rates;
    s.expect("{");
    while (!s.accept("}")) {
        if (s.accept("invariant")) {
            s.expect(":");
            auto cs = section(s, n, vars);
            loc.inv = Polyhedron::from_constraints(n, cs, Topology::nnc);
        } else if (s.accept("init")) {
            s.expect(":");
            auto cs = section(s, n, vars);
            loc.init = Polyhedron::from_constraints(n, cs, Topology::nnc);
        } else if (s.accept("rate")) {
            s.expect(":");
            rates = section(s, n, renamed(vars, "d", ""));
        } else {
            s.fail("expected invariant, rate or init");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        bool used = std::any_of(rates.begin(), rates.end(), [&](const Constraint& k) { return k.coefficient(i) != 0; });
        if (!used) rates.push_back(Constraint::from_expr(LinExpr::variable(i, n), RelOp::eq));
    }
    loc.act = Polyhedron::from_constraints(n, rates, Topology::nnc);
    c.h.locations.push_back(std::move(loc));
}

void parse_transition(Scanner& s, Component& c) {
    const auto& vars = c.h.vars;
    const std::size_t n = vars.size();
    PendingTransition t;
    t.source.pos = s.pos();
    auto src = s.ident();
    if (!src) s.fail("expected a source location");
    t.source.name = *src;
    s.expect("->");
    t.target.pos = s.pos();
    auto dst = s.ident();
    if (!dst) s.fail("expected a target location");
    t.target.name = *dst;
    if (s.accept("sync")) {
        auto l = s.ident();
        if (!l) s.fail("expected a label");
        t.label = *l;
        if (std::find(c.h.labels.begin(), c.h.labels.end(), *l) == c.h.labels.end()) c.h.labels.push_back(*l);
    }
    std::vector<std::string> names = vars;
    auto primed = renamed(vars, "", "'");
    names.insert(names.end(), primed.begin(), primed.end());
    std::vector<Constraint> cs;
    s.expect("{");
    while (!s.accept("}")) {
        if (s.accept("guard")) {
            s.expect(":");
            SourcePos gp = s.pos();
            auto g = section(s, 2 * n, names);
            for (const auto& k : g)
                for (std::size_t i = n; i < 2 * n; ++i)
                    if (k.coefficient(i) != 0) s.fail_at(gp, "guard mentions target value " + names[i]);
            cs.insert(cs.end(), g.begin(), g.end());
        } else if (s.accept("update")) {
            s.expect(":");
            auto u = section(s, 2 * n, names);
            cs.insert(cs.end(), u.begin(), u.end());
        } else {
            s.fail("expected guard or update");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        bool used = std::any_of(cs.begin(), cs.end(), [&](const Constraint& k) { return k.coefficient(n + i) != 0; });
        if (!used)
            cs.push_back(Constraint::from_expr(LinExpr::variable(n + i, 2 * n) - LinExpr::variable(i, 2 * n), RelOp::eq));
    }
    t.rel = Polyhedron::from_constraints(2 * n, cs, Topology::nnc);
    c.pending.push_back(std::move(t));
}

// Items of one automaton, up to `}` when braced or the end of input otherwise.
void parse_body(Scanner& s, Component& c, bool braced) {
    for (;;) {
        if (braced ? s.accept("}") : s.at_end()) break;
        if (s.accept("vars")) {
            if (c.have_vars) s.fail("variables already declared");
            if (!c.h.locations.empty()) s.fail("vars must precede the locations");
            std::set<std::string> seen;
            for (auto& r : name_list(s)) {
                if (!seen.insert(r.name).second) s.fail_at(r.pos, "duplicate variable '" + r.name + "'");
                c.h.vars.push_back(r.name);
            }
            c.have_vars = true;
        } else if (s.accept("label")) {
            for (auto& r : name_list(s))
                if (std::find(c.h.labels.begin(), c.h.labels.end(), r.name) == c.h.labels.end())
                    c.h.labels.push_back(r.name);
        } else if (s.accept("location")) {
            parse_location(s, c);
        } else if (s.accept("transition")) {
            parse_transition(s, c);
        } else if (s.accept("widen")) {
            widen_directive(s, c.widen, c.widen_given);
        } else {
            s.fail("unexpected '" + s.peek_text() + "'");
        }
    }
}

std::size_t resolve(Scanner& s, const HybridAutomaton& h, const NameRef& r) {
    auto i = h.find_location(r.name);
    if (!i) s.fail_at(r.pos, "unknown location '" + r.name + "'");
    return *i;
}

HybridAutomaton finish(Scanner& s, Component& c, SourcePos where) {
    HybridAutomaton& h = c.h;
    if (h.locations.empty()) s.fail_at(where, "automaton has no locations");
    for (auto& t : c.pending)
        h.transitions.push_back({resolve(s, h, t.source), resolve(s, h, t.target), t.label, t.rel});
    for (auto& w : c.widen) {
        std::size_t i = resolve(s, h, w);
        if (std::find(h.widen_at.begin(), h.widen_at.end(), i) == h.widen_at.end()) h.widen_at.push_back(i);
    }
    h.widen_given = c.widen_given;
    for (const auto& l : h.locations)
        if (!l.inv.contains(l.init)) h.warnings.push_back("init of " + l.name + " is not inside its invariant");
    return std::move(h);
}

ParsedFile parse_file(std::string_view text) {
    Scanner s(text);
    ParsedFile out;
    s.skip_space();
    if (s.peek_is("automaton")) {
        while (s.accept("automaton")) {
            SourcePos p = s.pos();
            auto name = s.ident();
            if (!name) s.fail("expected an automaton name");
            Component c;
            c.h.name = *name;
            s.expect("{");
            parse_body(s, c, true);
            out.comps.push_back(finish(s, c, p));
        }
        while (!s.at_end()) {
            if (!s.accept("widen")) s.fail("expected an automaton block or widen directive");
            widen_directive(s, out.top_widen, out.top_widen_given);
        }
    } else {
        Component c;
        SourcePos p = s.pos();
        parse_body(s, c, false);
        out.comps.push_back(finish(s, c, p));
    }
    return out;
}

// Interleaves (x, x', y, y') into (x, y, x', y').
Polyhedron interleave(const Polyhedron& joint, std::size_t n1, std::size_t n2) {
    const std::size_t n = n1 + n2;
    std::vector<std::size_t> perm(2 * n);
    for (std::size_t i = 0; i < n1; ++i) {
        perm[i] = i;
        perm[n1 + i] = n + i;
    }
    for (std::size_t j = 0; j < n2; ++j) {
        perm[2 * n1 + j] = n1 + j;
        perm[2 * n1 + n2 + j] = n + n1 + j;
    }
    return joint.map_dimensions(perm);
}

Polyhedron identity_relation(std::size_t n) {
    std::vector<Constraint> cs;
    for (std::size_t i = 0; i < n; ++i)
        cs.push_back(Constraint::from_expr(LinExpr::variable(n + i, 2 * n) - LinExpr::variable(i, 2 * n), RelOp::eq));
    return Polyhedron::from_constraints(2 * n, cs, Topology::nnc);
}

bool has(const std::vector<std::string>& v, const std::string& x) { return std::find(v.begin(), v.end(), x) != v.end(); }

}  // namespace

std::vector<HybridAutomaton> parse_components(std::string_view text) { return parse_file(text).comps; }

HybridAutomaton parse_automaton(std::string_view text) {
    ParsedFile f = parse_file(text);
    HybridAutomaton h = f.comps.front();
    for (std::size_t i = 1; i < f.comps.size(); ++i) h = parallel_compose(h, f.comps[i]);
    if (f.top_widen_given) {
        Scanner s(text);
        h.widen_at.clear();
        for (const auto& w : f.top_widen) {
            auto i = h.find_location(w.name);
            if (!i) s.fail_at(w.pos, "unknown location '" + w.name + "'");
            if (std::find(h.widen_at.begin(), h.widen_at.end(), *i) == h.widen_at.end()) h.widen_at.push_back(*i);
        }
        h.widen_given = true;
    }
    return h;
}

HybridAutomaton parallel_compose(const HybridAutomaton& a, const HybridAutomaton& b) {
    for (const auto& v : a.vars)
        if (has(b.vars, v)) throw HybridError("parallel composition: variable '" + v + "' occurs in both components");
    const std::size_t n1 = a.dimension(), n2 = b.dimension(), m2 = b.locations.size();
    HybridAutomaton h;
    h.name = a.name.empty() || b.name.empty() ? a.name + b.name : a.name + "." + b.name;
    h.vars = a.vars;
    h.vars.insert(h.vars.end(), b.vars.begin(), b.vars.end());
    h.labels = a.labels;
    for (const auto& l : b.labels)
        if (!has(h.labels, l)) h.labels.push_back(l);
    auto idx = [&](std::size_t i, std::size_t j) { return i * m2 + j; };
    for (const auto& la : a.locations)
        for (const auto& lb : b.locations) {
            std::string name;
            if (a.locations.size() == 1 && b.locations.size() > 1)
                name = lb.name;
            else if (b.locations.size() == 1)
                name = la.name;
            else
                name = la.name + "." + lb.name;
            h.locations.push_back({name, la.init.concatenate(lb.init), la.act.concatenate(lb.act), la.inv.concatenate(lb.inv)});
        }
    std::vector<std::string> shared;
    for (const auto& l : a.labels)
        if (has(b.labels, l)) shared.push_back(l);
    auto is_shared = [&](const Transition& t) { return t.label && has(shared, *t.label); };
    Polyhedron id1 = identity_relation(n1), id2 = identity_relation(n2);
    for (const auto& t : a.transitions) {
        if (is_shared(t)) continue;
        Polyhedron rel = interleave(t.rel.concatenate(id2), n1, n2);
        for (std::size_t j = 0; j < m2; ++j) h.transitions.push_back({idx(t.source, j), idx(t.target, j), t.label, rel});
    }
    for (const auto& t : b.transitions) {
        if (is_shared(t)) continue;
        Polyhedron rel = interleave(id1.concatenate(t.rel), n1, n2);
        for (std::size_t i = 0; i < a.locations.size(); ++i)
            h.transitions.push_back({idx(i, t.source), idx(i, t.target), t.label, rel});
    }
    for (const auto& ta : a.transitions) {
        if (!is_shared(ta)) continue;
        for (const auto& tb : b.transitions) {
            if (tb.label != ta.label) continue;
            h.transitions.push_back(
                {idx(ta.source, tb.source), idx(ta.target, tb.target), ta.label, interleave(ta.rel.concatenate(tb.rel), n1, n2)});
        }
    }
    if (a.widen_given || b.widen_given) {
        for (std::size_t i = 0; i < a.locations.size(); ++i)
            for (std::size_t j = 0; j < m2; ++j) {
                bool wa = std::find(a.widen_at.begin(), a.widen_at.end(), i) != a.widen_at.end();
                bool wb = std::find(b.widen_at.begin(), b.widen_at.end(), j) != b.widen_at.end();
                if (wa || wb) h.widen_at.push_back(idx(i, j));
            }
        h.widen_given = true;
    }
    h.warnings = a.warnings;
    h.warnings.insert(h.warnings.end(), b.warnings.begin(), b.warnings.end());
    return h;
}

namespace {

std::vector<std::vector<std::size_t>> successors(const HybridAutomaton& h) {
    std::vector<std::vector<std::size_t>> next(h.locations.size());
    for (const auto& t : h.transitions) next[t.source].push_back(t.target);
    return next;
}

// Back-edge targets of a depth-first search over the locations not in `skip`.
std::vector<std::size_t> back_edge_targets(const HybridAutomaton& h, const std::vector<bool>& skip) {
    const std::size_t m = h.locations.size();
    auto next = successors(h);
    enum { white, grey, black };
    std::vector<int> colour(m, white);
    std::set<std::size_t> found;
    std::function<void(std::size_t)> visit = [&](std::size_t u) {
        colour[u] = grey;
        for (auto v : next[u]) {
            if (skip[v]) continue;
            if (colour[v] == grey)
                found.insert(v);
            else if (colour[v] == white)
                visit(v);
        }
        colour[u] = black;
    };
    for (std::size_t i = 0; i < m; ++i)
        if (!skip[i] && colour[i] == white && !h.locations[i].init.is_empty()) visit(i);
    for (std::size_t i = 0; i < m; ++i)
        if (!skip[i] && colour[i] == white) visit(i);
    return {found.begin(), found.end()};
}

std::vector<bool> mask(std::size_t m, const std::vector<std::size_t>& w) {
    std::vector<bool> out(m, false);
    for (auto i : w) out.at(i) = true;
    return out;
}

}  // namespace

bool is_cutset(const HybridAutomaton& h, const std::vector<std::size_t>& w) {
    return back_edge_targets(h, mask(h.locations.size(), w)).empty();
}

std::vector<std::size_t> default_cutset(const HybridAutomaton& h) {
    return back_edge_targets(h, std::vector<bool>(h.locations.size(), false));
}

std::vector<std::size_t> widening_locations(const HybridAutomaton& h, std::vector<std::string>* warnings) {
    if (!h.widen_given) return default_cutset(h);
    if (warnings)
        for (auto i : back_edge_targets(h, mask(h.locations.size(), h.widen_at)))
            warnings->push_back("widen directive leaves a cycle through " + h.locations[i].name + " without widening");
    return h.widen_at;
}

PolySet location_update(const HybridAutomaton& h, std::size_t loc, const std::vector<PolySet>& current,
                        DomainKind domain) {
    const std::size_t n = h.dimension();
    const Location& l = h.locations.at(loc);
    std::vector<Polyhedron> parts;
    if (!l.init.is_empty()) parts.push_back(l.init);
    for (const auto& t : h.transitions) {
        if (t.target != loc) continue;
        const Polyhedron& act = h.locations[t.source].act;
        for (const auto& r : current.at(t.source).elements()) {
            Polyhedron flowed = r.topological_closure().intersection(r.time_elapse(act));
            Polyhedron img = flowed.relation_image(t.rel);
            if (!img.is_empty()) parts.push_back(std::move(img));
        }
    }
    if (domain == DomainKind::poly) {
        Polyhedron hull = Polyhedron::empty(n, Topology::nnc);
        for (const auto& p : parts) hull = hull.poly_hull(p);
        parts = {hull};
    }
    std::vector<Polyhedron> out;
    for (const auto& p : parts) out.push_back(p.intersection(l.inv).time_elapse(l.act).intersection(l.inv));
    return PolySet::reduce(n, Topology::nnc, std::move(out));
}

namespace {

bool below(const PolySet& a, const PolySet& b, DomainKind d) {
    if (d == DomainKind::poly) return b.collapse().contains(a.collapse());
    return a.entails(b);
}

PolySet widen_step(const PolySet& old, const PolySet& f, const ReachOptions& o, std::size_t done) {
    if (o.domain == DomainKind::poly || done >= o.powerset_widenings) {
        Polyhedron p = old.collapse();
        return PolySet(p.standard_widening(p.poly_hull(f.collapse())));
    }
    return old.widening(old.join(f), o.cap);
}

}  // namespace

ReachResult reach(const HybridAutomaton& h, const ReachOptions& opts) {
    if (opts.cap == 0) throw std::invalid_argument("powerset cap must be at least 1");
    const std::size_t m = h.locations.size(), n = h.dimension();
    ReachResult r;
    r.warnings = h.warnings;
    r.widen_at = widening_locations(h, &r.warnings);
    std::vector<bool> at_w = mask(m, r.widen_at);
    r.regions.assign(m, PolySet(n, Topology::nnc));
    std::vector<std::size_t> widened(m, 0);
    for (std::size_t sweep = 1; sweep <= opts.max_iter; ++sweep) {
        r.sweeps = sweep;
        bool changed = false;
        std::vector<PolySet> fresh;
        if (opts.schedule == Schedule::jacobi) {
            const std::vector<PolySet> prev = r.regions;
            fresh.resize(m);
            if (opts.parallel) {
                std::vector<std::future<PolySet>> jobs;
                for (std::size_t l = 0; l < m; ++l)
                    jobs.push_back(std::async(std::launch::async, [&, l] { return location_update(h, l, prev, opts.domain); }));
                for (std::size_t l = 0; l < m; ++l) fresh[l] = jobs[l].get();
            } else {
                for (std::size_t l = 0; l < m; ++l) fresh[l] = location_update(h, l, prev, opts.domain);
            }
        }
        for (std::size_t l = 0; l < m; ++l) {
            PolySet f = opts.schedule == Schedule::jacobi ? fresh[l] : location_update(h, l, r.regions, opts.domain);
            const PolySet& old = r.regions[l];
            PolySet next = at_w[l] && sweep > opts.delay ? widen_step(old, f, opts, widened[l]++) : f;
            if (!(below(next, old, opts.domain) && below(old, next, opts.domain))) changed = true;
            r.regions[l] = std::move(next);
        }
        if (!changed) {
            r.converged = true;
            break;
        }
        r.iterations = sweep;
    }
    if (r.converged) {
        r.post_fixpoint = true;
        for (std::size_t l = 0; l < m && r.post_fixpoint; ++l)
            if (!below(location_update(h, l, r.regions, opts.domain), r.regions[l], opts.domain)) r.post_fixpoint = false;
    }
    return r;
}

}  // namespace polyan
