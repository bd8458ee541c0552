#include "polyan/calc.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "polyan/polyhedron.hpp"
#include "polyan/text.hpp"

namespace polyan {

namespace {

struct Value {
    std::optional<Polyhedron> poly;
    bool truth = false;
};

std::string render_generator(const Generator& g) {
    std::string out = g.is_point() ? "point (" : g.is_ray() ? "ray (" : "closure_point (";
    if (g.is_ray()) {
        for (std::size_t i = 0; i < g.dimension(); ++i) out += (i ? ", " : "") + g.coefficients()[i].get_str();
    } else {
        auto c = g.coordinates();
        for (std::size_t i = 0; i < c.size(); ++i) out += (i ? ", " : "") + c[i].get_str();
    }
    return out + ")";
}

class Calculator {
public:
    Calculator(std::string_view src, std::ostream& out) : src_(src), s_(src), out_(out) {}

    void run() {
        while (!s_.at_end()) {
            statement();
            s_.accept(";");
        }
    }

private:
    void statement() {
        SourcePos p = s_.pos();
        if (s_.accept("print")) {
            Value v = expr();
            if (v.poly)
                out_ << render(fit(*v.poly), names_) << "\n";
            else
                out_ << (v.truth ? "true\n" : "false\n");
            return;
        }
        if (s_.accept("gens")) {
            Polyhedron q = fit(poly_expr());
            out_ << "{";
            bool first = true;
            for (const auto& g : q.minimized_generators()) {
                out_ << (first ? "" : ", ") << render_generator(g);
                first = false;
            }
            out_ << "}\n";
            return;
        }
        auto id = s_.ident();
        if (!id) s_.fail("expected print, gens or an assignment");
        if (!s_.accept("=")) s_.fail_at(p, "expected '=' after " + *id);
        Value v = expr();
        if (!v.poly) s_.fail_at(p, "only polyhedra can be stored");
        vars_.insert_or_assign(*id, *v.poly);
    }

    // Brings p up to the current number of names.
    Polyhedron fit(const Polyhedron& p) const {
        return p.dimension() < names_.size() ? p.add_dimensions(names_.size() - p.dimension()) : p;
    }

    std::pair<Polyhedron, Polyhedron> same_space(const Polyhedron& a, const Polyhedron& b) const {
        Polyhedron x = fit(a), y = fit(b);
        if (x.is_nnc() != y.is_nnc()) {
            x = x.with_topology(Topology::nnc);
            y = y.with_topology(Topology::nnc);
        }
        return {x, y};
    }

    std::size_t name_index(const std::string& n) {
        auto it = std::find(names_.begin(), names_.end(), n);
        if (it != names_.end()) return static_cast<std::size_t>(it - names_.begin());
        names_.push_back(n);
        return names_.size() - 1;
    }

    // Registers the identifiers of the literal ending at the matching brace.
    void register_names(bool rates) {
        std::size_t i = s_.offset();
        while (i < src_.size() && src_[i] != '}') {
            char c = src_[i];
            if (c == '#') {
                while (i < src_.size() && src_[i] != '\n') ++i;
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t j = i;
                while (j < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_')) ++j;
                std::string w(src_.substr(i, j - i));
                if (rates) {
                    if (w.size() < 2 || w[0] != 'd') s_.fail("rate names are written d<variable>, got '" + w + "'");
                    w = w.substr(1);
                }
                name_index(w);
                i = j;
            } else {
                ++i;
            }
        }
    }

    Polyhedron literal(bool rates) {
        register_names(rates);
        std::vector<Constraint> cs;
        if (!s_.accept("}")) {
            NameResolver r = [&](std::string_view w) -> std::optional<std::size_t> {
                std::string n(w);
                if (rates) n = n.substr(1);
                auto it = std::find(names_.begin(), names_.end(), n);
                if (it == names_.end()) return std::nullopt;
                return static_cast<std::size_t>(it - names_.begin());
            };
            cs = parse_constraint_list(s_, names_.size(), r);
            s_.expect("}");
        }
        bool strict = std::any_of(cs.begin(), cs.end(), [](const Constraint& c) { return c.is_strict(); });
        return Polyhedron::from_constraints(names_.size(), cs, strict ? Topology::nnc : Topology::closed);
    }

    Polyhedron poly_expr(bool rates = false) {
        SourcePos p = s_.pos();
        Value v = expr(rates);
        if (!v.poly) s_.fail_at(p, "expected a polyhedron");
        return *v.poly;
    }

    std::size_t variable_arg() {
        SourcePos p = s_.pos();
        auto id = s_.ident();
        if (!id) s_.fail("expected a variable name");
        auto it = std::find(names_.begin(), names_.end(), *id);
        if (it == names_.end()) s_.fail_at(p, "unknown variable '" + *id + "'");
        return static_cast<std::size_t>(it - names_.begin());
    }

    Value expr(bool rates = false) {
        if (s_.accept("{")) return {literal(rates)};
        SourcePos p = s_.pos();
        auto id = s_.ident();
        if (!id) s_.fail("expected a polyhedron");
        if (!s_.accept("(")) {
            auto it = vars_.find(*id);
            if (it == vars_.end()) s_.fail_at(p, "undefined name '" + *id + "'");
            return {it->second};
        }
        const std::string& f = *id;
        Value out;
        if (f == "hull" || f == "meet" || f == "widen" || f == "contains" || f == "equals") {
            Polyhedron a = poly_expr();
            s_.expect(",");
            Polyhedron b = poly_expr();
            auto [x, y] = same_space(a, b);
            if (f == "hull") out.poly = x.poly_hull(y);
            if (f == "meet") out.poly = x.intersection(y);
            if (f == "widen") out.poly = x.standard_widening(y);
            if (f == "contains") out.truth = x.contains(y);
            if (f == "equals") out.truth = x.equals(y);
        } else if (f == "elapse") {
            Polyhedron a = poly_expr();
            s_.expect(",");
            Polyhedron b = poly_expr(true);
            auto [x, y] = same_space(a, b);
            out.poly = x.time_elapse(y);
        } else if (f == "closure" || f == "isempty" || f == "isuniverse") {
            Polyhedron a = fit(poly_expr());
            if (f == "closure") out.poly = a.topological_closure();
            if (f == "isempty") out.truth = a.is_empty();
            if (f == "isuniverse") out.truth = a.is_universe();
        } else if (f == "image" || f == "preimage") {
            Polyhedron a = fit(poly_expr());
            s_.expect(",");
            std::size_t k = variable_arg();
            s_.expect(",");
            LinExpr e = parse_linexpr(s_, names_.size(), resolver_for(names_));
            out.poly = f == "image" ? a.affine_image(k, e) : a.affine_preimage(k, e);
        } else if (f == "project") {
            Polyhedron a = fit(poly_expr());
            std::vector<std::size_t> keep;
            while (s_.accept(",")) keep.push_back(variable_arg());
            std::sort(keep.begin(), keep.end());
            keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
            std::vector<std::size_t> drop;
            for (std::size_t i = 0; i < names_.size(); ++i)
                if (!std::binary_search(keep.begin(), keep.end(), i)) drop.push_back(i);
            out.poly = spread(fit(a.remove_dimensions(drop)), keep);
        } else {
            s_.fail_at(p, "unknown function '" + f + "'");
        }
        s_.expect(")");
        return out;
    }

    // p constrains its first keep.size() dimensions; moves them back to the
    // positions listed in keep (sorted).
    Polyhedron spread(const Polyhedron& p, const std::vector<std::size_t>& keep) const {
        std::vector<std::size_t> perm(p.dimension());
        std::vector<bool> used(p.dimension(), false);
        for (std::size_t i = 0; i < keep.size(); ++i) {
            perm[i] = keep[i];
            used[keep[i]] = true;
        }
        std::size_t next = 0;
        for (std::size_t i = keep.size(); i < p.dimension(); ++i) {
            while (used[next]) ++next;
            perm[i] = next++;
        }
        return p.map_dimensions(perm);
    }

    std::string_view src_;
    Scanner s_;
    std::vector<std::string> names_;
    std::map<std::string, Polyhedron> vars_;
    std::ostream& out_;
};

}  // namespace

void run_calculator(std::string_view script, std::ostream& out) { Calculator(script, out).run(); }

std::string run_calculator(std::string_view script) {
    std::ostringstream out;
    run_calculator(script, out);
    return out.str();
}

}  // namespace polyan
