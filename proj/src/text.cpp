#include "polyan/text.hpp"

#include <algorithm>
#include <cctype>
#include <tuple>

namespace polyan {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

void Scanner::advance() {
    if (src_[i_] == '\n') {
        ++at_.line;
        at_.col = 1;
    } else {
        ++at_.col;
    }
    ++i_;
}

void Scanner::skip_space() {
    while (i_ < src_.size()) {
        char c = src_[i_];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance();
        } else if (c == '#') {
            while (i_ < src_.size() && src_[i_] != '\n') advance();
        } else {
            break;
        }
    }
}

bool Scanner::at_end() {
    skip_space();
    return i_ >= src_.size();
}

SourcePos Scanner::pos() {
    skip_space();
    return at_;
}

bool Scanner::peek_is(std::string_view tok) {
    skip_space();
    if (src_.substr(i_, tok.size()) != tok) return false;
    if (ident_char(tok.back()) && i_ + tok.size() < src_.size() && ident_char(src_[i_ + tok.size()])) return false;
    return true;
}

bool Scanner::accept(std::string_view tok) {
    if (!peek_is(tok)) return false;
    for (std::size_t k = 0; k < tok.size(); ++k) advance();
    return true;
}

void Scanner::expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
}

std::optional<std::string> Scanner::ident() {
    skip_space();
    if (i_ >= src_.size() || !ident_start(src_[i_])) return std::nullopt;
    std::size_t start = i_;
    while (i_ < src_.size() && ident_char(src_[i_])) advance();
    if (i_ < src_.size() && src_[i_] == '\'') advance();
    return std::string(src_.substr(start, i_ - start));
}

std::optional<Integer> Scanner::integer() {
    skip_space();
    if (i_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[i_]))) return std::nullopt;
    std::size_t start = i_;
    while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) advance();
    return Integer(std::string(src_.substr(start, i_ - start)));
}

std::string Scanner::peek_text(std::size_t n) {
    skip_space();
    std::string t(src_.substr(i_, n));
    auto nl = t.find('\n');
    if (nl != std::string::npos) t.resize(nl);
    return t;
}

void Scanner::fail(const std::string& msg) { fail_at(pos(), msg); }

void Scanner::fail_at(SourcePos p, const std::string& msg) { throw ParseError(p.line, p.col, msg); }

NameResolver resolver_for(const std::vector<std::string>& names) {
    return [names](std::string_view id) -> std::optional<std::size_t> {
        auto it = std::find(names.begin(), names.end(), id);
        if (it == names.end()) return std::nullopt;
        return static_cast<std::size_t>(it - names.begin());
    };
}

LinExpr parse_linexpr(Scanner& s, std::size_t dim, const NameResolver& names) {
    LinExpr e(dim);
    Rational sign = 1;
    if (s.accept("-"))
        sign = -1;
    else
        s.accept("+");
    auto variable = [&](SourcePos p, const std::string& id) {
        auto idx = names(id);
        if (!idx) s.fail_at(p, "unknown variable '" + id + "'");
        return *idx;
    };
    for (;;) {
        SourcePos p = s.pos();
        if (auto k = s.integer()) {
            Rational q(*k);
            if (s.accept("*")) {
                SourcePos vp = s.pos();
                auto id = s.ident();
                if (!id) s.fail("expected variable after '*'");
                std::size_t i = variable(vp, *id);
                e.set_coefficient(i, e.coefficient(i) + sign * q);
            } else {
                e.set_constant(e.constant() + sign * q);
            }
        } else if (auto id = s.ident()) {
            std::size_t i = variable(p, *id);
            e.set_coefficient(i, e.coefficient(i) + sign);
        } else {
            s.fail("expected a term");
        }
        if (s.accept("+")) {
            sign = 1;
        } else if (!s.peek_is("->") && s.accept("-")) {
            sign = -1;
        } else {
            break;
        }
    }
    return e;
}

namespace {

std::optional<RelOp> parse_rel(Scanner& s) {
    if (s.accept("<=")) return RelOp::le;
    if (s.accept(">=")) return RelOp::ge;
    if (s.accept("<")) return RelOp::lt;
    if (s.accept(">")) return RelOp::gt;
    if (s.accept("=")) return RelOp::eq;
    return std::nullopt;
}

}  // namespace

std::vector<Constraint> parse_constraint(Scanner& s, std::size_t dim, const NameResolver& names) {
    std::vector<Constraint> out;
    LinExpr lhs = parse_linexpr(s, dim, names);
    auto rel = parse_rel(s);
    if (!rel) s.fail("expected a relation");
    do {
        LinExpr rhs = parse_linexpr(s, dim, names);
        out.push_back(Constraint::from_expr(lhs - rhs, *rel));
        lhs = std::move(rhs);
    } while ((rel = parse_rel(s)));
    return out;
}

std::vector<Constraint> parse_constraint_list(Scanner& s, std::size_t dim, const NameResolver& names) {
    std::vector<Constraint> out;
    do {
        auto cs = parse_constraint(s, dim, names);
        out.insert(out.end(), cs.begin(), cs.end());
    } while (s.accept(","));
    return out;
}

std::vector<Constraint> parse_constraints(std::string_view text, const std::vector<std::string>& names) {
    Scanner s(text);
    if (s.at_end()) return {};
    bool braces = s.accept("{");
    std::vector<Constraint> out;
    if (!(braces && s.accept("}"))) {
        out = parse_constraint_list(s, names.size(), resolver_for(names));
        if (braces) s.expect("}");
    }
    if (!s.at_end()) s.fail("unexpected text '" + s.peek_text() + "'");
    return out;
}

std::string render_linexpr(std::span<const Integer> coeffs, const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const Integer& c = coeffs[i];
        if (c == 0) continue;
        if (c < 0)
            out += "-";
        else if (!out.empty())
            out += "+";
        Integer a = abs(c);
        if (a != 1) out += a.get_str() + "*";
        out += i < names.size() ? names[i] : "x" + std::to_string(i);
    }
    return out.empty() ? "0" : out;
}

std::string render_constraint(const Constraint& c, const std::vector<std::string>& names) {
    if (c.is_trivial()) return "0>=" + c.rhs().get_str();
    if (c.is_equality()) return render_linexpr(c.coefficients(), names) + "=" + c.rhs().get_str();
    auto lead = std::find_if(c.coefficients().begin(), c.coefficients().end(), [](const Integer& x) { return x != 0; });
    if (*lead > 0) {
        std::string e = render_linexpr(c.coefficients(), names);
        return c.is_strict() ? c.rhs().get_str() + "<" + e : e + ">=" + c.rhs().get_str();
    }
    IntVector neg = c.coefficients();
    for (auto& x : neg) x = -x;
    Integer r = -c.rhs();
    return render_linexpr(neg, names) + (c.is_strict() ? "<" : "<=") + r.get_str();
}

std::string render_system(std::span<const Constraint> cs, const std::vector<std::string>& names) {
    struct Key {
        bool ineq;
        std::size_t var;
        bool upper;
        IntVector coeffs;
        Integer rhs;
        bool strict;
        bool operator<(const Key& o) const {
            return std::tie(ineq, var, upper, coeffs, rhs, strict) <
                   std::tie(o.ineq, o.var, o.upper, o.coeffs, o.rhs, o.strict);
        }
    };
    std::vector<std::pair<Key, std::string>> items;
    for (const auto& c : cs) {
        Key k{!c.is_equality(), 0, false, c.coefficients(), c.rhs(), c.is_strict()};
        auto lead = std::find_if(k.coeffs.begin(), k.coeffs.end(), [](const Integer& x) { return x != 0; });
        k.var = static_cast<std::size_t>(lead - k.coeffs.begin());
        if (lead != k.coeffs.end() && *lead < 0) {
            k.upper = true;
            for (auto& x : k.coeffs) x = -x;
            k.rhs = -k.rhs;
        }
        items.emplace_back(std::move(k), render_constraint(c, names));
    }
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::string out = "{";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i].second;
    }
    return out + "}";
}

std::string render(const Polyhedron& p, const std::vector<std::string>& names) {
    auto cs = p.minimized_constraints();
    return render_system(cs, names);
}

}  // namespace polyan
