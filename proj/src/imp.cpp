#include "polyan/imp.hpp"

#include <algorithm>
#include <array>

namespace polyan::imp {

namespace {

constexpr std::array<std::string_view, 9> keywords{"skip", "if", "then", "else", "while", "do", "true", "false", "var"};

bool is_keyword(std::string_view id) { return std::find(keywords.begin(), keywords.end(), id) != keywords.end(); }

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    Program run() {
        Program p;
        if (s_.accept("var")) {
            p.declared = true;
            do {
                SourcePos at = s_.pos();
                auto id = s_.ident();
                if (!id || is_keyword(*id)) s_.fail("expected a variable name");
                if (std::find(vars_.begin(), vars_.end(), *id) != vars_.end())
                    s_.fail_at(at, "variable '" + *id + "' declared twice");
                vars_.push_back(*id);
            } while (s_.accept(","));
            s_.expect(";");
        }
        declared_ = p.declared;
        if (s_.at_end()) s_.fail("empty program");
        auto body = seq();
        if (!s_.at_end()) s_.fail("unexpected '" + s_.peek_text() + "'");
        std::size_t next = 0;
        number(*body, next, p.points);
        p.vars = vars_;
        p.body = body;
        return p;
    }

private:
    using MStmt = std::shared_ptr<Stmt>;

    void number(Stmt& st, std::size_t& next, std::vector<const Stmt*>& points) {
        st.id = next++;
        points.push_back(&st);
        if (st.s0) number(const_cast<Stmt&>(*st.s0), next, points);
        if (st.s1) number(const_cast<Stmt&>(*st.s1), next, points);
    }

    std::size_t variable(SourcePos at, const std::string& id) {
        if (is_keyword(id)) s_.fail_at(at, "unexpected keyword '" + id + "'");
        auto it = std::find(vars_.begin(), vars_.end(), id);
        if (it != vars_.end()) return static_cast<std::size_t>(it - vars_.begin());
        if (declared_) s_.fail_at(at, "undeclared variable '" + id + "'");
        vars_.push_back(id);
        return vars_.size() - 1;
    }

    MStmt seq() {
        MStmt first = stmt();
        if (!s_.accept(";")) return first;
        if (s_.peek_is("}") || s_.at_end()) return first;
        auto node = std::make_shared<Stmt>();
        node->kind = Stmt::Kind::seq;
        node->pos = first->pos;
        node->s0 = first;
        node->s1 = seq();
        return node;
    }

    MStmt stmt() {
        SourcePos at = s_.pos();
        auto node = std::make_shared<Stmt>();
        node->pos = at;
        if (s_.accept("{")) {
            MStmt inner = seq();
            s_.expect("}");
            return inner;
        }
        if (s_.accept("skip")) {
            node->kind = Stmt::Kind::skip;
            return node;
        }
        if (s_.accept("if")) {
            node->kind = Stmt::Kind::ite;
            node->cond = bexp();
            s_.expect("then");
            node->s0 = stmt();
            s_.expect("else");
            node->s1 = stmt();
            return node;
        }
        if (s_.accept("while")) {
            node->kind = Stmt::Kind::loop;
            node->cond = bexp();
            s_.expect("do");
            node->s0 = stmt();
            return node;
        }
        auto id = s_.ident();
        if (!id) s_.fail("expected a statement");
        node->kind = Stmt::Kind::assign;
        node->var = variable(at, *id);
        s_.expect(":=");
        node->expr = aexp();
        return node;
    }

    BexpPtr bexp() {
        SourcePos at = s_.pos();
        auto b = std::make_shared<Bexp>();
        b->pos = at;
        if (s_.accept("true")) {
            b->kind = Bexp::Kind::lit;
            b->value = true;
            return b;
        }
        if (s_.accept("false")) {
            b->kind = Bexp::Kind::lit;
            b->value = false;
            return b;
        }
        b->lhs = aexp();
        if (s_.accept("="))
            b->kind = Bexp::Kind::eq;
        else if (s_.accept("<"))
            b->kind = Bexp::Kind::lt;
        else
            s_.fail("expected '=' or '<'");
        b->rhs = aexp();
        return b;
    }

    AexpPtr binary(Aexp::Kind k, AexpPtr l, AexpPtr r) {
        auto a = std::make_shared<Aexp>();
        a->kind = k;
        a->pos = l->pos;
        a->lhs = std::move(l);
        a->rhs = std::move(r);
        return a;
    }

    AexpPtr aexp() {
        AexpPtr a = term();
        for (;;) {
            if (s_.accept("+"))
                a = binary(Aexp::Kind::add, a, term());
            else if (s_.accept("-"))
                a = binary(Aexp::Kind::sub, a, term());
            else
                return a;
        }
    }

    AexpPtr term() {
        AexpPtr a = factor();
        while (s_.accept("*")) a = binary(Aexp::Kind::mul, a, factor());
        return a;
    }

    AexpPtr factor() {
        SourcePos at = s_.pos();
        auto a = std::make_shared<Aexp>();
        a->pos = at;
        if (s_.accept("(")) {
            AexpPtr inner = aexp();
            s_.expect(")");
            return inner;
        }
        bool neg = s_.accept("-");
        if (auto k = s_.integer()) {
            a->kind = Aexp::Kind::num;
            a->value = neg ? Integer(-*k) : *k;
            return a;
        }
        if (neg) s_.fail("expected an integer after '-'");
        auto id = s_.ident();
        if (!id) s_.fail("expected an arithmetic expression");
        a->kind = Aexp::Kind::var;
        a->var = variable(at, *id);
        return a;
    }

    Scanner s_;
    std::vector<std::string> vars_;
    bool declared_ = false;
};

int prec(const Aexp& a) {
    switch (a.kind) {
        case Aexp::Kind::add:
        case Aexp::Kind::sub: return 1;
        case Aexp::Kind::mul: return 2;
        default: return 3;
    }
}

std::string fmt(const Aexp& a, const std::vector<std::string>& vars, int need) {
    std::string out;
    switch (a.kind) {
        case Aexp::Kind::num: out = a.value.get_str(); break;
        case Aexp::Kind::var: out = vars.at(a.var); break;
        case Aexp::Kind::add: out = fmt(*a.lhs, vars, 1) + " + " + fmt(*a.rhs, vars, 2); break;
        case Aexp::Kind::sub: out = fmt(*a.lhs, vars, 1) + " - " + fmt(*a.rhs, vars, 2); break;
        case Aexp::Kind::mul: out = fmt(*a.lhs, vars, 2) + " * " + fmt(*a.rhs, vars, 3); break;
    }
    return prec(a) < need ? "(" + out + ")" : out;
}

std::string fmt(const Bexp& b, const std::vector<std::string>& vars) {
    switch (b.kind) {
        case Bexp::Kind::lit: return b.value ? "true" : "false";
        case Bexp::Kind::eq: return fmt(*b.lhs, vars, 1) + " = " + fmt(*b.rhs, vars, 1);
        case Bexp::Kind::lt: return fmt(*b.lhs, vars, 1) + " < " + fmt(*b.rhs, vars, 1);
    }
    return {};
}

std::string fmt(const Stmt& s, const std::vector<std::string>& vars, std::size_t indent);

std::string body(const Stmt& s, const std::vector<std::string>& vars, std::size_t indent) {
    if (s.kind != Stmt::Kind::seq) return fmt(s, vars, indent);
    return "{\n" + std::string(2 * (indent + 1), ' ') + fmt(s, vars, indent + 1) + "\n" + std::string(2 * indent, ' ') +
           "}";
}

std::string fmt(const Stmt& s, const std::vector<std::string>& vars, std::size_t indent) {
    switch (s.kind) {
        case Stmt::Kind::skip: return "skip";
        case Stmt::Kind::assign: return vars.at(s.var) + " := " + fmt(*s.expr, vars, 1);
        case Stmt::Kind::seq:
            return fmt(*s.s0, vars, indent) + ";\n" + std::string(2 * indent, ' ') + fmt(*s.s1, vars, indent);
        case Stmt::Kind::ite:
            return "if " + fmt(*s.cond, vars) + " then " + body(*s.s0, vars, indent) + " else " +
                   body(*s.s1, vars, indent);
        case Stmt::Kind::loop: return "while " + fmt(*s.cond, vars) + " do " + body(*s.s0, vars, indent);
    }
    return {};
}

bool run(const Stmt& s, Store& st, std::size_t& fuel, const LoopObserver& observe) {
    if (fuel == 0) return false;
    --fuel;
    switch (s.kind) {
        case Stmt::Kind::skip: return true;
        case Stmt::Kind::assign: st[s.var] = eval(*s.expr, st); return true;
        case Stmt::Kind::seq: return run(*s.s0, st, fuel, observe) && run(*s.s1, st, fuel, observe);
        case Stmt::Kind::ite: return run(eval(*s.cond, st) ? *s.s0 : *s.s1, st, fuel, observe);
        case Stmt::Kind::loop:
            for (;;) {
                if (observe) observe(s, st);
                if (!eval(*s.cond, st)) return true;
                if (fuel == 0) return false;
                --fuel;
                if (!run(*s.s0, st, fuel, observe)) return false;
            }
    }
    return true;
}

}  // namespace

Program parse_program(std::string_view text) { return Parser(text).run(); }

std::string format(const Program& p) {
    std::string out;
    if (p.declared) {
        out = "var ";
        for (std::size_t i = 0; i < p.vars.size(); ++i) out += (i ? ", " : "") + p.vars[i];
        out += ";\n";
    }
    return out + fmt(*p.body, p.vars, 0) + "\n";
}

bool same_aexp(const Aexp& a, const Aexp& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Aexp::Kind::num: return a.value == b.value;
        case Aexp::Kind::var: return a.var == b.var;
        default: return same_aexp(*a.lhs, *b.lhs) && same_aexp(*a.rhs, *b.rhs);
    }
}

bool same_bexp(const Bexp& a, const Bexp& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == Bexp::Kind::lit) return a.value == b.value;
    return same_aexp(*a.lhs, *b.lhs) && same_aexp(*a.rhs, *b.rhs);
}

bool same_stmt(const Stmt& a, const Stmt& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Stmt::Kind::skip: return true;
        case Stmt::Kind::assign: return a.var == b.var && same_aexp(*a.expr, *b.expr);
        case Stmt::Kind::seq: return same_stmt(*a.s0, *b.s0) && same_stmt(*a.s1, *b.s1);
        case Stmt::Kind::ite:
            return same_bexp(*a.cond, *b.cond) && same_stmt(*a.s0, *b.s0) && same_stmt(*a.s1, *b.s1);
        case Stmt::Kind::loop: return same_bexp(*a.cond, *b.cond) && same_stmt(*a.s0, *b.s0);
    }
    return false;
}

Integer eval(const Aexp& a, const Store& s) {
    switch (a.kind) {
        case Aexp::Kind::num: return a.value;
        case Aexp::Kind::var: return s.at(a.var);
        case Aexp::Kind::add: return eval(*a.lhs, s) + eval(*a.rhs, s);
        case Aexp::Kind::sub: return eval(*a.lhs, s) - eval(*a.rhs, s);
        case Aexp::Kind::mul: return eval(*a.lhs, s) * eval(*a.rhs, s);
    }
    return 0;
}

bool eval(const Bexp& b, const Store& s) {
    switch (b.kind) {
        case Bexp::Kind::lit: return b.value;
        case Bexp::Kind::eq: return eval(*b.lhs, s) == eval(*b.rhs, s);
        case Bexp::Kind::lt: return eval(*b.lhs, s) < eval(*b.rhs, s);
    }
    return false;
}

ExecResult exec(const Program& p, Store store, std::size_t fuel, const LoopObserver& observe) {
    if (fuel == 0) throw std::invalid_argument("exec: fuel must be positive");
    if (store.size() != p.vars.size()) throw DimensionError("exec: store does not match the declared variables");
    ExecResult r;
    r.diverged = !run(*p.body, store, fuel, observe);
    r.store = std::move(store);
    return r;
}

std::optional<LinExpr> linearize(const Aexp& a, std::size_t dim) {
    switch (a.kind) {
        case Aexp::Kind::num: return LinExpr(dim, Rational(a.value));
        case Aexp::Kind::var: return LinExpr::variable(a.var, dim);
        case Aexp::Kind::add:
        case Aexp::Kind::sub: {
            auto l = linearize(*a.lhs, dim);
            auto r = linearize(*a.rhs, dim);
            if (!l || !r) return std::nullopt;
            return a.kind == Aexp::Kind::add ? *l + *r : *l - *r;
        }
        case Aexp::Kind::mul: {
            auto l = linearize(*a.lhs, dim);
            auto r = linearize(*a.rhs, dim);
            if (!l || !r) return std::nullopt;
            if (l->is_constant()) return *r * l->constant();
            if (r->is_constant()) return *l * r->constant();
            return std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace polyan::imp
