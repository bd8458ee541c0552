#include "polyan/linalg.hpp"

#include <algorithm>
#include <tuple>

namespace polyan {

namespace {

void require_same(std::size_t a, std::size_t b, const char* what) {
    if (a != b)
        throw DimensionError(std::string(what) + ": dimension " + std::to_string(a) +
                             " vs " + std::to_string(b));
}

int sign_of(const Integer& v) { return sgn(v); }

}  // namespace

LinExpr::LinExpr(std::size_t dim, Rational constant) : coeffs_(dim, Rational(0)), constant_(std::move(constant)) {}

LinExpr::LinExpr(std::vector<Rational> coeffs, Rational constant)
    : coeffs_(std::move(coeffs)), constant_(std::move(constant)) {}

LinExpr LinExpr::variable(std::size_t index, std::size_t dim) {
    if (index >= dim) throw DimensionError("variable index out of range");
    LinExpr e(dim);
    e.coeffs_[index] = 1;
    return e;
}

bool LinExpr::is_constant() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& q) { return q == 0; });
}

LinExpr LinExpr::resized(std::size_t dim) const {
    if (dim < coeffs_.size()) throw DimensionError("cannot shrink a linear expression");
    LinExpr e(*this);
    e.coeffs_.resize(dim, Rational(0));
    return e;
}

LinExpr& LinExpr::operator+=(const LinExpr& o) {
    require_same(dimension(), o.dimension(), "LinExpr +");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    constant_ += o.constant_;
    return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
    require_same(dimension(), o.dimension(), "LinExpr -");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    constant_ -= o.constant_;
    return *this;
}

LinExpr& LinExpr::operator*=(const Rational& k) {
    for (auto& c : coeffs_) c *= k;
    constant_ *= k;
    return *this;
}

LinExpr LinExpr::operator-() const {
    LinExpr e(*this);
    e *= Rational(-1);
    return e;
}

Rational evaluate(const LinExpr& e, std::span<const Rational> point) {
    require_same(e.dimension(), point.size(), "evaluate");
    Rational r = e.constant();
    for (std::size_t i = 0; i < point.size(); ++i) r += e.coefficient(i) * point[i];
    return r;
}

Integer gcd_of(std::span<const Integer> v) {
    Integer g = 0;
    for (const auto& x : v) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        if (g == 1) break;
    }
    return g;
}

void normalize(IntVector& v) {
    Integer g = gcd_of(v);
    if (g > 1)
        for (auto& x : v) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
}

Constraint Constraint::make(IntVector coeffs, Integer rhs, Relation rel) {
    Constraint c;
    bool zero = std::all_of(coeffs.begin(), coeffs.end(), [](const Integer& x) { return x == 0; });
    if (zero) {
        bool holds = rel == Relation::eq ? rhs == 0 : rel == Relation::ge ? rhs <= 0 : rhs < 0;
        c.coeffs_ = std::move(coeffs);
        c.rhs_ = holds ? 0 : 1;
        c.rel_ = Relation::ge;
        return c;
    }
    coeffs.push_back(rhs);
    normalize(coeffs);
    if (rel == Relation::eq) {
        auto lead = std::find_if(coeffs.begin(), coeffs.end(), [](const Integer& x) { return x != 0; });
        if (*lead < 0)
            for (auto& x : coeffs) x = -x;
    }
    c.rhs_ = coeffs.back();
    coeffs.pop_back();
    c.coeffs_ = std::move(coeffs);
    c.rel_ = rel;
    return c;
}

Constraint Constraint::from_expr(const LinExpr& e, RelOp op) {
    Integer den = 1;
    auto absorb = [&](const Rational& q) { mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t()); };
    for (const auto& q : e.coefficients()) absorb(q);
    absorb(e.constant());
    Integer sign = (op == RelOp::lt || op == RelOp::le) ? -1 : 1;
    IntVector a;
    a.reserve(e.dimension());
    for (const auto& q : e.coefficients()) {
        Rational s = q * den * sign;
        a.push_back(s.get_num());
    }
    Rational c = e.constant() * den * sign;
    Relation rel = op == RelOp::eq ? Relation::eq
                   : (op == RelOp::lt || op == RelOp::gt) ? Relation::gt
                                                          : Relation::ge;
    return make(std::move(a), -c.get_num(), rel);
}

bool Constraint::is_trivial() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Integer& x) { return x == 0; });
}

bool Constraint::is_tautology() const { return is_trivial() && rhs_ == 0; }
bool Constraint::is_inconsistent() const { return is_trivial() && rhs_ != 0; }

LinExpr Constraint::expression() const {
    std::vector<Rational> q(coeffs_.begin(), coeffs_.end());
    return LinExpr(std::move(q), Rational(-rhs_));
}

Constraint Constraint::resized(std::size_t dim) const {
    if (dim < coeffs_.size()) throw DimensionError("cannot shrink a constraint");
    Constraint c(*this);
    c.coeffs_.resize(dim, Integer(0));
    return c;
}

bool Constraint::operator==(const Constraint& o) const {
    return rel_ == o.rel_ && rhs_ == o.rhs_ && coeffs_ == o.coeffs_;
}

bool Constraint::operator<(const Constraint& o) const {
    return std::tie(coeffs_, rhs_, rel_) < std::tie(o.coeffs_, o.rhs_, o.rel_);
}

Generator::Generator(GenKind k, IntVector c, Integer d) : kind_(k), coeffs_(std::move(c)), divisor_(std::move(d)) {
    if (kind_ == GenKind::ray) {
        if (std::all_of(coeffs_.begin(), coeffs_.end(), [](const Integer& x) { return x == 0; }))
            throw std::invalid_argument("ray with zero direction");
        divisor_ = 1;
        normalize(coeffs_);
        return;
    }
    if (divisor_ == 0) throw std::invalid_argument("point with zero divisor");
    if (divisor_ < 0) {
        divisor_ = -divisor_;
        for (auto& x : coeffs_) x = -x;
    }
    coeffs_.push_back(divisor_);
    normalize(coeffs_);
    divisor_ = coeffs_.back();
    coeffs_.pop_back();
}

Generator Generator::point(IntVector coeffs, Integer divisor) {
    return Generator(GenKind::point, std::move(coeffs), std::move(divisor));
}

Generator Generator::closure_point(IntVector coeffs, Integer divisor) {
    return Generator(GenKind::closure_point, std::move(coeffs), std::move(divisor));
}

Generator Generator::ray(IntVector direction) { return Generator(GenKind::ray, std::move(direction), 1); }

Generator Generator::point(std::span<const Rational> coords) {
    Integer den = 1;
    for (const auto& q : coords) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t());
    IntVector v;
    v.reserve(coords.size());
    for (const auto& q : coords) {
        Rational s = q * den;
        v.push_back(s.get_num());
    }
    return point(std::move(v), den);
}

std::vector<Rational> Generator::coordinates() const {
    std::vector<Rational> out;
    out.reserve(coeffs_.size());
    for (const auto& x : coeffs_) {
        Rational q(x, divisor_);
        q.canonicalize();
        out.push_back(q);
    }
    return out;
}

bool Generator::operator==(const Generator& o) const {
    return kind_ == o.kind_ && divisor_ == o.divisor_ && coeffs_ == o.coeffs_;
}

bool Generator::operator<(const Generator& o) const {
    return std::tie(kind_, coeffs_, divisor_) < std::tie(o.kind_, o.coeffs_, o.divisor_);
}

SatResult satisfies(const Constraint& c, const Generator& g) {
    require_same(c.dimension(), g.dimension(), "satisfies");
    Integer s = 0;
    for (std::size_t i = 0; i < c.dimension(); ++i) s += c.coefficient(i) * g.coefficients()[i];
    if (!g.is_ray()) s -= c.rhs() * g.divisor();
    int sg = sign_of(s);
    if (sg == 0) return SatResult::saturates;
    if (c.is_equality()) return SatResult::violates;
    return sg > 0 ? SatResult::satisfies : SatResult::violates;
}

}  // namespace polyan
