#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace polyan {

using Integer = mpz_class;
using Rational = mpq_class;
using IntVector = std::vector<Integer>;

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Affine expression sum_i coeff[i] * x_i + constant over a fixed ambient dimension.
class LinExpr {
public:
    LinExpr() = default;
    explicit LinExpr(std::size_t dim, Rational constant = 0);
    LinExpr(std::vector<Rational> coeffs, Rational constant);

    static LinExpr variable(std::size_t index, std::size_t dim);

    std::size_t dimension() const { return coeffs_.size(); }
    const Rational& coefficient(std::size_t i) const { return coeffs_.at(i); }
    const std::vector<Rational>& coefficients() const { return coeffs_; }
    const Rational& constant() const { return constant_; }

    void set_coefficient(std::size_t i, Rational v) { coeffs_.at(i) = std::move(v); }
    void set_constant(Rational v) { constant_ = std::move(v); }

    bool is_constant() const;
    /// Embeds into a larger ambient space, new dimensions get coefficient 0.
    LinExpr resized(std::size_t dim) const;

    LinExpr& operator+=(const LinExpr& o);
    LinExpr& operator-=(const LinExpr& o);
    LinExpr& operator*=(const Rational& k);
    friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
    friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
    friend LinExpr operator*(LinExpr a, const Rational& k) { return a *= k; }
    LinExpr operator-() const;
    bool operator==(const LinExpr&) const = default;

private:
    std::vector<Rational> coeffs_;
    Rational constant_ = 0;
};

Rational evaluate(const LinExpr& e, std::span<const Rational> point);

enum class Relation { eq, ge, gt };
/// Relational operator as written in source text, before orientation.
enum class RelOp { lt, le, eq, ge, gt };

/// Canonical integer linear relation  coeffs . x  REL  rhs.
///
/// The coefficient vector and rhs have gcd 1. Equalities have a positive
/// leading coefficient. A constraint with all-zero coefficients is stored
/// either as the tautology `0 >= 0` or the contradiction `0 >= 1`.
class Constraint {
public:
    Constraint() = default;

    /// Canonical form of `e REL 0`; `<` and `<=` are negated into `>` and `>=`.
    static Constraint from_expr(const LinExpr& e, RelOp op);
    /// Builds from already-integral data and canonicalizes.
    static Constraint make(IntVector coeffs, Integer rhs, Relation rel);

    std::size_t dimension() const { return coeffs_.size(); }
    const IntVector& coefficients() const { return coeffs_; }
    const Integer& coefficient(std::size_t i) const { return coeffs_.at(i); }
    const Integer& rhs() const { return rhs_; }
    Relation relation() const { return rel_; }

    bool is_equality() const { return rel_ == Relation::eq; }
    bool is_strict() const { return rel_ == Relation::gt; }
    bool is_trivial() const;  // all coefficients zero
    bool is_tautology() const;
    bool is_inconsistent() const;

    /// The constraint as an expression `coeffs . x - rhs` (relation to 0 implied).
    LinExpr expression() const;
    Constraint resized(std::size_t dim) const;

    bool operator==(const Constraint&) const;
    bool operator<(const Constraint&) const;

private:
    IntVector coeffs_;
    Integer rhs_ = 0;
    Relation rel_ = Relation::ge;
};

enum class GenKind { point, ray, closure_point };

/// Point / closure point  coeffs / divisor, or a ray direction.
/// A line is expressed as a pair of opposite rays.
class Generator {
public:
    Generator() = default;

    static Generator point(IntVector coeffs, Integer divisor = 1);
    static Generator point(std::span<const Rational> coords);
    static Generator closure_point(IntVector coeffs, Integer divisor = 1);
    static Generator ray(IntVector direction);

    GenKind kind() const { return kind_; }
    bool is_point() const { return kind_ == GenKind::point; }
    bool is_closure_point() const { return kind_ == GenKind::closure_point; }
    bool is_ray() const { return kind_ == GenKind::ray; }
    std::size_t dimension() const { return coeffs_.size(); }
    const IntVector& coefficients() const { return coeffs_; }
    const Integer& divisor() const { return divisor_; }
    std::vector<Rational> coordinates() const;

    bool operator==(const Generator&) const;
    bool operator<(const Generator&) const;

private:
    Generator(GenKind k, IntVector c, Integer d);
    GenKind kind_ = GenKind::point;
    IntVector coeffs_;
    Integer divisor_ = 1;
};

enum class SatResult { satisfies, saturates, violates };

/// Relation of a generator to a constraint. For points and closure points
/// the sign of `a.v - b` is inspected; for rays the sign of `a.r`.
/// `saturates` only reports equality, so a point saturating a strict
/// constraint lies outside it.
SatResult satisfies(const Constraint& c, const Generator& g);

Integer gcd_of(std::span<const Integer> v);
/// Divides by the (positive) gcd of all entries; leaves zero vectors alone.
void normalize(IntVector& v);

}  // namespace polyan
