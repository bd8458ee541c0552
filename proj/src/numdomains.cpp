#include "polyan/numdomains.hpp"

#include <algorithm>
#include <array>

namespace polyan {

namespace {

// Extended integer: inf = -1 for -infinity, +1 for +infinity, 0 for finite v.
struct Ext {
    int inf = 0;
    Integer v = 0;
};

bool ext_less(const Ext& a, const Ext& b) {
    if (a.inf != b.inf) return a.inf < b.inf;
    return a.inf == 0 && a.v < b.v;
}

Ext ext_mul(const Ext& a, const Ext& b) {
    int sa = a.inf ? a.inf : sgn(a.v);
    int sb = b.inf ? b.inf : sgn(b.v);
    if (sa == 0 || sb == 0) return {0, 0};
    if (a.inf || b.inf) return {sa * sb, 0};
    return {0, a.v * b.v};
}

Ext lo_of(const Interval& i) { return i.lower() ? Ext{0, *i.lower()} : Ext{-1, 0}; }
Ext hi_of(const Interval& i) { return i.upper() ? Ext{0, *i.upper()} : Ext{1, 0}; }

std::optional<Integer> finite(const Ext& e) {
    if (e.inf) return std::nullopt;
    return e.v;
}

}  // namespace

Interval::Interval(std::optional<Integer> lo, std::optional<Integer> hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_ && hi_ && *lo_ > *hi_) {
        bottom_ = true;
        lo_.reset();
        hi_.reset();
    }
}

Interval Interval::bottom() {
    Interval i;
    i.bottom_ = true;
    return i;
}

bool Interval::contains(const Integer& v) const {
    if (bottom_) return false;
    return (!lo_ || *lo_ <= v) && (!hi_ || v <= *hi_);
}

Interval Interval::join(const Interval& o) const {
    if (bottom_) return o;
    if (o.bottom_) return *this;
    std::optional<Integer> lo, hi;
    if (lo_ && o.lo_) lo = std::min(*lo_, *o.lo_);
    if (hi_ && o.hi_) hi = std::max(*hi_, *o.hi_);
    return Interval(lo, hi);
}

Interval Interval::meet(const Interval& o) const {
    if (bottom_ || o.bottom_) return bottom();
    std::optional<Integer> lo = lo_, hi = hi_;
    if (o.lo_ && (!lo || *o.lo_ > *lo)) lo = o.lo_;
    if (o.hi_ && (!hi || *o.hi_ < *hi)) hi = o.hi_;
    return Interval(lo, hi);
}

bool Interval::leq(const Interval& o) const {
    if (bottom_) return true;
    if (o.bottom_) return false;
    bool lo_ok = !o.lo_ || (lo_ && *lo_ >= *o.lo_);
    bool hi_ok = !o.hi_ || (hi_ && *hi_ <= *o.hi_);
    return lo_ok && hi_ok;
}

bool Interval::operator==(const Interval& o) const {
    return bottom_ == o.bottom_ && lo_ == o.lo_ && hi_ == o.hi_;
}

std::string Interval::str() const {
    if (bottom_) return "bot";
    return "[" + (lo_ ? lo_->get_str() : std::string("-inf")) + ", " + (hi_ ? hi_->get_str() : std::string("+inf")) +
           "]";
}

Interval alpha_int(const Integer& v) { return Interval::singleton(v); }
Interval alpha_int_all() { return Interval::top(); }

Interval operator+(const Interval& a, const Interval& b) {
    if (a.is_bottom() || b.is_bottom()) return Interval::bottom();
    std::optional<Integer> lo, hi;
    if (a.lower() && b.lower()) lo = *a.lower() + *b.lower();
    if (a.upper() && b.upper()) hi = *a.upper() + *b.upper();
    return Interval(lo, hi);
}

Interval operator-(const Interval& a, const Interval& b) {
    if (a.is_bottom() || b.is_bottom()) return Interval::bottom();
    std::optional<Integer> lo, hi;
    if (a.lower() && b.upper()) lo = *a.lower() - *b.upper();
    if (a.upper() && b.lower()) hi = *a.upper() - *b.lower();
    return Interval(lo, hi);
}

Interval operator*(const Interval& a, const Interval& b) {
    if (a.is_bottom() || b.is_bottom()) return Interval::bottom();
    std::array<Ext, 4> p{ext_mul(lo_of(a), lo_of(b)), ext_mul(lo_of(a), hi_of(b)), ext_mul(hi_of(a), lo_of(b)),
                         ext_mul(hi_of(a), hi_of(b))};
    auto [mn, mx] = std::minmax_element(p.begin(), p.end(), ext_less);
    return Interval(finite(*mn), finite(*mx));
}

ABool alpha_bool(bool can_be_true, bool can_be_false) {
    if (can_be_true && can_be_false) return ABool::top;
    if (can_be_true) return ABool::tt;
    if (can_be_false) return ABool::ff;
    return ABool::bot;
}

bool may_be_true(ABool b) { return b == ABool::tt || b == ABool::top; }
bool may_be_false(ABool b) { return b == ABool::ff || b == ABool::top; }

ABool abool_join(ABool a, ABool b) {
    return alpha_bool(may_be_true(a) || may_be_true(b), may_be_false(a) || may_be_false(b));
}

ABool abool_meet(ABool a, ABool b) {
    return alpha_bool(may_be_true(a) && may_be_true(b), may_be_false(a) && may_be_false(b));
}

bool abool_leq(ABool a, ABool b) { return abool_join(a, b) == b; }

ABool abool_not(ABool a) { return alpha_bool(may_be_false(a), may_be_true(a)); }

ABool abool_or(ABool a, ABool b) {
    if (a == ABool::bot || b == ABool::bot) return ABool::bot;
    bool t = may_be_true(a) || may_be_true(b);
    bool f = may_be_false(a) && may_be_false(b);
    return alpha_bool(t, f);
}

ABool abool_and(ABool a, ABool b) {
    if (a == ABool::bot || b == ABool::bot) return ABool::bot;
    bool t = may_be_true(a) && may_be_true(b);
    bool f = may_be_false(a) || may_be_false(b);
    return alpha_bool(t, f);
}

ABool abstract_eq(const Interval& a, const Interval& b) {
    if (a.is_bottom() || b.is_bottom()) return ABool::bot;
    bool can_true = !a.meet(b).is_bottom();
    bool can_false = !(a.is_singleton() && b.is_singleton() && *a.lower() == *b.lower());
    return alpha_bool(can_true, can_false);
}

ABool abstract_lt(const Interval& a, const Interval& b) {
    if (a.is_bottom() || b.is_bottom()) return ABool::bot;
    bool can_true = !a.lower() || !b.upper() || *a.lower() < *b.upper();
    bool can_false = !a.upper() || !b.lower() || *a.upper() >= *b.lower();
    return alpha_bool(can_true, can_false);
}

const char* to_string(ABool b) {
    switch (b) {
        case ABool::bot: return "bot";
        case ABool::tt: return "tt";
        case ABool::ff: return "ff";
        case ABool::top: return "top";
    }
    return "?";
}

}  // namespace polyan
