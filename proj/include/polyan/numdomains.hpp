#pragma once

#include <optional>
#include <string>

#include "polyan/linalg.hpp"

namespace polyan {

/// Integer interval with possibly infinite endpoints, or bottom.
class Interval {
public:
    /// The whole integer line.
    Interval() = default;
    Interval(std::optional<Integer> lo, std::optional<Integer> hi);

    static Interval bottom();
    static Interval top() { return Interval(); }
    static Interval singleton(const Integer& v) { return Interval(v, v); }

    bool is_bottom() const { return bottom_; }
    bool is_top() const { return !bottom_ && !lo_ && !hi_; }
    /// Absent means -infinity / +infinity.
    const std::optional<Integer>& lower() const { return lo_; }
    const std::optional<Integer>& upper() const { return hi_; }
    bool contains(const Integer& v) const;
    bool is_singleton() const { return !bottom_ && lo_ && hi_ && *lo_ == *hi_; }

    Interval join(const Interval& o) const;
    Interval meet(const Interval& o) const;
    bool leq(const Interval& o) const;
    bool operator==(const Interval& o) const;

    std::string str() const;

private:
    bool bottom_ = false;
    std::optional<Integer> lo_, hi_;
};

Interval alpha_int(const Integer& v);
Interval alpha_int_all();

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);

/// Four-valued abstract truth: bot < tt, ff < top.
enum class ABool { bot, tt, ff, top };

ABool alpha_bool(bool can_be_true, bool can_be_false);
bool may_be_true(ABool b);
bool may_be_false(ABool b);
ABool abool_join(ABool a, ABool b);
ABool abool_meet(ABool a, ABool b);
bool abool_leq(ABool a, ABool b);

ABool abool_not(ABool a);
ABool abool_or(ABool a, ABool b);
ABool abool_and(ABool a, ABool b);

ABool abstract_eq(const Interval& a, const Interval& b);
ABool abstract_lt(const Interval& a, const Interval& b);

const char* to_string(ABool b);

}  // namespace polyan
