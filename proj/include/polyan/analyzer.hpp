#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyan/imp.hpp"
#include "polyan/numdomains.hpp"
#include "polyan/polyhedron.hpp"
#include "polyan/powerset.hpp"

namespace polyan {

struct AnalysisOptions {
    DomainKind domain = DomainKind::poly;
    std::size_t cap = 4;
    /// Number of plain joins before widening kicks in at a loop.
    std::size_t delay = 0;
    std::size_t max_local_iter = 10000;
    /// Powerset widenings allowed at one loop before the hull widening takes over.
    std::size_t powerset_widenings = 8;
};

class EngineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Closed polyhedron or finite powerset of closed polyhedra over the program
/// variables, depending on the configured domain.
class AbstractStore {
public:
    AbstractStore(DomainKind kind, std::size_t cap, PolySet value);
    static AbstractStore from(const Polyhedron& p, const AnalysisOptions& opts);
    static AbstractStore bottom(std::size_t n, const AnalysisOptions& opts);

    DomainKind kind() const { return kind_; }
    std::size_t dimension() const { return value_.dimension(); }
    const PolySet& value() const { return value_; }
    bool is_bottom() const { return value_.is_bottom(); }
    Polyhedron hull() const { return value_.collapse(); }

    AbstractStore join(const AbstractStore& o) const;
    bool leq(const AbstractStore& o) const;
    bool equals(const AbstractStore& o) const { return leq(o) && o.leq(*this); }
    /// *this widened by o; o must be above *this.
    AbstractStore widen(const AbstractStore& o, bool hull_only = false) const;
    AbstractStore map(const std::function<Polyhedron(const Polyhedron&)>& f) const;
    AbstractStore map_split(const std::function<std::vector<Polyhedron>(const Polyhedron&)>& f) const;

    bool contains_point(std::span<const Rational> v) const { return value_.contains_point(v); }
    Interval variable_range(std::size_t var) const;

private:
    DomainKind kind_;
    std::size_t cap_;
    PolySet value_;
};

Interval abstract_eval(const imp::Aexp& a, const AbstractStore& s);
ABool abstract_eval(const imp::Bexp& b, const AbstractStore& s);
AbstractStore filter(const AbstractStore& s, const imp::Bexp& b, bool branch);
AbstractStore abstract_assign(const AbstractStore& s, std::size_t var, const imp::Aexp& a);

struct AnalysisResult {
    /// Join of every store seen on entry to each statement, by statement id.
    std::vector<AbstractStore> entry;
    AbstractStore exit;
    /// Loop-head invariant per loop statement id.
    std::map<std::size_t, AbstractStore> loop_heads;
    std::size_t widenings = 0;
    std::size_t loop_expansions = 0;
};

AnalysisResult analyze(const imp::Program& p, const Polyhedron& initial, const AnalysisOptions& opts = {});

}  // namespace polyan
