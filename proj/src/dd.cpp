#include "dd.hpp"

#include <algorithm>

#include <boost/dynamic_bitset.hpp>

namespace polyan::detail {

namespace {

using Bits = boost::dynamic_bitset<>;

struct SatRay {
    IntVector v;
    Bits sat;
};

bool is_zero(const IntVector& v) {
    return std::all_of(v.begin(), v.end(), [](const Integer& x) { return x == 0; });
}

void negate(IntVector& v) {
    for (auto& x : v) x = -x;
}

// v := s*v - t*w
void combine(IntVector& v, const Integer& s, const Integer& t, const IntVector& w) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = s * v[i] - t * w[i];
    normalize(v);
}

IntVector unit(std::size_t d, std::size_t i) {
    IntVector v(d, Integer(0));
    v[i] = 1;
    return v;
}

// Reduced row echelon form with pivots chosen from the highest column index
// below `npiv` downwards. Rows are gcd-normalized with positive pivots.
std::vector<std::size_t> rref_high(std::vector<IntVector>& rows, std::size_t npiv) {
    std::vector<IntVector> out;
    std::vector<std::size_t> piv;
    std::vector<IntVector> rest = std::move(rows);
    for (std::size_t col = npiv; col-- > 0;) {
        auto it = std::find_if(rest.begin(), rest.end(), [&](const IntVector& r) { return r[col] != 0; });
        if (it == rest.end()) continue;
        IntVector p = std::move(*it);
        rest.erase(it);
        if (p[col] < 0) negate(p);
        normalize(p);
        for (auto& r : rest)
            if (r[col] != 0) {
                Integer t = r[col];
                combine(r, p[col], t, p);
            }
        for (auto& r : out)
            if (r[col] != 0) {
                Integer t = r[col];
                combine(r, p[col], t, p);
            }
        out.push_back(std::move(p));
        piv.push_back(col);
    }
    rows = std::move(out);
    return piv;
}

void reduce_mod(IntVector& v, const std::vector<IntVector>& rows, const std::vector<std::size_t>& piv) {
    bool changed = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::size_t c = piv[i];
        if (v[c] == 0) continue;
        Integer t = v[c];
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = rows[i][c] * v[j] - t * rows[i][j];
        changed = true;
    }
    if (changed) normalize(v);
}

void sort_unique(std::vector<IntVector>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

void canonicalize(std::size_t m, HomSys& s) {
    auto piv = rref_high(s.eq, m);
    for (auto& v : s.ineq) {
        reduce_mod(v, s.eq, piv);
        normalize(v);
    }
    std::erase_if(s.ineq, is_zero);
    sort_unique(s.ineq);
    sort_unique(s.eq);
}

bool has_var_part(const IntVector& v, std::size_t m) {
    return std::any_of(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), [](const Integer& x) { return x != 0; });
}

bool has_point(const HomSys& g, std::size_t m) {
    return std::any_of(g.ineq.begin(), g.ineq.end(), [&](const IntVector& v) { return v[m] > 0; });
}

std::optional<HomSys> cons_to_gens(std::size_t m, const HomSys& cons) {
    std::vector<IntVector> ineqs;
    ineqs.reserve(cons.ineq.size() + 1);
    ineqs.push_back(unit(m + 1, m));
    ineqs.insert(ineqs.end(), cons.ineq.begin(), cons.ineq.end());
    HomSys g = dd_cone(m + 1, cons.eq, ineqs);
    if (!has_point(g, m)) return std::nullopt;
    canonicalize(m, g);
    return g;
}

HomSys gens_to_cons(std::size_t m, const HomSys& gens) {
    HomSys c = dd_cone(m + 1, gens.eq, gens.ineq);
    canonicalize(m, c);
    std::erase_if(c.ineq, [&](const IntVector& v) { return !has_var_part(v, m); });
    std::erase_if(c.eq, [&](const IntVector& v) { return !has_var_part(v, m); });
    return c;
}

HomSys concat(const HomSys& a, const HomSys& b) {
    HomSys r = a;
    r.eq.insert(r.eq.end(), b.eq.begin(), b.eq.end());
    r.ineq.insert(r.ineq.end(), b.ineq.begin(), b.ineq.end());
    return r;
}

}  // namespace

Integer dot(const IntVector& a, const IntVector& b) {
    Integer s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
    return s;
}

HomSys dd_cone(std::size_t d, const std::vector<IntVector>& eqs, const std::vector<IntVector>& ineqs) {
    const std::size_t total = eqs.size() + ineqs.size();
    std::vector<IntVector> lines;
    for (std::size_t i = 0; i < d; ++i) lines.push_back(unit(d, i));
    std::vector<SatRay> rays;
    std::size_t k = 0;

    auto process = [&](const IntVector& a, bool is_eq) {
        std::size_t li = lines.size();
        Integer s;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            s = dot(a, lines[i]);
            if (s != 0) {
                li = i;
                break;
            }
        }
        if (li < lines.size()) {
            IntVector l = std::move(lines[li]);
            lines.erase(lines.begin() + static_cast<std::ptrdiff_t>(li));
            if (s < 0) {
                negate(l);
                s = -s;
            }
            for (auto& v : lines) {
                Integer t = dot(a, v);
                if (t != 0) combine(v, s, t, l);
            }
            for (auto& r : rays) {
                Integer t = dot(a, r.v);
                if (t != 0) combine(r.v, s, t, l);
                r.sat.set(k);
            }
            if (!is_eq) {
                Bits b(total);
                for (std::size_t j = 0; j < k; ++j) b.set(j);
                rays.push_back({std::move(l), std::move(b)});
            }
            ++k;
            return;
        }

        std::vector<Integer> val(rays.size());
        std::vector<std::size_t> pos, neg;
        std::vector<SatRay> next;
        for (std::size_t i = 0; i < rays.size(); ++i) {
            val[i] = dot(a, rays[i].v);
            int sg = sgn(val[i]);
            if (sg > 0)
                pos.push_back(i);
            else if (sg < 0)
                neg.push_back(i);
        }
        if (neg.empty() && (!is_eq || pos.empty())) {
            for (std::size_t i = 0; i < rays.size(); ++i)
                if (val[i] == 0) rays[i].sat.set(k);
            ++k;
            return;
        }
        for (std::size_t i = 0; i < rays.size(); ++i) {
            if (val[i] == 0) {
                rays[i].sat.set(k);
                next.push_back(rays[i]);
            } else if (val[i] > 0 && !is_eq) {
                next.push_back(rays[i]);
            }
        }
        const std::size_t free_dim = d - lines.size();
        const std::size_t need = free_dim >= 2 ? free_dim - 2 : 0;
        for (std::size_t p : pos)
            for (std::size_t n : neg) {
                Bits common = rays[p].sat & rays[n].sat;
                if (common.count() < need) continue;
                bool adjacent = true;
                for (std::size_t r = 0; r < rays.size() && adjacent; ++r)
                    if (r != p && r != n && common.is_subset_of(rays[r].sat)) adjacent = false;
                if (!adjacent) continue;
                IntVector v = rays[n].v;
                Integer tn = val[n];
                combine(v, val[p], tn, rays[p].v);
                common.set(k);
                next.push_back({std::move(v), std::move(common)});
            }
        rays = std::move(next);
        ++k;
    };

    for (const auto& e : eqs) process(e, true);
    for (const auto& i : ineqs) process(i, false);

    HomSys out;
    out.eq = std::move(lines);
    for (auto& r : rays) out.ineq.push_back(std::move(r.v));
    return out;
}

KPtr Kernel::from_cons(std::size_t m, HomSys cons) {
    auto k = std::make_shared<Kernel>(m);
    k->raw_cons_ = std::move(cons);
    return k;
}

KPtr Kernel::from_gens(std::size_t m, HomSys gens) {
    auto k = std::make_shared<Kernel>(m);
    if (!has_point(gens, m))
        k->set_empty();
    else
        k->raw_gens_ = std::move(gens);
    return k;
}

KPtr Kernel::empty(std::size_t m) {
    auto k = std::make_shared<Kernel>(m);
    k->set_empty();
    return k;
}

KPtr Kernel::universe(std::size_t m) {
    auto k = std::make_shared<Kernel>(m);
    k->min_cons_ = HomSys{};
    HomSys g;
    for (std::size_t i = 0; i < m; ++i) g.eq.push_back(unit(m + 1, i));
    g.ineq.push_back(unit(m + 1, m));
    canonicalize(m, g);
    k->min_gens_ = std::move(g);
    return k;
}

void Kernel::set_empty() const {
    if (!min_cons_) {
        IntVector c(m_ + 1, Integer(0));
        c[m_] = -1;
        min_cons_ = HomSys{{}, {std::move(c)}};
    }
    if (!min_gens_) min_gens_ = HomSys{};
}

void Kernel::compute_min_gens() const {
    if (min_gens_) return;
    const HomSys* src = min_cons_ ? &*min_cons_ : raw_cons_ ? &*raw_cons_ : nullptr;
    if (!src) {
        compute_min_cons();
        if (min_gens_) return;
        src = &*min_cons_;
    }
    auto g = cons_to_gens(m_, *src);
    if (!g)
        set_empty();
    else
        min_gens_ = std::move(*g);
}

void Kernel::compute_min_cons() const {
    if (min_cons_) return;
    const HomSys* src = min_gens_ ? &*min_gens_ : raw_gens_ ? &*raw_gens_ : nullptr;
    if (!src) {
        compute_min_gens();
        if (min_cons_) return;
        src = &*min_gens_;
    }
    if (!has_point(*src, m_)) {
        set_empty();
        return;
    }
    min_cons_ = gens_to_cons(m_, *src);
}

bool Kernel::is_empty() const { return !has_point(gens(), m_); }

const HomSys& Kernel::cons() const {
    std::lock_guard lock(mu_);
    compute_min_cons();
    return *min_cons_;
}

const HomSys& Kernel::gens() const {
    std::lock_guard lock(mu_);
    compute_min_gens();
    return *min_gens_;
}

const HomSys& Kernel::any_cons() const {
    std::lock_guard lock(mu_);
    if (min_cons_) return *min_cons_;
    if (raw_cons_) return *raw_cons_;
    compute_min_cons();
    return *min_cons_;
}

const HomSys& Kernel::any_gens() const {
    std::lock_guard lock(mu_);
    if (min_gens_) return *min_gens_;
    if (raw_gens_) return *raw_gens_;
    compute_min_gens();
    return *min_gens_;
}

bool Kernel::has_cons() const {
    std::lock_guard lock(mu_);
    return min_cons_ || raw_cons_;
}

bool sat_all(const IntVector& c, bool is_eq, const HomSys& gens) {
    for (const auto& l : gens.eq)
        if (dot(c, l) != 0) return false;
    for (const auto& g : gens.ineq) {
        Integer s = dot(c, g);
        if (is_eq ? s != 0 : s < 0) return false;
    }
    return true;
}

KPtr k_meet(const Kernel& a, const Kernel& b) {
    return Kernel::from_cons(a.space_dim(), concat(a.any_cons(), b.any_cons()));
}

KPtr k_add_cons(const Kernel& a, const HomSys& extra) {
    return Kernel::from_cons(a.space_dim(), concat(a.any_cons(), extra));
}

KPtr k_hull(const KPtr& a, const KPtr& b) {
    if (a->is_empty()) return b;
    if (b->is_empty()) return a;
    return Kernel::from_gens(a->space_dim(), concat(a->any_gens(), b->any_gens()));
}

KPtr k_add_gens(const Kernel& a, const HomSys& extra) {
    if (a.is_empty()) return Kernel::empty(a.space_dim());
    return Kernel::from_gens(a.space_dim(), concat(a.any_gens(), extra));
}

bool k_contains(const Kernel& a, const Kernel& b) {
    if (b.is_empty()) return true;
    if (a.is_empty()) return false;
    const HomSys& c = a.cons();
    const HomSys& g = b.gens();
    for (const auto& e : c.eq)
        if (!sat_all(e, true, g)) return false;
    for (const auto& i : c.ineq)
        if (!sat_all(i, false, g)) return false;
    return true;
}

KPtr k_affine_image(const Kernel& a, std::size_t k, const IntVector& e, const Integer& den) {
    const std::size_t m = a.space_dim();
    const HomSys& g = a.any_gens();
    auto map = [&](const IntVector& v) {
        IntVector w(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) w[i] = den * v[i];
        w[k] = dot(e, v);
        normalize(w);
        return w;
    };
    HomSys out;
    for (const auto& l : g.eq) {
        IntVector w = map(l);
        if (!is_zero(w)) out.eq.push_back(std::move(w));
    }
    for (const auto& r : g.ineq) {
        IntVector w = map(r);
        if (!is_zero(w)) out.ineq.push_back(std::move(w));
    }
    return Kernel::from_gens(m, std::move(out));
}

KPtr k_affine_preimage(const Kernel& a, std::size_t k, const IntVector& e, const Integer& den) {
    const HomSys& c = a.any_cons();
    auto map = [&](const IntVector& v) {
        IntVector w(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) w[i] = den * v[i] + v[k] * e[i];
        w[k] = v[k] * e[k];
        normalize(w);
        return w;
    };
    HomSys out;
    for (const auto& v : c.eq) out.eq.push_back(map(v));
    for (const auto& v : c.ineq) out.ineq.push_back(map(v));
    return Kernel::from_cons(a.space_dim(), std::move(out));
}

KPtr k_remove_dims(const Kernel& a, const std::vector<std::size_t>& dims) {
    const std::size_t m = a.space_dim();
    std::vector<bool> drop(m + 1, false);
    for (auto d : dims) drop.at(d) = true;
    std::size_t nm = m;
    for (std::size_t i = 0; i < m; ++i)
        if (drop[i]) --nm;
    if (a.is_empty()) return Kernel::empty(nm);
    const HomSys& g = a.any_gens();
    auto cut = [&](const IntVector& v) {
        IntVector w;
        w.reserve(nm + 1);
        for (std::size_t i = 0; i <= m; ++i)
            if (!drop[i]) w.push_back(v[i]);
        normalize(w);
        return w;
    };
    HomSys out;
    for (const auto& l : g.eq) {
        IntVector w = cut(l);
        if (!is_zero(w)) out.eq.push_back(std::move(w));
    }
    for (const auto& r : g.ineq) {
        IntVector w = cut(r);
        if (!is_zero(w)) out.ineq.push_back(std::move(w));
    }
    return Kernel::from_gens(nm, std::move(out));
}

KPtr k_insert_dims(const Kernel& a, std::size_t pos, std::size_t count) {
    const std::size_t m = a.space_dim();
    auto pad = [&](const IntVector& v) {
        IntVector w(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(pos));
        w.resize(pos + count, Integer(0));
        w.insert(w.end(), v.begin() + static_cast<std::ptrdiff_t>(pos), v.end());
        return w;
    };
    auto pad_all = [&](const HomSys& s) {
        HomSys out;
        for (const auto& v : s.eq) out.eq.push_back(pad(v));
        for (const auto& v : s.ineq) out.ineq.push_back(pad(v));
        return out;
    };
    if (a.has_cons()) return Kernel::from_cons(m + count, pad_all(a.any_cons()));
    HomSys g = pad_all(a.any_gens());
    for (std::size_t i = 0; i < count; ++i) g.eq.push_back(unit(m + count + 1, pos + i));
    return Kernel::from_gens(m + count, std::move(g));
}

KPtr k_map_dims(const Kernel& a, const std::vector<std::size_t>& perm) {
    const std::size_t m = a.space_dim();
    auto apply = [&](const HomSys& s) {
        HomSys out;
        auto move = [&](const IntVector& v) {
            IntVector w(v.size());
            for (std::size_t i = 0; i < m; ++i) w[perm[i]] = v[i];
            w[m] = v[m];
            return w;
        };
        for (const auto& v : s.eq) out.eq.push_back(move(v));
        for (const auto& v : s.ineq) out.ineq.push_back(move(v));
        return out;
    };
    if (a.has_cons()) return Kernel::from_cons(m, apply(a.any_cons()));
    return Kernel::from_gens(m, apply(a.any_gens()));
}

KPtr k_widen(const KPtr& a, const KPtr& b) {
    if (a->is_empty()) return b;
    const std::size_t m = a->space_dim();
    auto split = [](const HomSys& s) {
        std::vector<IntVector> out = s.ineq;
        for (const auto& e : s.eq) {
            out.push_back(e);
            IntVector n = e;
            negate(n);
            out.push_back(std::move(n));
        }
        return out;
    };
    std::vector<IntVector> psys = split(a->cons());
    std::vector<IntVector> qsys = split(b->cons());
    const HomSys& qgens = b->gens();

    HomSys result;
    for (const auto& c : psys)
        if (sat_all(c, false, qgens)) result.ineq.push_back(c);

    for (const auto& beta : qsys) {
        if (std::find(result.ineq.begin(), result.ineq.end(), beta) != result.ineq.end()) continue;
        for (std::size_t gi = 0; gi < psys.size(); ++gi) {
            HomSys trial;
            for (std::size_t j = 0; j < psys.size(); ++j)
                if (j != gi) trial.ineq.push_back(psys[j]);
            trial.ineq.push_back(beta);
            KPtr t = Kernel::from_cons(m, std::move(trial));
            if (sat_all(psys[gi], false, t->gens())) {
                result.ineq.push_back(beta);
                break;
            }
        }
    }
    return Kernel::from_cons(m, std::move(result));
}

}  // namespace polyan::detail
