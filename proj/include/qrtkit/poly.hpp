#pragma once

// Sparse multivariate polynomials over Q, grlex order, terms kept descending.

#include "rat.hpp"
#include "vars.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <utility>
#include <vector>

namespace qrt {

struct ResourceLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr unsigned kMaxDegree = 512;
inline constexpr size_t kMaxTerms = 2000000;

struct Mono {
    std::vector<std::pair<Var, unsigned>> e;  // sorted by var id, exponents > 0
    unsigned deg = 0;

    bool is_one() const { return e.empty(); }
    unsigned exp(Var v) const {
        for (auto& [w, k] : e)
            if (w == v) return k;
        return 0;
    }
    bool operator==(const Mono& o) const { return deg == o.deg && e == o.e; }

    static Mono of(Var v, unsigned k = 1) {
        Mono m;
        if (k) m.e.push_back({v, k}), m.deg = k;
        return m;
    }
};

// >0 if a>b in grlex with smaller var id more significant
inline int mono_cmp(const Mono& a, const Mono& b) {
    if (a.deg != b.deg) return a.deg < b.deg ? -1 : 1;
    size_t n = std::min(a.e.size(), b.e.size());
    for (size_t i = 0; i < n; ++i) {
        if (a.e[i].first != b.e[i].first) return a.e[i].first < b.e[i].first ? 1 : -1;
        if (a.e[i].second != b.e[i].second) return a.e[i].second > b.e[i].second ? 1 : -1;
    }
    return 0;
}

inline Mono mono_mul(const Mono& a, const Mono& b) {
    Mono r;
    r.e.reserve(a.e.size() + b.e.size());
    size_t i = 0, j = 0;
    while (i < a.e.size() || j < b.e.size()) {
        if (j == b.e.size() || (i < a.e.size() && a.e[i].first < b.e[j].first)) r.e.push_back(a.e[i++]);
        else if (i == a.e.size() || b.e[j].first < a.e[i].first) r.e.push_back(b.e[j++]);
        else {
            r.e.push_back({a.e[i].first, a.e[i].second + b.e[j].second});
            ++i, ++j;
        }
    }
    r.deg = a.deg + b.deg;
    return r;
}

// a/b if b divides a
inline bool mono_div(const Mono& a, const Mono& b, Mono& q) {
    q.e.clear();
    size_t i = 0, j = 0;
    while (j < b.e.size()) {
        while (i < a.e.size() && a.e[i].first < b.e[j].first) q.e.push_back(a.e[i++]);
        if (i == a.e.size() || a.e[i].first != b.e[j].first || a.e[i].second < b.e[j].second) return false;
        if (a.e[i].second > b.e[j].second) q.e.push_back({a.e[i].first, a.e[i].second - b.e[j].second});
        ++i, ++j;
    }
    while (i < a.e.size()) q.e.push_back(a.e[i++]);
    q.deg = a.deg - b.deg;
    return true;
}

struct MonoHash {
    size_t operator()(const Mono& m) const {
        size_t h = m.deg * 0x9e3779b97f4a7c15ull;
        for (auto& [v, k] : m.e) h = (h ^ (v * 1000003u + k)) * 0x100000001b3ull;
        return h;
    }
};

class Poly {
public:
    using Term = std::pair<Mono, Rat>;

    Poly() = default;
    Poly(const Rat& c) {
        if (c != 0) t_.push_back({Mono{}, c});
    }
    Poly(long c) : Poly(Rat(c)) {}
    Poly(int c) : Poly(Rat(c)) {}
    static Poly variable(Var v, unsigned k = 1) {
        Poly p;
        p.t_.push_back({Mono::of(v, k), Rat(1)});
        return p;
    }
    static Poly variable(const std::string& name) { return variable(var(name)); }
    static Poly monomial(const Mono& m, const Rat& c) {
        Poly p;
        if (c != 0) p.t_.push_back({m, c});
        return p;
    }
    // terms must be sorted descending, nonzero, distinct
    static Poly from_sorted(std::vector<Term> t) {
        Poly p;
        p.t_ = std::move(t);
        p.guard();
        return p;
    }
    static Poly from_terms(std::vector<Term> t) {
        std::sort(t.begin(), t.end(), [](const Term& a, const Term& b) { return mono_cmp(a.first, b.first) > 0; });
        std::vector<Term> out;
        for (auto& x : t) {
            if (!out.empty() && out.back().first == x.first) out.back().second += x.second;
            else {
                if (!out.empty() && out.back().second == 0) out.pop_back();
                out.push_back(std::move(x));
            }
        }
        if (!out.empty() && out.back().second == 0) out.pop_back();
        return from_sorted(std::move(out));
    }

    const std::vector<Term>& terms() const { return t_; }
    size_t size() const { return t_.size(); }
    bool is_zero() const { return t_.empty(); }
    bool is_const() const { return t_.empty() || (t_.size() == 1 && t_[0].first.is_one()); }
    Rat const_value() const { return t_.empty() ? Rat(0) : (t_.back().first.is_one() ? t_.back().second : Rat(0)); }
    const Rat& lc() const { return t_.front().second; }
    const Mono& lm() const { return t_.front().first; }
    unsigned total_degree() const { return t_.empty() ? 0 : t_.front().first.deg; }

    unsigned degree(Var v) const {
        unsigned d = 0;
        for (auto& [m, c] : t_) d = std::max(d, m.exp(v));
        return d;
    }
    bool has(Var v) const {
        for (auto& [m, c] : t_)
            if (m.exp(v)) return true;
        return false;
    }
    std::set<Var> vars() const {
        std::set<Var> s;
        for (auto& [m, c] : t_)
            for (auto& [v, k] : m.e) s.insert(v);
        return s;
    }

    bool operator==(const Poly& o) const {
        if (t_.size() != o.t_.size()) return false;
        for (size_t i = 0; i < t_.size(); ++i)
            if (!(t_[i].first == o.t_[i].first) || t_[i].second != o.t_[i].second) return false;
        return true;
    }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    Poly operator-() const {
        Poly r = *this;
        for (auto& x : r.t_) x.second = -x.second;
        return r;
    }
    friend Poly operator+(const Poly& a, const Poly& b) { return merge(a, b, 1); }
    friend Poly operator-(const Poly& a, const Poly& b) { return merge(a, b, -1); }
    Poly& operator+=(const Poly& b) { return *this = *this + b; }
    Poly& operator-=(const Poly& b) { return *this = *this - b; }
    Poly& operator*=(const Poly& b) { return *this = *this * b; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        if (a.is_const()) return b.scaled(a.lc());
        if (b.is_const()) return a.scaled(b.lc());
        if (size_t(a.total_degree()) + b.total_degree() > kMaxDegree) throw ResourceLimit("degree guard: total degree exceeds 512");
        if (a.size() == 1 || b.size() == 1) {
            const Poly& s = a.size() == 1 ? a : b;
            const Poly& o = a.size() == 1 ? b : a;
            std::vector<Term> t;
            t.reserve(o.size());
            for (auto& [m, c] : o.t_) t.push_back({mono_mul(m, s.t_[0].first), c * s.t_[0].second});
            return from_sorted(std::move(t));  // monomial multiplication preserves order
        }
        std::unordered_map<Mono, Rat, MonoHash> acc;
        acc.reserve(a.size() * b.size());
        Rat tmp;
        for (auto& [ma, ca] : a.t_)
            for (auto& [mb, cb] : b.t_) {
                tmp = ca * cb;
                auto [it, fresh] = acc.try_emplace(mono_mul(ma, mb), tmp);
                if (!fresh) it->second += tmp;
            }
        std::vector<Term> t;
        t.reserve(acc.size());
        for (auto& [m, c] : acc)
            if (c != 0) t.push_back({m, c});
        std::sort(t.begin(), t.end(), [](const Term& x, const Term& y) { return mono_cmp(x.first, y.first) > 0; });
        return from_sorted(std::move(t));
    }

    Poly scaled(const Rat& c) const {
        if (c == 0) return Poly();
        Poly r = *this;
        for (auto& x : r.t_) x.second *= c;
        return r;
    }

    Poly pow(unsigned k) const {
        Poly r(1), b = *this;
        while (k) {
            if (k & 1) r = r * b;
            k >>= 1;
            if (k) b = b * b;
        }
        return r;
    }

    // coefficients w.r.t. v: result[i] is the coefficient of v^i
    std::vector<Poly> coeffs(Var v) const {
        std::vector<std::vector<Term>> buckets(degree(v) + 1);
        for (auto& [m, c] : t_) {
            unsigned k = m.exp(v);
            Mono r;
            if (k) {
                for (auto& p : m.e)
                    if (p.first != v) r.e.push_back(p);
                r.deg = m.deg - k;
            } else r = m;
            buckets[k].push_back({std::move(r), c});
        }
        std::vector<Poly> out;
        for (auto& b : buckets) out.push_back(from_sorted(std::move(b)));  // removing one var keeps relative order
        return out;
    }
    Poly coeff(Var v, unsigned k) const {
        auto c = coeffs(v);
        return k < c.size() ? c[k] : Poly();
    }
    static Poly from_coeffs(Var v, const std::vector<Poly>& c) {
        Poly r;
        for (size_t i = 0; i < c.size(); ++i)
            if (!c[i].is_zero()) r += c[i] * variable(v, unsigned(i));
        return r;
    }
    // coefficient of an exact monomial in the given variables (others kept)
    Poly coeff_of(const Mono& m, const std::set<Var>& in) const {
        std::vector<Term> t;
        for (auto& [mm, c] : t_) {
            bool ok = true;
            Mono rest;
            for (auto& [v, k] : mm.e) {
                if (in.count(v)) {
                    if (m.exp(v) != k) ok = false;
                } else rest.e.push_back({v, k}), rest.deg += k;
            }
            for (auto& [v, k] : m.e)
                if (mm.exp(v) != k) ok = false;
            if (ok) t.push_back({std::move(rest), c});
        }
        return from_terms(std::move(t));
    }

    Poly diff(Var v) const {
        std::vector<Term> t;
        for (auto& [m, c] : t_) {
            unsigned k = m.exp(v);
            if (!k) continue;
            Mono r;
            for (auto& p : m.e)
                if (p.first != v) r.e.push_back(p);
                else if (k > 1) r.e.push_back({v, k - 1});
            r.deg = m.deg - 1;
            t.push_back({r, c * k});
        }
        return from_terms(std::move(t));
    }

    // full or partial evaluation
    Poly eval(const std::map<Var, Rat>& pt) const {
        std::vector<Term> t;
        for (auto& [m, c] : t_) {
            Rat cc = c;
            Mono r;
            for (auto& [v, k] : m.e) {
                auto it = pt.find(v);
                if (it != pt.end()) cc *= rat_pow(it->second, long(k));
                else r.e.push_back({v, k}), r.deg += k;
            }
            if (cc != 0) t.push_back({std::move(r), cc});
        }
        return from_terms(std::move(t));
    }
    Rat value(const std::map<Var, Rat>& pt) const {
        Rat s = 0;
        for (auto& [m, c] : t_) {
            Rat cc = c;
            for (auto& [v, k] : m.e) {
                auto it = pt.find(v);
                if (it == pt.end()) throw std::invalid_argument("unassigned variable " + var_name(v));
                cc *= rat_pow(it->second, long(k));
            }
            s += cc;
        }
        return s;
    }

    // substitute polynomials for variables (simultaneous)
    Poly subs(const std::map<Var, Poly>& s) const {
        std::map<std::pair<Var, unsigned>, Poly> cache;
        auto pw = [&](Var v, unsigned k) -> const Poly& {
            auto key = std::make_pair(v, k);
            auto it = cache.find(key);
            if (it != cache.end()) return it->second;
            return cache.emplace(key, s.at(v).pow(k)).first->second;
        };
        Poly r;
        std::vector<Term> keep;
        std::vector<Poly> parts;
        for (auto& [m, c] : t_) {
            Mono rest;
            Poly f(c);
            bool touched = false;
            for (auto& [v, k] : m.e) {
                if (s.count(v)) f = f * pw(v, k), touched = true;
                else rest.e.push_back({v, k}), rest.deg += k;
            }
            if (!touched) keep.push_back({m, c});
            else parts.push_back(f * monomial(rest, 1));
        }
        r = from_terms(std::move(keep));
        for (auto& p : parts) r += p;
        return r;
    }

    Poly rename(const std::map<Var, Var>& ren) const {
        std::vector<Term> t;
        for (auto& [m, c] : t_) {
            std::map<Var, unsigned> e;
            for (auto& [v, k] : m.e) {
                auto it = ren.find(v);
                e[it == ren.end() ? v : it->second] += k;
            }
            Mono r;
            for (auto& [v, k] : e) r.e.push_back({v, k});
            r.deg = m.deg;
            t.push_back({r, c});
        }
        return from_terms(std::move(t));
    }
    // shift every indexed variable by k
    Poly shift(int k) const {
        if (k == 0) return *this;
        std::map<Var, Var> ren;
        for (Var v : vars()) ren[v] = shifted(v, k);
        return rename(ren);
    }

    // rational content: positive c with *this / c integral primitive
    Rat content() const {
        if (t_.empty()) return Rat(0);
        Int g = 0, l = 1;
        for (auto& [m, c] : t_) {
            g = gcd(g, c.get_num());
            l = lcm(l, c.get_den());
        }
        Rat r(g, l);
        r.canonicalize();
        return r;
    }
    // integral, primitive, positive leading coefficient
    Poly primitive() const {
        if (t_.empty()) return *this;
        Rat c = content();
        if (lc() < 0) c = -c;
        return scaled(1 / c);
    }
    Poly monic() const { return t_.empty() ? *this : scaled(1 / lc()); }

    std::string str() const {
        if (t_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto& [m, c] : t_) {
            Rat a = c;
            if (!first) os << (a < 0 ? " - " : " + ");
            else if (a < 0) os << "-";
            if (a < 0) a = -a;
            first = false;
            bool one = (a == 1);
            if (!one || m.is_one()) os << a.get_str();
            bool star = !one;
            for (auto& [v, k] : m.e) {
                if (star) os << "*";
                os << var_name(v);
                if (k > 1) os << "^" << k;
                star = true;
            }
        }
        return os.str();
    }

private:
    std::vector<Term> t_;

    void guard() const {
        if (t_.size() > kMaxTerms) throw ResourceLimit("degree guard: term count exceeds 2e6");
        if (!t_.empty() && t_.front().first.deg > kMaxDegree) throw ResourceLimit("degree guard: total degree exceeds 512");
    }

    static Poly merge(const Poly& a, const Poly& b, int sign) {
        std::vector<Term> t;
        t.reserve(a.size() + b.size());
        size_t i = 0, j = 0;
        while (i < a.t_.size() || j < b.t_.size()) {
            int c = i == a.t_.size() ? -1 : j == b.t_.size() ? 1 : mono_cmp(a.t_[i].first, b.t_[j].first);
            if (c > 0) t.push_back(a.t_[i++]);
            else if (c < 0) {
                t.push_back(b.t_[j++]);
                if (sign < 0) t.back().second = -t.back().second;
            } else {
                Rat s = a.t_[i].second;
                if (sign > 0) s += b.t_[j].second;
                else s -= b.t_[j].second;
                if (s != 0) t.push_back({a.t_[i].first, s});
                ++i, ++j;
            }
        }
        return from_sorted(std::move(t));
    }
};

inline Poly pvar(const std::string& name) { return Poly::variable(name); }
inline Poly pvar(const std::string& base, int shift) { return Poly::variable(ivar(base, shift)); }

}  // namespace qrt
