#pragma once

// Rational functions in canonical form: gcd(num, den) = 1, den integral
// primitive with positive leading coefficient.

#include "gcd.hpp"

namespace qrt {

struct ZeroDenominator : std::domain_error {
    ZeroDenominator() : std::domain_error("zero denominator") {}
};
struct DegeneratePoints : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EvalResult {
    enum Kind { Value, Pole, Indeterminate } kind = Value;
    Rat value;
    bool ok() const { return kind == Value; }
};

class RatFunc {
public:
    RatFunc() : d_(1) {}
    RatFunc(const Poly& p) : n_(p), d_(1) {}
    RatFunc(const Rat& c) : n_(c), d_(1) {}
    RatFunc(long c) : n_(c), d_(1) {}
    RatFunc(int c) : n_(c), d_(1) {}

    static RatFunc normalize(Poly n, Poly d) {
        if (d.is_zero()) throw ZeroDenominator();
        RatFunc r;
        if (n.is_zero()) return r;
        Poly g = gcd(n, d);
        if (!g.is_const()) {
            n = divide_exact(n, g);
            d = divide_exact(d, g);
        }
        Rat c = d.content();
        if (d.lc() < 0) c = -c;
        r.n_ = n.scaled(1 / c);
        r.d_ = d.scaled(1 / c);
        return r;
    }
    // no gcd, no scaling: used to show what normalization does
    static RatFunc raw(Poly n, Poly d) {
        if (d.is_zero()) throw ZeroDenominator();
        RatFunc r;
        r.n_ = std::move(n);
        r.d_ = std::move(d);
        return r;
    }
    static RatFunc variable(Var v) { return RatFunc(Poly::variable(v)); }
    static RatFunc variable(const std::string& s) { return RatFunc(Poly::variable(s)); }

    const Poly& num() const { return n_; }
    const Poly& den() const { return d_; }
    bool is_zero() const { return n_.is_zero(); }
    bool is_poly() const { return d_.is_const(); }
    bool is_const() const { return n_.is_const() && d_.is_const(); }
    Rat const_value() const { return n_.const_value() / d_.const_value(); }
    std::set<Var> vars() const {
        auto s = n_.vars();
        for (Var v : d_.vars()) s.insert(v);
        return s;
    }
    unsigned degree(Var v) const { return std::max(n_.degree(v), d_.degree(v)); }

    friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        if (a.d_ == b.d_) return normalize(a.n_ + b.n_, a.d_);
        if (a.is_poly() && b.is_poly()) return normalize(a.n_.scaled(1 / a.d_.lc()) + b.n_.scaled(1 / b.d_.lc()), Poly(1));
        return normalize(a.n_ * b.d_ + b.n_ * a.d_, a.d_ * b.d_);
    }
    RatFunc operator-() const {
        RatFunc r = *this;
        r.n_ = -r.n_;
        return r;
    }
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
        if (a.is_zero() || b.is_zero()) return RatFunc();
        // cross-cancel first: keeps intermediate sizes down
        Poly g1 = gcd(a.n_, b.d_), g2 = gcd(b.n_, a.d_);
        Poly an = divide_exact(a.n_, g1), bd = divide_exact(b.d_, g1);
        Poly bn = divide_exact(b.n_, g2), ad = divide_exact(a.d_, g2);
        Poly n = an * bn, d = ad * bd;
        Rat c = d.content();
        if (d.lc() < 0) c = -c;
        RatFunc r;
        r.n_ = n.scaled(1 / c);
        r.d_ = d.scaled(1 / c);
        return r;
    }
    RatFunc inv() const {
        if (is_zero()) throw ZeroDenominator();
        return normalize(d_, n_);
    }
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b) { return a * b.inv(); }
    RatFunc& operator+=(const RatFunc& b) { return *this = *this + b; }
    RatFunc& operator-=(const RatFunc& b) { return *this = *this - b; }
    RatFunc& operator*=(const RatFunc& b) { return *this = *this * b; }
    RatFunc& operator/=(const RatFunc& b) { return *this = *this / b; }

    RatFunc pow(int k) const {
        if (k < 0) return inv().pow(-k);
        RatFunc r;
        r.n_ = n_.pow(unsigned(k));
        r.d_ = d_.pow(unsigned(k));
        return r;  // coprime powers stay coprime
    }

    bool operator==(const RatFunc& o) const { return n_ == o.n_ && d_ == o.d_; }
    bool operator!=(const RatFunc& o) const { return !(*this == o); }

    // simultaneous substitution v -> P/Q, homogenized so that only one
    // normalization is needed at the end
    RatFunc subs(const std::map<Var, RatFunc>& s) const {
        std::map<Var, unsigned> e;
        for (auto& [v, f] : s) {
            unsigned k = degree(v);
            if (k) e[v] = k;
        }
        if (e.empty()) return *this;
        std::map<std::pair<Var, unsigned>, Poly> cn, cd;
        auto pw = [](std::map<std::pair<Var, unsigned>, Poly>& c, Var v, unsigned k, const Poly& base) -> const Poly& {
            auto key = std::make_pair(v, k);
            auto it = c.find(key);
            if (it != c.end()) return it->second;
            return c.emplace(key, base.pow(k)).first->second;
        };
        auto apply = [&](const Poly& p) {
            Poly out;
            std::vector<Poly::Term> plain;
            for (auto& [m, c] : p.terms()) {
                Mono rest;
                Poly f(c);
                std::map<Var, unsigned> used;
                for (auto& [v, k] : m.e) {
                    if (e.count(v)) used[v] = k;
                    else rest.e.push_back({v, k}), rest.deg += k;
                }
                for (auto& [v, top] : e) {
                    unsigned k = used.count(v) ? used[v] : 0;
                    const RatFunc& r = s.at(v);
                    if (k) f = f * pw(cn, v, k, r.n_);
                    if (top - k) f = f * pw(cd, v, top - k, r.d_);
                }
                out += f * Poly::monomial(rest, 1);
            }
            return out;
        };
        return normalize(apply(n_), apply(d_));
    }
    RatFunc subs(Var v, const RatFunc& f) const { return subs(std::map<Var, RatFunc>{{v, f}}); }
    RatFunc rename(const std::map<Var, Var>& r) const { return raw(n_.rename(r), d_.rename(r)).renorm(); }
    RatFunc shift(int k) const { return raw(n_.shift(k), d_.shift(k)).renorm(); }
    RatFunc diff(Var v) const { return normalize(n_.diff(v) * d_ - n_ * d_.diff(v), d_ * d_); }

    EvalResult eval(const std::map<Var, Rat>& pt) const {
        Rat dv = d_.value(pt), nv = n_.value(pt);
        if (dv == 0) return {nv == 0 ? EvalResult::Indeterminate : EvalResult::Pole, Rat(0)};
        return {EvalResult::Value, nv / dv};
    }
    RatFunc eval_partial(const std::map<Var, Rat>& pt) const { return normalize(n_.eval(pt), d_.eval(pt)); }

    std::string str() const {
        if (d_.is_const() && d_.lc() == 1) return n_.str();
        return "(" + n_.str() + ")/(" + d_.str() + ")";
    }

private:
    Poly n_, d_;
    RatFunc renorm() const { return normalize(n_, d_); }
};

inline RatFunc rvar(const std::string& s) { return RatFunc::variable(s); }

inline bool rf_equal(const RatFunc& f, const RatFunc& g) { return f.num() * g.den() == g.num() * f.den(); }

// Schwartz-Zippel style check at random rational points (bounded height).
inline bool rf_random_identity_check(const RatFunc& f, const RatFunc& g, int trials, long coeff_bound,
                                     std::uint64_t seed = 1) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    auto vs = f.vars();
    for (Var v : g.vars()) vs.insert(v);
    SplitMix rng(seed);
    int good = 0, bad = 0;
    while (good < trials) {
        std::map<Var, Rat> pt;
        for (Var v : vs) {
            Rat r(rng.range(-coeff_bound, coeff_bound), rng.range(1, coeff_bound));
            r.canonicalize();
            pt[v] = r;
        }
        auto a = f.eval(pt), b = g.eval(pt);
        if (!a.ok() || !b.ok()) {
            if (++bad > 10 * trials) throw DegeneratePoints("too many sample points hit poles");
            continue;
        }
        if (a.value != b.value) return false;
        ++good;
    }
    return true;
}

}  // namespace qrt
