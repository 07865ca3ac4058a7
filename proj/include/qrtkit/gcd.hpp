#pragma once

// Exact division, pseudo-remainders and multivariate gcd over Q.
// gcd: recursive content + subresultant PRS, with a modular shortcut
// that settles the coprime case (the usual one) without any PRS.

#include "poly.hpp"
#include "upoly.hpp"
#include "zp.hpp"

#include <optional>

namespace qrt {

struct NotDivisible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline bool try_divide(const Poly& a, const Poly& b, Poly& q) {
    if (b.is_zero()) throw std::domain_error("division by zero polynomial");
    q = Poly();
    if (a.is_zero()) return true;
    if (b.is_const()) {
        q = a.scaled(1 / b.lc());
        return true;
    }
    Poly r = a;
    std::vector<Poly::Term> qt;
    Mono m;
    while (!r.is_zero()) {
        if (!mono_div(r.lm(), b.lm(), m)) return false;
        Rat c = r.lc() / b.lc();
        qt.push_back({m, c});
        r = r - b * Poly::monomial(m, c);
    }
    q = Poly::from_sorted(std::move(qt));
    return true;
}

inline Poly divide_exact(const Poly& a, const Poly& b) {
    Poly q;
    if (!try_divide(a, b, q)) throw NotDivisible("inexact polynomial division");
    return q;
}

// --- univariate-in-v view ------------------------------------------------

using UCoeffs = std::vector<Poly>;

inline void utrim(UCoeffs& a) {
    while (!a.empty() && a.back().is_zero()) a.pop_back();
}

// lc(b)^(da-db+1) * a mod b in R[v]
inline UCoeffs uprem(UCoeffs a, const UCoeffs& b) {
    int db = int(b.size()) - 1, da = int(a.size()) - 1;
    if (da < db) return a;
    int e = da - db + 1;
    const Poly& lb = b.back();
    while (int(a.size()) - 1 >= db && !a.empty()) {
        int dr = int(a.size()) - 1;
        Poly lr = a.back();
        for (auto& x : a) x = x * lb;
        for (int j = 0; j <= db; ++j) a[dr - db + j] -= lr * b[j];
        a.pop_back();
        utrim(a);
        --e;
    }
    if (e > 0) {
        Poly f = lb.pow(unsigned(e));
        for (auto& x : a) x = x * f;
    }
    return a;
}

inline Poly prem(const Poly& a, const Poly& b, Var v) {
    auto r = uprem(a.coeffs(v), b.coeffs(v));
    return Poly::from_coeffs(v, r);
}

inline Poly gcd(const Poly& a, const Poly& b);

inline Poly content_in(const Poly& a, Var v) {
    auto cs = a.coeffs(v);
    Poly g;
    for (auto& c : cs) {
        if (c.is_zero()) continue;
        if (c.is_const()) return Poly(1);
        g = g.is_zero() ? c.primitive() : gcd(g, c);
        if (g.is_const()) return Poly(1);
    }
    return g.is_zero() ? Poly(1) : g;
}

// content with respect to a set of variables: gcd of the coefficients of all
// monomials in those variables (a polynomial in the remaining variables)
inline Poly content_wrt(const Poly& a, const std::set<Var>& vs) {
    std::map<std::vector<std::pair<Var, unsigned>>, std::vector<Poly::Term>> groups;
    for (auto& [m, c] : a.terms()) {
        std::vector<std::pair<Var, unsigned>> key;
        Mono rest;
        for (auto& p : m.e) {
            if (vs.count(p.first)) key.push_back(p);
            else rest.e.push_back(p), rest.deg += p.second;
        }
        groups[key].push_back({rest, c});
    }
    Poly g;
    for (auto& [k, t] : groups) {
        Poly c = Poly::from_terms(t);
        if (c.is_const()) return Poly(1);
        g = g.is_zero() ? c.primitive() : gcd(g, c);
        if (g.is_const()) return Poly(1);
    }
    return g.is_zero() ? Poly(1) : g;
}

namespace detail {

inline std::optional<UPoly<Zp>> image(const Poly& a, Var v, const std::map<Var, Zp>& pt) {
    std::vector<Zp> c(a.degree(v) + 1, Zp(0));
    for (auto& [m, q] : a.terms()) {
        auto z = Zp::of(q);
        if (!z) return std::nullopt;
        Zp t = *z;
        unsigned k = 0;
        for (auto& [w, e] : m.e) {
            if (w == v) k = e;
            else t *= pt.at(w).pow(std::uint64_t(e));
        }
        c[k] += t;
    }
    return UPoly<Zp>(std::move(c));
}

inline Poly pp_gcd(const Poly& pa, const Poly& pb, Var v) {
    unsigned da = pa.degree(v), db = pb.degree(v);
    // modular shortcut
    {
        std::set<Var> others = pa.vars();
        for (Var w : pb.vars()) others.insert(w);
        others.erase(v);
        SplitMix rng(0x5eed1234abcdull ^ (std::uint64_t(da) << 32) ^ db ^ (pa.size() * 31 + pb.size()));
        for (int attempt = 0; attempt < 3; ++attempt) {
            std::map<Var, Zp> pt;
            for (Var w : others) pt[w] = rng.zp();
            auto ia = image(pa, v, pt), ib = image(pb, v, pt);
            if (!ia || !ib || ia->deg() != int(da) || ib->deg() != int(db)) continue;
            auto g = UPoly<Zp>::gcd(*ia, *ib);
            if (g.deg() == 0) return Poly(1);
            Poly q;
            if (unsigned(g.deg()) == db && try_divide(pa, pb, q)) return pb;
            if (unsigned(g.deg()) == da && try_divide(pb, pa, q)) return pa;
            break;
        }
    }
    UCoeffs A = pa.coeffs(v), B = pb.coeffs(v);
    if (A.size() < B.size()) std::swap(A, B);
    Poly g(1), h(1);
    while (true) {
        int d = int(A.size()) - int(B.size());
        UCoeffs R = uprem(A, B);
        if (R.empty()) break;
        if (R.size() == 1) return Poly(1);
        A = B;
        Poly f = g * h.pow(unsigned(d));
        for (auto& x : R) x = divide_exact(x, f);
        B = std::move(R);
        g = A.back();
        if (d == 0) {
        } else if (d == 1) h = g;
        else h = divide_exact(g.pow(unsigned(d)), h.pow(unsigned(d - 1)));
    }
    Poly r = Poly::from_coeffs(v, B);
    return divide_exact(r, content_in(r, v)).primitive();
}

}  // namespace detail

inline Poly gcd(const Poly& a0, const Poly& b0) {
    if (a0.is_zero()) return b0.primitive();
    if (b0.is_zero()) return a0.primitive();
    if (a0.is_const() || b0.is_const()) return Poly(1);
    Poly a = a0, b = b0;
    for (int pass = 0; pass < 2; ++pass) {
        auto va = a.vars(), vb = b.vars();
        for (Var v : va)
            if (!vb.count(v)) {
                a = content_in(a, v);
                if (a.is_const()) return Poly(1);
            }
        for (Var v : vb)
            if (!va.count(v)) {
                b = content_in(b, v);
                if (b.is_const()) return Poly(1);
            }
    }
    auto va = a.vars();
    Var best = *va.begin();
    unsigned bd = ~0u;
    for (Var v : va) {
        unsigned d = std::max(a.degree(v), b.degree(v));
        if (d < bd) bd = d, best = v;
    }
    Poly ca = content_in(a, best), cb = content_in(b, best);
    Poly gc = gcd(ca, cb);
    Poly pa = divide_exact(a, ca), pb = divide_exact(b, cb);
    Poly gp = detail::pp_gcd(pa, pb, best);
    return (gc * gp).primitive();
}

// divide out every power of f; returns multiplicity removed
inline unsigned remove_factor(Poly& a, const Poly& f) {
    if (f.is_const() || a.is_zero()) return 0;
    unsigned k = 0;
    Poly q;
    while (try_divide(a, f, q)) a = q, ++k;
    return k;
}

// exact square root, if a is a perfect square
inline bool poly_sqrt(const Poly& a, Poly& s) {
    s = Poly();
    if (a.is_zero()) return true;
    const Mono& m = a.lm();
    Mono h;
    for (auto& [v, k] : m.e) {
        if (k % 2) return false;
        h.e.push_back({v, k / 2});
    }
    h.deg = m.deg / 2;
    Rat c = a.lc();
    if (c < 0) return false;
    Int n = c.get_num(), d = c.get_den(), rn, rd;
    if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return false;
    mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
    s = Poly::monomial(h, Rat(rn, rd));
    Poly lead2 = s.scaled(2);
    Poly r = a - s * s;
    for (size_t it = 0; !r.is_zero() && it < 2 * a.size() + 64; ++it) {
        Mono q;
        if (!mono_div(r.lm(), lead2.lm(), q)) return false;
        Poly t = Poly::monomial(q, r.lc() / lead2.lc());
        if (mono_cmp(q, h) >= 0) return false;
        r = r - (s.scaled(2) + t) * t;
        s += t;
    }
    return r.is_zero();
}

}  // namespace qrt
