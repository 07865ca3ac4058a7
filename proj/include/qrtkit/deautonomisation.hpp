#pragma once

// Singularity confinement over F_p with an epsilon-deformed entry, and degree
// growth of iterates in one symbolic initial condition.

#include "mappings.hpp"
#include "series.hpp"
#include "upoly.hpp"

#include <cmath>

namespace qrt {

struct ConfinementProbe {
    RatFunc entry;       // singular value of z_k, may depend on parameters
    long k = 2;          // half-step index of the entry
    long horizon = 30;   // half-steps after the entry
    size_t precision = 40;
    Rat u1 = Rat(3, 7), u2 = Rat(5, 11);  // two samples of the free initial datum
};

struct ConfinementReport {
    enum Verdict { Confined, NotConfined, Exhausted };
    Verdict verdict = NotConfined;
    long length = -1;           // half-steps from entry to recovery
    long length_minus = -1;     // same with -eps
    std::vector<std::string> pattern;  // eps^0 values: 0, inf or a residue

    std::string verdict_str() const {
        return verdict == Confined ? "CONFINED" : verdict == NotConfined ? "NOT_CONFINED" : "RESOURCE_LIMIT";
    }
};

inline constexpr std::uint64_t kLawBase = 2718281;  // generic base for multiplicative laws mod p

namespace detail {

inline Zp zp_of(const Rat& q) {
    auto z = Zp::of(q);
    if (!z) throw ResourceLimit("rational not invertible mod p");
    return *z;
}

template <class T, class Make>
std::map<Var, T> law_point(const System& s, const RatFunc& f, long n, Make make) {
    std::map<Var, T> pt;
    s.bind_params<T>(f, n, pt, [&](const ParamSeq& p, long m) { return make(p.value_mod(m, Zp(kLawBase))); });
    return pt;
}

// eps^0 values of z_k, ..., z_{k+horizon}
inline std::vector<Series> deformed_orbit(const System& s, const ConfinementProbe& pr, const Rat& u, int sign) {
    size_t P = pr.precision;
    auto mk = [&](Zp a) { return Series::constant(a, P); };
    auto conv = [&](const Rat& c) { return mk(zp_of(c)); };
    auto h0 = s.half(pr.k);
    auto ept = law_point<Zp>(s, pr.entry, h0.n, [](Zp a) { return a; });
    Zp ev = eval_poly<Zp>(pr.entry.num(), ept, [](const Rat& c) { return zp_of(c); }, Zp(0)) /
            eval_poly<Zp>(pr.entry.den(), ept, [](const Rat& c) { return zp_of(c); }, Zp(0));
    Series prev = mk(zp_of(u)), cur = mk(ev) + Series::eps(P).scaled(Zp(sign));
    std::vector<Series> zs{prev, cur};
    for (long j = 0; j < pr.horizon; ++j) {
        long k = pr.k + j;
        auto h = s.half(k);
        auto pt = law_point<Series>(s, *h.fwd, h.n, mk);
        pt[h.cur] = zs.back();
        pt[h.prev] = zs[zs.size() - 2];
        Series num = eval_poly<Series>(h.fwd->num(), pt, conv, Series());
        Series den = eval_poly<Series>(h.fwd->den(), pt, conv, Series());
        if (den.exact_zero()) throw PrecisionLoss();
        zs.push_back(num.exact_zero() ? Series() : num / den);
    }
    return zs;
}

inline std::string show(const Series& x) {
    switch (x.kind()) {
        case Series::Zero: return "0";
        case Series::Infinite: return "inf";
        default: return std::to_string(x.lead0().v);
    }
}

// first index where two consecutive entries are finite and the newer one
// remembers the initial datum; returns the length in half-steps or -1
inline long recovery(const std::vector<Series>& a, const std::vector<Series>& b) {
    for (size_t j = 2; j < a.size(); ++j) {
        bool fin = a[j].kind() != Series::Infinite && a[j - 1].kind() != Series::Infinite;
        if (!fin) continue;
        if (!(a[j].lead0() == b[j].lead0()) || a[j].kind() != b[j].kind()) return long(j) - 1;
    }
    return -1;
}

}  // namespace detail

inline ConfinementReport confinement_check(const System& s, const ConfinementProbe& pr) {
    ConfinementReport rep;
    try {
        long len[2];
        for (int d = 0; d < 2; ++d) {
            int sign = d == 0 ? 1 : -1;
            auto a = detail::deformed_orbit(s, pr, pr.u1, sign), b = detail::deformed_orbit(s, pr, pr.u2, sign);
            len[d] = detail::recovery(a, b);
            if (d == 0)
                for (auto& x : a) rep.pattern.push_back(detail::show(x));
        }
        rep.length = len[0], rep.length_minus = len[1];
        if (len[0] >= 0 && len[1] >= 0) rep.verdict = ConfinementReport::Confined;
    } catch (const PrecisionLoss&) {
        rep.verdict = ConfinementReport::Exhausted;
    }
    return rep;
}

// ---------------------------------------------------------------------------

struct RatFuncP {
    UPoly<Zp> n, d;
    RatFuncP() : n(), d(UPoly<Zp>::constant(Zp(1))) {}
    RatFuncP(UPoly<Zp> a, UPoly<Zp> b) {
        if (b.is_zero()) throw ResourceLimit("division by zero in degree growth");
        auto g = UPoly<Zp>::gcd(a, b);
        UPoly<Zp> q, r;
        UPoly<Zp>::divmod(a, g, n, r);
        UPoly<Zp>::divmod(b, g, d, r);
        Zp l = d.lc().inv();
        n = n.scaled(l), d = d.scaled(l);
    }
    static RatFuncP constant(Zp a) { return RatFuncP(UPoly<Zp>::constant(a), UPoly<Zp>::constant(Zp(1))); }
    int degree() const { return std::max(n.deg(), d.deg()); }
    bool is_zero() const { return n.is_zero(); }
    friend RatFuncP operator+(const RatFuncP& a, const RatFuncP& b) { return RatFuncP(a.n * b.d + b.n * a.d, a.d * b.d); }
    friend RatFuncP operator*(const RatFuncP& a, const RatFuncP& b) { return RatFuncP(a.n * b.n, a.d * b.d); }
    friend RatFuncP operator/(const RatFuncP& a, const RatFuncP& b) { return RatFuncP(a.n * b.d, a.d * b.n); }
};

struct DegreeGrowth {
    std::vector<int> degrees;  // of z_{k0-1}, z_{k0}, ...
    std::string classification;  // bounded, polynomial or exponential
    double entropy = 0;          // log of the last growth ratio
};

inline std::string classify_growth(const std::vector<int>& d) {
    if (d.size() < 6) return "undetermined";
    size_t n = d.size();
    bool flat = true;
    for (size_t i = n - 5; i < n; ++i) flat &= d[i] == d[n - 1];
    if (flat) return "bounded";
    bool expo = true;
    for (size_t i = n - 4; i < n; ++i) expo &= d[i - 1] > 0 && double(d[i]) / d[i - 1] > 1.2;
    return expo ? "exponential" : "polynomial";
}

inline DegreeGrowth degree_growth(const System& s, long N, long k0 = 1) {
    auto mk = [](Zp a) { return RatFuncP::constant(a); };
    auto conv = [&](const Rat& c) { return mk(detail::zp_of(c)); };
    RatFuncP x0 = mk(Zp(3));
    RatFuncP x1(UPoly<Zp>(std::vector<Zp>{Zp(3), Zp(2)}), UPoly<Zp>(std::vector<Zp>{Zp(5), Zp(1)}));
    std::vector<RatFuncP> zs{x0, x1};
    DegreeGrowth g;
    g.degrees = {x0.degree(), x1.degree()};
    for (long j = 0; j + 1 < N; ++j) {
        long k = k0 + j;
        auto h = s.half(k);
        auto pt = detail::law_point<RatFuncP>(s, *h.fwd, h.n, mk);
        pt[h.cur] = zs.back();
        pt[h.prev] = zs[zs.size() - 2];
        RatFuncP num = eval_poly<RatFuncP>(h.fwd->num(), pt, conv, RatFuncP());
        RatFuncP den = eval_poly<RatFuncP>(h.fwd->den(), pt, conv, RatFuncP());
        if (den.is_zero()) throw ResourceLimit("orbit meets a singularity in degree growth");
        zs.push_back(num / den);
        g.degrees.push_back(zs.back().degree());
    }
    g.classification = classify_growth(g.degrees);
    size_t n = g.degrees.size();
    if (n >= 2 && g.degrees[n - 2] > 0) g.entropy = std::log(double(g.degrees[n - 1]) / g.degrees[n - 2]);
    return g;
}

}  // namespace qrt
