#pragma once

// Single-variable three-point equations from asymmetric systems.

#include "homography.hpp"

namespace qrt {

struct ThreePointEquation {
    Poly rel;                 // in base[n+1], base[n], base[n-1] (primitive)
    std::string base = "x";
    std::vector<std::string> removed;  // spurious factors divided out
    bool reducible = false;            // more than one factor survives the orbit test

    std::string str() const { return rel.str() + " = 0"; }
};

namespace detail {

// plain parameters with non-constant laws are turned into indexed ones so
// that shifting a relation moves them along
inline std::map<Var, Var> index_params(const System& s) {
    std::map<Var, Var> ren;
    for (auto& b : s.parameters()) {
        auto it = s.laws.find(b);
        if (it == s.laws.end() || it->second.autonomous()) continue;
        if (Registry::instance().known(b)) ren[var(b)] = ivar(b, 0);
    }
    return ren;
}

// half-step index of base[n+j]
inline long slot_index(const System& s, bool keep_x, long n, int j) {
    if (s.symmetric_kind()) return n + j;
    return keep_x ? 2 * (n + j) : 2 * (n + j) + 1;
}

// values of the kept variable along an orbit, with the step index
struct Sample {
    long n;
    Rat p, c, m;
};

inline System with_random_params(const System& s, const Poly& extra, SplitMix& rng) {
    System sp = s;
    auto fill = [&](const std::string& b) {
        if (!sp.laws.count(b)) sp.laws[b] = ParamSeq::constant(Rat(rng.range(3, 50), rng.range(1, 9)));
    };
    for (auto& b : s.parameters()) fill(b);
    for (Var v : extra.vars())
        if (!s.is_dynamic(v)) fill(split_index(var_name(v)).base);
    return sp;
}

inline std::vector<Sample> orbit_samples(const System& sp, bool keep_x, size_t want, SplitMix& rng) {
    std::vector<Sample> out;
    for (int t = 0; t < 40 && out.size() < want; ++t) {
        Rat a(rng.range(-30, 30), rng.range(1, 11)), b(rng.range(-30, 30), rng.range(1, 11));
        a.canonicalize(), b.canonicalize();
        long n0 = rng.range(-3, 3);
        Orbit o = iterate_steps(sp, a, b, n0, 6);
        for (long n = n0 + 1; n <= n0 + 4 && out.size() < want; ++n) {
            long kp = slot_index(sp, keep_x, n, 1), kc = slot_index(sp, keep_x, n, 0), km = slot_index(sp, keep_x, n, -1);
            if (o.has(kp) && o.has(kc) && o.has(km)) out.push_back({n, o.at(kp), o.at(kc), o.at(km)});
        }
    }
    return out;
}

inline std::optional<Rat> eval_on(const System& sp, const Poly& f, const std::string& base, const Sample& s) {
    auto pt = sp.rat_params(RatFunc(f), s.n);
    pt[ivar(base, 1)] = s.p, pt[ivar(base, 0)] = s.c, pt[ivar(base, -1)] = s.m;
    try {
        return f.value(pt);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace detail

inline ThreePointEquation eliminate(const System& s, char keep, std::uint64_t seed = 5) {
    if (s.symmetric_kind()) throw std::invalid_argument("eliminate: system is already single-variable");
    if (keep != 'x' && keep != 'y') throw std::invalid_argument("eliminate: keep must be x or y");
    bool kx = keep == 'x';
    auto ren = detail::index_params(s);
    Poly a = s.rel_a.rename(ren), b = s.rel_b.rename(ren);
    Poly r;
    if (kx) {
        r = resultant(a, b, s.Y(0));
        if (r.is_zero()) throw EliminationCollapse("resultant in " + var_name(s.Y(0)) + " vanishes");
        r = resultant(r, a.shift(-1), s.Y(-1));
        if (r.is_zero()) throw EliminationCollapse("resultant in " + var_name(s.Y(-1)) + " vanishes");
    } else {
        r = resultant(a, b.shift(1), s.X(1));
        if (r.is_zero()) throw EliminationCollapse("resultant in " + var_name(s.X(1)) + " vanishes");
        r = resultant(r, b, s.X(0));
        if (r.is_zero()) throw EliminationCollapse("resultant in " + var_name(s.X(0)) + " vanishes");
    }
    std::string base = kx ? s.xb : s.yb;
    Var P = ivar(base, 1), M = ivar(base, -1);
    ThreePointEquation e;
    e.base = base;
    std::vector<Poly> cand;
    r = r.primitive();
    // factors free of an outer slot, then repeated factors
    for (Var v : {P, M}) {
        Poly g = content_wrt(r, {v});
        if (!g.is_const()) {
            cand.push_back(g.primitive());
            r = divide_exact(r, g).primitive();
        }
    }
    Poly sq = gcd(r, r.diff(P));
    if (!sq.is_const()) {
        cand.push_back(sq.primitive());
        r = divide_exact(r, sq).primitive();
    }
    // orbit check: the survivor must vanish, removed factors must not
    SplitMix rng(seed);
    System sp = detail::with_random_params(s, r, rng);
    auto samples = detail::orbit_samples(sp, kx, 20, rng);
    if (samples.size() < 5) throw EliminationCollapse("too few orbit samples to validate the elimination");
    size_t miss = 0;
    for (auto& smp : samples) {
        auto v = detail::eval_on(sp, r, base, smp);
        if (!v || *v != 0) ++miss;
    }
    if (miss) e.reducible = true;
    for (auto& c : cand) {
        bool vanishes = false;
        for (auto& smp : samples) {
            auto v = detail::eval_on(sp, c, base, smp);
            if (v && *v == 0) vanishes = true;
        }
        if (vanishes) e.reducible = true;
        e.removed.push_back(c.str());
    }
    e.rel = r;
    return e;
}

// equality of relations up to a factor free of the dynamic variables,
// optionally after applying the homography `allow` to every slot of e2
inline bool equations_equal(const ThreePointEquation& e1, const ThreePointEquation& e2,
                            const std::optional<Homography>& allow = std::nullopt) {
    Poly b = e2.rel;
    if (e1.base != e2.base) {
        std::map<Var, Var> ren;
        for (Var v : b.vars()) {
            auto in = split_index(var_name(v));
            if (in.indexed && in.base == e2.base) ren[v] = ivar(e1.base, in.shift);
        }
        b = b.rename(ren);
    }
    if (allow) {
        Pullback pb{{e1.base, {*allow, e1.base}}};
        b = pullback(RatFunc(b), pb).num();
    }
    std::set<Var> dyn{ivar(e1.base, 1), ivar(e1.base, 0), ivar(e1.base, -1)};
    Poly a = e1.rel;
    // strip factors free of an outer slot on both sides (this includes the
    // parameter-only content)
    auto strip = [&](Poly p) {
        for (int k : {1, -1}) {
            Poly g = content_wrt(p, {ivar(e1.base, k)});
            if (!g.is_const()) p = divide_exact(p, g);
        }
        return p.primitive();
    };
    a = strip(a), b = strip(b);
    auto l = proportional(a, b, dyn);
    return l && l->is_const();
}

inline ThreePointEquation three_point(const Poly& rel, const std::string& base = "x") {
    ThreePointEquation e;
    e.rel = rel.primitive();
    e.base = base;
    return e;
}

}  // namespace qrt
