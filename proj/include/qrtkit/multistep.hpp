#pragma once

// Double-step maps from shifted invariants and orbit checks of multistep
// relations.

#include "elimination.hpp"

namespace qrt {

// relation in base[n+2], base[n], base[n-2] obtained from
// G(x[n+2], x[n]) = G(x[n], x[n-2]) with G the shifted invariant
inline ThreePointEquation double_step(const System& map, const Invariant& inv, std::uint64_t seed = 11) {
    if (!map.symmetric_kind()) throw std::invalid_argument("double_step: map must be symmetric");
    Invariant sh = invariant_in_shifted_vars(map, inv, seed);
    const std::string& b = map.xb;
    Var u = ivar(b, 1), v = ivar(b, -1);
    Var P = ivar(b, 2), C = ivar(b, 0), M = ivar(b, -2);
    // G(u, v) with (u, v) -> (P, C) and (C, M)
    auto at = [&](const Poly& f, Var a, Var c) {
        // rename in two stages to avoid clashes with x[n]
        Var t1 = var("tmp_u_"), t2 = var("tmp_v_");
        return f.rename({{u, t1}, {v, t2}}).rename({{t1, a}, {t2, c}});
    };
    const Poly &N = sh.K.num(), &D = sh.K.den();
    Poly F = at(N, P, C) * at(D, C, M) - at(N, C, M) * at(D, P, C);
    if (F.is_zero()) throw NotEliminable("shifted invariant is constant");
    ThreePointEquation e;
    e.base = b;
    int k = remove_factor(F, Poly::variable(P) - Poly::variable(M));
    if (k) e.removed.push_back("(" + var_name(P) + " - " + var_name(M) + ")^" + std::to_string(k));
    for (Var w : {P, M}) {
        Poly g = content_wrt(F, {w});
        if (!g.is_const()) {
            e.removed.push_back(g.primitive().str());
            F = divide_exact(F, g);
        }
    }
    e.rel = F.primitive();
    return e;
}

// every dynamic slot of a multistep relation, in a fixed order
inline std::vector<Var> relation_slots(const Poly& rel, const System& s) {
    std::vector<Var> out;
    for (Var v : rel.vars())
        if (s.is_dynamic(v)) out.push_back(v);
    return out;
}

struct MultistepReport {
    bool pass = false;
    size_t points = 0;                   // orbit indices tested
    std::map<std::string, int> offsets;  // slot -> offset of the annihilating pattern
    bool shifted = false;                // true if the zero pattern is not the declared one
    std::vector<std::string> residuals;  // per index for the declared pattern
    std::string note;
};

namespace detail {

inline long slot_half_index(const System& s, Var v, long n, int off) {
    auto in = split_index(var_name(v));
    long j = n + in.shift + off;
    if (s.symmetric_kind()) return j;
    return in.base == s.xb ? 2 * j : 2 * j + 1;
}

inline std::optional<Rat> multistep_residual(const System& s, const Poly& rel, const std::vector<Var>& slots,
                                             const std::vector<int>& off, const Orbit& o, long n) {
    auto pt = s.rat_params(RatFunc(rel), n);
    for (size_t i = 0; i < slots.size(); ++i) {
        long k = slot_half_index(s, slots[i], n, off[i]);
        if (!o.has(k)) return std::nullopt;
        pt[slots[i]] = o.at(k);
    }
    return rel.value(pt);
}

}  // namespace detail

// substitute orbit values into the relation at every available index n;
// with shift_search, each slot may move by -1, 0 or +1
inline MultistepReport verify_multistep(const Poly& rel, const System& parent, long orbit_len, bool shift_search,
                                        const Rat& a = Rat(3, 7), const Rat& b = Rat(5, 11), long n0 = 0) {
    MultistepReport rep;
    Orbit o = iterate_steps(parent, a, b, n0, orbit_len);
    if (!o.singular.empty()) rep.note = "orbit hit a singularity: " + o.singular;
    auto slots = relation_slots(rel, parent);
    if (slots.empty()) throw std::invalid_argument("verify_multistep: relation has no dynamic variables");
    long nlo = n0 - 2, nhi = n0 + orbit_len + 2;
    auto run = [&](const std::vector<int>& off, std::vector<std::string>* res) {
        size_t pts = 0;
        for (long n = nlo; n <= nhi; ++n) {
            auto r = detail::multistep_residual(parent, rel, slots, off, o, n);
            if (!r) continue;
            ++pts;
            if (res) res->push_back("n=" + std::to_string(n) + ": " + r->get_str());
            if (*r != 0 && !res) return size_t(0);
        }
        return pts;
    };
    std::vector<int> zero(slots.size(), 0);
    rep.points = run(zero, &rep.residuals);
    bool ok0 = rep.points > 0;
    for (auto& r : rep.residuals)
        if (r.substr(r.find(": ") + 2) != "0") ok0 = false;
    auto record = [&](const std::vector<int>& off) {
        for (size_t i = 0; i < slots.size(); ++i) rep.offsets[var_name(slots[i])] = off[i];
    };
    if (ok0) {
        rep.pass = true;
        record(zero);
        return rep;
    }
    if (!shift_search) return rep;
    std::vector<int> off(slots.size(), -1);
    size_t best = 0;
    while (true) {
        if (off != zero) {
            size_t p = run(off, nullptr);
            if (p >= 10 && p > best) {
                best = p;
                record(off);
                rep.pass = rep.shifted = true;
                break;
            }
        }
        size_t i = 0;
        while (i < off.size() && off[i] == 1) off[i++] = -1;
        if (i == off.size()) break;
        ++off[i];
    }
    if (rep.pass) rep.points = best;
    return rep;
}

}  // namespace qrt
