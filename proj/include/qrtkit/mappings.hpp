#pragma once

// Birational systems as half-step recurrences z_{k+1} = F_k(z_k, z_{k-1}).
//   symmetric:  z_k = x_k, one relation R(x[n+1], x[n], x[n-1]) = 0
//   asymmetric: z_{2n} = x_n, z_{2n+1} = y_n; rel_b gives y_n from (x_n, y_{n-1})
//               first, then rel_a gives x_{n+1} from (y_n, x_n).
// Parameters are plain names (read at index n) or indexed names such as
// A[n-1] (read at n-1); numeric values come from ParamSeq laws.

#include "linalg.hpp"
#include "params.hpp"
#include "parse.hpp"

#include <ostream>

namespace qrt {

struct NotHomographic : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotEliminable : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnassignedParameter : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// rel = c1*v + c0  ->  v = -c0/c1
inline RatFunc solve_linear(const Poly& rel, Var v) {
    auto c = rel.coeffs(v);
    utrim(c);
    if (c.size() != 2) throw NotHomographic("relation is not of degree 1 in " + var_name(v));
    return RatFunc::normalize(-c[0], c[1]);
}

// generic evaluation of a polynomial over a commutative ring T
template <class T, class Conv>
T eval_poly(const Poly& p, const std::map<Var, T>& pt, Conv conv, T zero) {
    T s = zero;
    bool first = true;
    for (auto& [m, c] : p.terms()) {
        T t = conv(c);
        for (auto& [v, k] : m.e) {
            auto it = pt.find(v);
            if (it == pt.end()) throw UnassignedParameter("no value for " + var_name(v));
            for (unsigned j = 0; j < k; ++j) t = t * it->second;
        }
        s = first ? t : s + t;
        first = false;
    }
    return s;
}

struct System {
    enum class Kind { Symmetric, Asymmetric };
    Kind kind = Kind::Symmetric;
    std::string xb = "x", yb = "y";
    Poly rel_a, rel_b;
    std::map<std::string, ParamSeq> laws;
    std::string parity_flip;
    Rat mult_base = 2;  // t in t^(L*e(n)) for exact orbits of multiplicative laws

    RatFunc upd_a, upd_b, back_a, back_b;

    static System symmetric(const Poly& rel, const std::string& xb = "x") {
        System s;
        s.kind = Kind::Symmetric;
        s.xb = xb;
        s.rel_a = rel.primitive();
        s.solve();
        return s;
    }
    static System asymmetric(const Poly& ra, const Poly& rb, const std::string& xb = "x", const std::string& yb = "y") {
        System s;
        s.kind = Kind::Asymmetric;
        s.xb = xb, s.yb = yb;
        s.rel_a = ra.primitive();
        s.rel_b = rb.primitive();
        s.solve();
        return s;
    }
    bool symmetric_kind() const { return kind == Kind::Symmetric; }

    Var X(int k) const { return ivar(xb, k); }
    Var Y(int k) const { return ivar(yb, k); }

    bool is_dynamic(Var v) const {
        auto in = split_index(var_name(v));
        return in.indexed && (in.base == xb || (!symmetric_kind() && in.base == yb));
    }
    // parameter names (bases) used by the relations
    std::set<std::string> parameters() const {
        std::set<std::string> out;
        for (const Poly* p : {&rel_a, &rel_b})
            for (Var v : p->vars())
                if (!is_dynamic(v)) out.insert(split_index(var_name(v)).base);
        return out;
    }

    // substitute numeric values for plain parameters in the relations
    System specialize(const std::map<std::string, Rat>& vals) const {
        std::map<Var, Rat> pt;
        for (auto& [k, v] : vals)
            if (Registry::instance().known(k)) pt[var(k)] = v;
        System s = *this;
        s.rel_a = rel_a.eval(pt).primitive();
        if (!symmetric_kind()) s.rel_b = rel_b.eval(pt).primitive();
        for (auto& [k, v] : vals)
            if (!s.laws.count(k)) s.laws[k] = ParamSeq::constant(v);
        s.solve();
        return s;
    }
    // same relations with symbolic parameters replaced by rational functions
    System substitute(const std::map<Var, RatFunc>& m) const {
        auto apply = [&](const Poly& p) { return RatFunc(p).subs(m).num().primitive(); };
        System s = *this;
        s.rel_a = apply(rel_a);
        if (!symmetric_kind()) s.rel_b = apply(rel_b);
        s.solve();
        return s;
    }

    void solve() {
        if (symmetric_kind()) {
            upd_a = solve_linear(rel_a, X(1));
            back_a = solve_linear(rel_a, X(-1));
        } else {
            upd_a = solve_linear(rel_a, X(1));
            back_a = solve_linear(rel_a, X(0));
            upd_b = solve_linear(rel_b, Y(0));
            back_b = solve_linear(rel_b, Y(-1));
        }
    }

    // half-step k: rule, the variables for (z_k, z_{k-1}), the produced
    // variable and the parameter index
    struct Half {
        const RatFunc* fwd;
        const RatFunc* bwd;
        Var cur, prev, next;
        long n;
        const char* rel;
    };
    static long floordiv2(long k) { return k >= 0 ? k / 2 : -((-k + 1) / 2); }
    Half half(long k) const {
        if (symmetric_kind()) return {&upd_a, &back_a, X(0), X(-1), X(1), k, "rel_a"};
        long n = floordiv2(k);
        if (k - 2 * n == 0) return {&upd_b, &back_b, X(0), Y(-1), Y(0), n, "rel_b"};
        return {&upd_a, &back_a, Y(0), X(0), X(1), n, "rel_a"};
    }

    // value of a parameter variable at step index n
    template <class T, class Val>
    void bind_params(const RatFunc& f, long n, std::map<Var, T>& pt, Val val) const {
        for (Var v : f.vars()) {
            if (is_dynamic(v)) continue;
            auto in = split_index(var_name(v));
            auto it = laws.find(in.base);
            if (it == laws.end()) throw UnassignedParameter("parameter '" + in.base + "' has no value");
            pt[v] = val(it->second, n + in.shift);
        }
    }
    Rat param_rat(const ParamSeq& p, long n) const { return p.value(n, mult_base); }
    std::map<Var, Rat> rat_params(const RatFunc& f, long n) const {
        std::map<Var, Rat> pt;
        bind_params<Rat>(f, n, pt, [&](const ParamSeq& p, long m) { return param_rat(p, m); });
        return pt;
    }
};

// ---------------------------------------------------------------------------

struct StepResult {
    std::optional<Rat> value;
    std::string diag;  // set on a singularity
};

inline StepResult half_step(const System& s, long k, const Rat& cur, const Rat& prev) {
    auto h = s.half(k);
    auto pt = s.rat_params(*h.fwd, h.n);
    pt[h.cur] = cur;
    pt[h.prev] = prev;
    auto r = h.fwd->eval(pt);
    if (r.ok()) return {r.value, ""};
    return {std::nullopt, std::string(h.rel) + (r.kind == EvalResult::Pole ? ": pole" : ": indeterminate") +
                              " at half-step " + std::to_string(k)};
}
inline StepResult half_step_back(const System& s, long k, const Rat& next, const Rat& cur) {
    auto h = s.half(k);
    auto pt = s.rat_params(*h.bwd, h.n);
    pt[h.next] = next;
    pt[h.cur] = cur;
    auto r = h.bwd->eval(pt);
    if (r.ok()) return {r.value, ""};
    return {std::nullopt, std::string(h.rel) + " (inverse): singular at half-step " + std::to_string(k)};
}

// orbit in half-step indexing; z[i] is z_{k0 - 1 + i}
struct Orbit {
    long k0 = 0;
    std::vector<std::optional<Rat>> z;
    std::string singular;  // diagnostic of the first AtSingularity, if any

    long first() const { return k0 - 1; }
    long last() const { return first() + long(z.size()) - 1; }
    bool has(long k) const { return k >= first() && k <= last() && z[size_t(k - first())].has_value(); }
    const Rat& at(long k) const { return *z[size_t(k - first())]; }
};

// start: (z_{k0-1}, z_{k0}); for an asymmetric system and k0 = 2n this is
// (y_{n-1}, x_n); for a symmetric one (x_{k0-1}, x_{k0})
inline Orbit iterate(const System& s, const Rat& prev, const Rat& cur, long k0, long halfsteps) {
    Orbit o;
    o.k0 = k0;
    o.z = {prev, cur};
    for (long j = 0; j < halfsteps; ++j) {
        long k = k0 + j;
        auto& a = o.z[o.z.size() - 1];
        auto& b = o.z[o.z.size() - 2];
        auto r = half_step(s, k, *a, *b);
        o.z.push_back(r.value);
        if (!r.value) {
            o.singular = r.diag;
            break;
        }
    }
    return o;
}

// full steps: two half-steps each for asymmetric systems
inline Orbit iterate_steps(const System& s, const Rat& a, const Rat& b, long n0, long steps) {
    if (s.symmetric_kind()) return iterate(s, a, b, n0, steps);
    // (x_n, y_{n-1}) = (a, b)
    return iterate(s, b, a, 2 * n0, 2 * steps);
}

inline void write_csv(std::ostream& os, const System& s, const Orbit& o) {
    auto cell = [&](long k) { return o.has(k) ? o.at(k).get_str() : std::string("AtSingularity"); };
    if (s.symmetric_kind()) {
        os << "n,x\n";
        for (long k = o.first(); k <= o.last(); ++k) os << k << "," << cell(k) << "\n";
        return;
    }
    os << "n,x,y\n";
    long n0 = System::floordiv2(o.first() + 1), n1 = System::floordiv2(o.last());
    for (long n = n0; n <= n1; ++n) {
        bool hx = 2 * n >= o.first() && 2 * n <= o.last(), hy = 2 * n + 1 <= o.last();
        if (!hx) continue;
        os << n << "," << cell(2 * n) << "," << (hy ? cell(2 * n + 1) : std::string("")) << "\n";
    }
}

// ---------------------------------------------------------------------------

struct Invariant {
    RatFunc K;    // in x[n], y[n] (asymmetric) or x[n], x[n-1] (symmetric)
    RatFunc mu;   // shift: calK = (K + mu)^-1
    Invariant() = default;
    Invariant(RatFunc k, RatFunc m = RatFunc()) : K(std::move(k)), mu(std::move(m)) {}
};

struct ConservationReport {
    bool pass = true;
    bool truncated = false;
    long first_fail = -1;
    long checked = 0;
    std::string note;
};

namespace detail {

inline Rat eval_inv(const System& s, const RatFunc& K, Var a, const Rat& va, Var b, const Rat& vb, int flip) {
    std::map<Var, Rat> pt = s.rat_params(K, 0);
    if (!s.parity_flip.empty() && flip != 0) {
        Var g = var(s.parity_flip);
        if (pt.count(g)) pt[g] = flip * pt[g];
    }
    pt[a] = va;
    pt[b] = vb;
    auto r = K.eval(pt);
    if (!r.ok()) throw DegeneratePoints("invariant singular on orbit");
    return r.value;
}

inline ConservationReport conservation(const System& s, const Invariant& inv, const Rat& a, const Rat& b, long steps,
                                       bool alternating) {
    ConservationReport rep;
    Orbit o = iterate_steps(s, a, b, 0, steps);
    if (!o.singular.empty()) rep.truncated = true, rep.note = o.singular;
    int f1 = alternating ? -1 : 0, f2 = alternating ? 1 : 0;
    try {
        if (s.symmetric_kind()) {
            for (long k = 0; k + 1 <= o.last(); ++k) {
                if (!o.has(k + 1) || !o.has(k - 1)) break;
                Rat l = eval_inv(s, inv.K, s.X(0), o.at(k), s.X(-1), o.at(k - 1), 0);
                Rat r = eval_inv(s, inv.K, s.X(0), o.at(k + 1), s.X(-1), o.at(k), 0);
                ++rep.checked;
                if (l != r) {
                    rep.pass = false, rep.first_fail = k;
                    return rep;
                }
            }
        } else {
            for (long n = 0; 2 * n + 2 <= o.last(); ++n) {
                if (!o.has(2 * n + 2)) break;
                Rat x0 = o.at(2 * n), ym = o.at(2 * n - 1), y0 = o.at(2 * n + 1), x1 = o.at(2 * n + 2);
                Rat k1 = eval_inv(s, inv.K, s.X(0), x0, s.Y(0), ym, f1);
                Rat k2 = eval_inv(s, inv.K, s.X(0), x0, s.Y(0), y0, f2);
                Rat k3 = eval_inv(s, inv.K, s.X(0), x1, s.Y(0), y0, f1);
                ++rep.checked;
                if (k1 != k2 || k2 != k3) {
                    rep.pass = false, rep.first_fail = n;
                    return rep;
                }
            }
        }
    } catch (const DegeneratePoints& e) {
        rep.truncated = true;
        rep.note = e.what();
    }
    return rep;
}

}  // namespace detail

// K(x_n,y_{n-1}) = K(x_n,y_n) = K(x_{n+1},y_n), resp. K(x_{n+1},x_n) = K(x_n,x_{n-1})
inline ConservationReport check_conservation(const System& s, const Invariant& inv, const Rat& a, const Rat& b,
                                             long steps) {
    return detail::conservation(s, inv, a, b, steps, false);
}

// K(x_n,y_{n-1};-g) = K(x_n,y_n;g) = K(x_{n+1},y_n;-g) with g = s.parity_flip
inline ConservationReport check_alternating_conservation(const System& s, const Invariant& inv, const Rat& a,
                                                         const Rat& b, long steps) {
    if (s.parity_flip.empty() || s.symmetric_kind())
        throw std::invalid_argument("alternating conservation needs an asymmetric system with parity_flip");
    return detail::conservation(s, inv, a, b, steps, true);
}

// step then inverse step returns the state
inline bool check_reversible(const System& s, const Rat& prev, const Rat& cur, long k) {
    auto f = half_step(s, k, cur, prev);
    if (!f.value) return true;  // nothing to invert
    auto b = half_step_back(s, k, *f.value, cur);
    return b.value && *b.value == prev;
}

// ---------------------------------------------------------------------------

// K(x[n], x[n-1]) of a symmetric map rewritten in (x[n+1], x[n-1])
inline Invariant invariant_in_shifted_vars(const System& s, const Invariant& inv, std::uint64_t seed = 11) {
    if (!s.symmetric_kind()) throw std::invalid_argument("shifted invariant needs a symmetric map");
    Var c = s.X(0), m = s.X(-1), p = s.X(1);
    if (!inv.K.vars().count(c)) return inv;
    unsigned d = s.rel_a.degree(c);
    if (d == 1) return Invariant(inv.K.subs(c, solve_linear(s.rel_a, c)), inv.mu);
    if (d != 2) throw NotEliminable("map has degree " + std::to_string(d) + " in the middle variable");

    Var kv = var("k__");
    Poly E = inv.K.num() - Poly::variable(kv) * inv.K.den();
    Poly r = resultant(E, s.rel_a, c);
    if (r.is_zero()) throw NotEliminable("resultant vanishes");
    auto q = r.coeffs(kv);
    utrim(q);
    if (q.size() == 2) return Invariant(RatFunc::normalize(-q[0], q[1]), inv.mu);
    if (q.size() != 3) throw NotEliminable("unexpected degree in the invariant value");
    Poly disc = q[1] * q[1] - Poly(4) * q[0] * q[2], sq;
    // strip a square-free rational content so that poly_sqrt sees a square
    if (!poly_sqrt(disc, sq)) {
        Rat ct = disc.content();
        Poly dp = disc.scaled(1 / ct);
        if (!poly_sqrt(dp, sq)) throw NotEliminable("discriminant is not a perfect square");
        Int n = ct.get_num(), dn = ct.get_den();
        if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(dn.get_mpz_t()))
            throw NotEliminable("discriminant content is not a square");
        Int rn, rd;
        mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
        mpz_sqrt(rd.get_mpz_t(), dn.get_mpz_t());
        sq = sq.scaled(Rat(rn, rd));
    }
    RatFunc r1 = RatFunc::normalize(-q[1] + sq, q[2].scaled(2)), r2 = RatFunc::normalize(-q[1] - sq, q[2].scaled(2));
    if (r1 == r2) return Invariant(r1, inv.mu);

    // pick the branch that matches K along exact orbits; free parameters get
    // random rational values for the vote
    SplitMix rng(seed);
    System sp = s;
    for (const RatFunc* f : std::initializer_list<const RatFunc*>{&inv.K, &r1, &r2})
        for (Var v : f->vars())
            if (!s.is_dynamic(v)) {
                auto base = split_index(var_name(v)).base;
                if (!sp.laws.count(base)) sp.laws[base] = ParamSeq::constant(Rat(rng.range(2, 60), rng.range(1, 7)));
            }
    for (auto& b : s.parameters())
        if (!sp.laws.count(b)) sp.laws[b] = ParamSeq::constant(Rat(rng.range(2, 60), rng.range(1, 7)));
    int votes1 = 0, votes2 = 0;
    for (int t = 0; t < 8 && votes1 + votes2 < 4; ++t) {
        Rat a(rng.range(-40, 40), rng.range(1, 13)), b(rng.range(-40, 40), rng.range(1, 13));
        a.canonicalize(), b.canonicalize();
        try {
            Orbit o = iterate(sp, a, b, 1, 2);
            if (!o.singular.empty()) continue;
            Rat xm = o.at(0), x0 = o.at(1), x1 = o.at(2);
            Rat kk = detail::eval_inv(sp, inv.K, c, x0, m, xm, 0);
            auto pt1 = sp.rat_params(r1, 0);
            pt1[p] = x1, pt1[m] = xm;
            auto pt2 = sp.rat_params(r2, 0);
            pt2[p] = x1, pt2[m] = xm;
            auto e1 = r1.eval(pt1), e2 = r2.eval(pt2);
            if (e1.ok() && e1.value == kk) ++votes1;
            if (e2.ok() && e2.value == kk) ++votes2;
        } catch (const std::exception&) {
        }
    }
    if (votes1 > votes2) return Invariant(r1, inv.mu);
    if (votes2 > votes1) return Invariant(r2, inv.mu);
    throw NotEliminable("could not select the invariant branch");
}

}  // namespace qrt
