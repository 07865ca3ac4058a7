#pragma once

// Moebius maps on one variable, conjugation of systems, pullback of
// invariants, canonical-shape matching and a small exact solver for
// restoration ansatzes.

#include "mappings.hpp"

#include <cmath>
#include <complex>

namespace qrt {

struct DegenerateHomography : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MatchFailure : std::runtime_error {
    std::string residual;
    MatchFailure(const std::string& w, std::string r = "") : std::runtime_error(w), residual(std::move(r)) {}
};

// x -> (p x + q) / (r x + s); entries are polynomials in parameters
struct Homography {
    Poly p{1}, q, r, s{1};

    Homography() = default;
    Homography(Poly p_, Poly q_, Poly r_, Poly s_) : p(std::move(p_)), q(std::move(q_)), r(std::move(r_)), s(std::move(s_)) {
        normalize();
    }
    // entries given as rational functions: clear denominators
    static Homography of(const RatFunc& p, const RatFunc& q, const RatFunc& r, const RatFunc& s) {
        Poly l(1);
        for (const RatFunc* f : {&p, &q, &r, &s}) {
            Poly g = gcd(l, f->den());
            l = divide_exact(l * f->den(), g);
        }
        auto cl = [&](const RatFunc& f) { return divide_exact(f.num() * l, f.den()); };
        return Homography(cl(p), cl(q), cl(r), cl(s));
    }
    // read the coefficients off a rational expression of degree one in v
    static Homography from_expr(const RatFunc& f, Var v) {
        auto n = f.num().coeffs(v), d = f.den().coeffs(v);
        utrim(n), utrim(d);
        if (n.size() > 2 || d.size() > 2) throw DegenerateHomography("expression is not homographic in " + var_name(v));
        auto at = [](const UCoeffs& c, size_t i) { return i < c.size() ? c[i] : Poly(); };
        Homography h(at(n, 1), at(n, 0), at(d, 1), at(d, 0));
        if (h.det().is_zero()) throw DegenerateHomography("homography has zero determinant");
        return h;
    }

    Poly det() const { return p * s - q * r; }

    void normalize() {
        Poly g;
        for (const Poly* e : {&p, &q, &r, &s})
            if (!e->is_zero()) g = g.is_zero() ? e->primitive() : gcd(g, *e);
        if (g.is_zero()) return;
        Rat c = 1;
        for (const Poly* e : {&p, &q, &r, &s})
            if (!e->is_zero()) {
                Poly t = divide_exact(*e, g);
                c = t.lc() < 0 ? Rat(-1) : Rat(1);
                break;
            }
        for (Poly* e : {&p, &q, &r, &s}) *e = divide_exact(*e, g).scaled(c);
    }

    bool is_identity() const { return q.is_zero() && r.is_zero() && p == s; }
    bool operator==(const Homography& o) const { return p == o.p && q == o.q && r == o.r && s == o.s; }

    RatFunc apply(const RatFunc& x) const {
        return (RatFunc(p) * x + RatFunc(q)) / (RatFunc(r) * x + RatFunc(s));
    }
    Homography inverse() const { return Homography(s, -q, -r, p); }

    std::string str(const std::string& v = "x") const {
        auto w = [](const Poly& e) { return e.size() > 1 ? "(" + e.str() + ")" : e.str(); };
        return "(" + w(p) + "*" + v + " + " + w(q) + ")/(" + w(r) + "*" + v + " + " + w(s) + ")";
    }
};

// h1 o h2: apply h2 first
inline Homography compose(const Homography& a, const Homography& b) {
    return Homography(a.p * b.p + a.q * b.r, a.p * b.q + a.q * b.s, a.r * b.p + a.s * b.r, a.r * b.q + a.s * b.s);
}

// old variable base -> (old = h(new), new base)
struct SlotMap {
    Homography h;
    std::string new_base;
};
using Pullback = std::map<std::string, SlotMap>;

// substitute old[n+j] = h(new[n+j]) in every indexed slot
inline RatFunc pullback(const RatFunc& f, const Pullback& pb) {
    std::map<Var, RatFunc> sub;
    for (Var v : f.vars()) {
        auto in = split_index(var_name(v));
        if (!in.indexed) continue;
        auto it = pb.find(in.base);
        if (it == pb.end()) continue;
        if (it->second.h.det().is_zero()) throw DegenerateHomography("singular homography on " + in.base);
        sub[v] = it->second.h.apply(RatFunc::variable(ivar(it->second.new_base, in.shift)));
    }
    return f.subs(sub);
}

// dynamic variables with the given bases
inline std::set<Var> dynamic_vars(const Poly& p, const std::set<std::string>& bases) {
    std::set<Var> out;
    for (Var v : p.vars()) {
        auto in = split_index(var_name(v));
        if (in.indexed && bases.count(in.base)) out.insert(v);
    }
    return out;
}

struct ConjugatedRelation {
    Poly rel;
    Poly dynamic_content;  // common factor in the non-leading dynamic variables (1 if none)
};

// pull back a relation and strip parameter content; the dynamic part of the
// content with respect to the leading variables is kept and reported
inline ConjugatedRelation conjugate_relation(const Poly& rel, const Pullback& pb, const std::set<Var>& lead,
                                             const std::set<std::string>& bases) {
    Poly r = pullback(RatFunc(rel), pb).num();
    std::set<Var> dyn = dynamic_vars(r, bases);
    Poly g = content_wrt(r, lead);
    Poly pc = content_wrt(g, dyn);  // parameter-only part of the content
    if (!pc.is_const()) r = divide_exact(r, pc), g = divide_exact(g, pc);
    return {r.primitive(), g.primitive()};
}

inline std::set<Var> leading_vars(const System& s, bool rel_a) {
    if (s.symmetric_kind()) return {s.X(1), s.X(-1)};
    return rel_a ? std::set<Var>{s.X(1)} : std::set<Var>{s.Y(0)};
}

struct ConjugationResult {
    System system;
    bool degenerate = false;
    std::vector<std::string> common_factors;
};

// orbits of the result are images of old orbits under new = h^-1(old)
inline ConjugationResult conjugate_system_ex(const System& s, const Pullback& pb) {
    for (auto& [b, m] : pb)
        if (m.h.det().is_zero()) throw DegenerateHomography("homography on " + b + " is degenerate");
    auto nb = [&](const std::string& b) {
        auto it = pb.find(b);
        return it == pb.end() ? b : it->second.new_base;
    };
    System t;
    t.kind = s.kind;
    t.xb = nb(s.xb), t.yb = s.symmetric_kind() ? s.yb : nb(s.yb);
    t.laws = s.laws, t.parity_flip = s.parity_flip, t.mult_base = s.mult_base;
    std::set<std::string> bases{t.xb};
    if (!s.symmetric_kind()) bases.insert(t.yb);
    ConjugationResult out;
    auto one = [&](const Poly& rel, bool a) {
        auto lv = leading_vars(t, a);
        auto c = conjugate_relation(rel, pb, lv, bases);
        if (!c.dynamic_content.is_const()) {
            out.degenerate = true;
            out.common_factors.push_back(c.dynamic_content.str());
        }
        return c.rel;
    };
    t.rel_a = one(s.rel_a, true);
    if (!s.symmetric_kind()) t.rel_b = one(s.rel_b, false);
    // strip the dynamic content before solving, the flag records it
    auto strip = [&](Poly& rel, bool a) {
        Poly g = content_wrt(rel, leading_vars(t, a));
        if (!g.is_const()) rel = divide_exact(rel, g).primitive();
    };
    strip(t.rel_a, true);
    if (!s.symmetric_kind()) strip(t.rel_b, false);
    t.solve();
    out.system = std::move(t);
    return out;
}

inline System conjugate_system(const System& s, const Pullback& pb) { return conjugate_system_ex(s, pb).system; }

// (K o h + mu)^-1 in the new variables
inline RatFunc transform_invariant(const Invariant& inv, const Pullback& pb, const RatFunc& mu) {
    RatFunc w = pullback(inv.K, pb) + mu;
    if (w.is_zero()) throw DegenerateHomography("K + mu vanishes identically");
    return w.inv();
}

// ---------------------------------------------------------------------------
// exact comparison modulo side relations (each monic in its leading variable)

struct SideRelation {
    Var v;
    Poly rel;  // monic in v
};

inline Poly reduce_sides(Poly a, const std::vector<SideRelation>& sides) {
    for (auto& sr : sides) {
        unsigned d = sr.rel.degree(sr.v);
        if (a.degree(sr.v) < d) continue;
        auto ca = a.coeffs(sr.v), cb = sr.rel.coeffs(sr.v);
        // long division by a monic polynomial in v
        for (size_t i = ca.size(); i-- > d;) {
            Poly t = ca[i];
            if (t.is_zero()) continue;
            for (size_t j = 0; j <= d; ++j) ca[i - d + j] -= t * cb[j];
        }
        ca.resize(d);
        a = Poly::from_coeffs(sr.v, ca);
    }
    return a;
}

inline std::vector<SideRelation> parse_sides(const std::vector<std::string>& rels) {
    std::vector<SideRelation> out;
    for (auto& s : rels) {
        Poly p = parse_relation(s);
        auto vs = p.vars();
        if (vs.empty()) throw ParseError("side relation without variables: " + s);
        Var best = *vs.begin();
        for (Var v : vs)
            if (p.degree(v) > p.degree(best)) best = v;
        Poly lc = p.coeffs(best).back();
        if (!lc.is_const()) throw ParseError("side relation must be monic in its main variable: " + s);
        out.push_back({best, p.scaled(1 / lc.const_value())});
    }
    return out;
}

// group a polynomial by its monomials in dyn
inline std::map<Mono, Poly, bool (*)(const Mono&, const Mono&)> split_dynamic(const Poly& a, const std::set<Var>& dyn) {
    std::map<Mono, std::vector<Poly::Term>, bool (*)(const Mono&, const Mono&)> g(
        [](const Mono& x, const Mono& y) { return mono_cmp(x, y) > 0; });
    for (auto& [m, c] : a.terms()) {
        Mono d, rest;
        for (auto& p : m.e) {
            if (dyn.count(p.first)) d.e.push_back(p), d.deg += p.second;
            else rest.e.push_back(p), rest.deg += p.second;
        }
        g[d].push_back({rest, c});
    }
    std::map<Mono, Poly, bool (*)(const Mono&, const Mono&)> out([](const Mono& x, const Mono& y) { return mono_cmp(x, y) > 0; });
    for (auto& [d, t] : g) out[d] = Poly::from_terms(t);
    return out;
}

// is a = lambda * b for some lambda free of the dynamic variables?
inline std::optional<RatFunc> proportional(const Poly& a0, const Poly& b0, const std::set<Var>& dyn,
                                           const std::vector<SideRelation>& sides = {}) {
    Poly a = reduce_sides(a0, sides), b = reduce_sides(b0, sides);
    if (b.is_zero()) return a.is_zero() ? std::optional<RatFunc>(RatFunc()) : std::nullopt;
    auto gb = split_dynamic(b, dyn);
    const Mono* lead = nullptr;
    Poly lb;
    for (auto& [m, c] : gb)
        if (!reduce_sides(c, sides).is_zero()) {
            lead = &m, lb = c;
            break;
        }
    if (!lead) return std::nullopt;
    auto ga = split_dynamic(a, dyn);
    Poly la = ga.count(*lead) ? ga.at(*lead) : Poly();
    if (!reduce_sides(a * lb - b * la, sides).is_zero()) return std::nullopt;
    return RatFunc::normalize(la, lb);
}

inline std::optional<RatFunc> proportional(const RatFunc& f, const RatFunc& g, const std::set<Var>& dyn,
                                           const std::vector<SideRelation>& sides = {}) {
    return proportional(f.num() * g.den(), g.num() * f.den(), dyn, sides);
}

// ---------------------------------------------------------------------------
// canonical shapes of symmetric three-point relations
//   mult_sym:   X1 Xm = (X-A)(X-B)/((1-CX)(1-DX))
//   add_sym:    X1 + Xm = (A X + B)/(X^2 - 1)
//   sum_shift:  (Y1+Y)(Y+Ym) = (e Y^2 + f)/(Y + D)         (e = -4 canonical)
//   prod_shift: (Y1 Y - 1)(Y Ym - 1) = quartic(Y)/(1 - F Y) (up to Y scaling)

struct ShapeMatch {
    bool ok = false;
    std::string family;
    std::map<std::string, RatFunc> coeffs;   // matched coefficients
    std::vector<std::string> conditions;     // unresolved symbolic conditions
    std::string residual;
};

struct SymCoeffs {
    std::vector<Poly> c11, c10, c01, c00;  // coefficients in the middle variable
    bool ok = false;
};

inline SymCoeffs sym_coeffs(const Poly& rel, Var P, Var c, Var M) {
    SymCoeffs out;
    if (rel.degree(P) > 1 || rel.degree(M) > 1) return out;
    auto part = [&](unsigned a, unsigned b) {
        Poly t = rel.coeff(P, a).coeff(M, b);
        auto v = t.coeffs(c);
        utrim(v);
        return v;
    };
    out.c11 = part(1, 1), out.c10 = part(1, 0), out.c01 = part(0, 1), out.c00 = part(0, 0);
    out.ok = true;
    return out;
}

namespace detail {
inline Poly at(const std::vector<Poly>& v, size_t i) { return i < v.size() ? v[i] : Poly(); }
inline unsigned deg(const std::vector<Poly>& v) { return v.empty() ? 0 : unsigned(v.size() - 1); }
inline bool same(const std::vector<Poly>& a, const std::vector<Poly>& b) {
    for (size_t i = 0; i < std::max(a.size(), b.size()); ++i)
        if (at(a, i) != at(b, i)) return false;
    return true;
}
inline RatFunc q(const Poly& a, const Poly& b) { return RatFunc::normalize(a, b); }
}  // namespace detail

inline ShapeMatch match_shape(const std::string& family, const Poly& rel, const std::string& base) {
    using namespace detail;
    ShapeMatch m;
    m.family = family;
    Var P = ivar(base, 1), c = ivar(base, 0), M = ivar(base, -1);
    auto sc = sym_coeffs(rel, P, c, M);
    if (!sc.ok) return m.residual = "relation is not homographic in the outer variables", m;
    if (!same(sc.c10, sc.c01)) return m.residual = "relation is not symmetric", m;
    if (family == "mult_sym") {
        if (!sc.c10.empty()) return m.residual = "P+M term present", m;
        if (deg(sc.c11) > 2 || deg(sc.c00) > 2) return m.residual = "degree pattern", m;
        Poly lam = at(sc.c11, 0);
        if (lam.is_zero()) return m.residual = "C/D normalisation impossible", m;
        Poly cond = at(sc.c00, 2) + lam;
        m.coeffs["A+B"] = q(at(sc.c00, 1), lam);
        m.coeffs["A*B"] = q(-at(sc.c00, 0), lam);
        m.coeffs["C+D"] = q(-at(sc.c11, 1), lam);
        m.coeffs["C*D"] = q(at(sc.c11, 2), lam);
        if (!cond.is_zero()) {
            m.residual = "normalisation: " + cond.str();
            return m;
        }
        m.ok = true;
        return m;
    }
    if (family == "add_sym") {
        if (!sc.c11.empty()) return m.residual = "PM term present", m;
        if (deg(sc.c10) != 2 || !at(sc.c10, 1).is_zero() || deg(sc.c00) > 1)
            return m.residual = "degree pattern", m;
        Poly lam = at(sc.c10, 2);
        RatFunc rho = q(-at(sc.c10, 0), lam);
        m.coeffs["rho"] = rho;
        m.coeffs["A"] = q(-at(sc.c00, 1), lam);
        m.coeffs["B"] = q(-at(sc.c00, 0), lam);
        if (rho != RatFunc(1)) m.conditions.push_back("scale: rho = " + rho.str());
        m.ok = true;
        return m;
    }
    if (family == "sum_shift") {
        if (deg(sc.c11) != 1 || sc.c11.empty()) return m.residual = "degree pattern", m;
        Poly lam = at(sc.c11, 1);
        // c10 = c * c11
        std::vector<Poly> cc11(sc.c11.size() + 1);
        for (size_t i = 0; i < sc.c11.size(); ++i) cc11[i + 1] = sc.c11[i];
        utrim(cc11);
        if (!same(sc.c10, cc11)) return m.residual = "P+M coefficient is not Y*(Y+D)", m;
        std::vector<Poly> rem = sc.c00;
        rem.resize(std::max<size_t>(rem.size(), 4));
        for (size_t i = 0; i < sc.c11.size(); ++i) rem[i + 2] -= sc.c11[i];
        utrim(rem);
        if (deg(rem) > 2 || !at(rem, 1).is_zero()) return m.residual = "right-hand side pattern", m;
        m.coeffs["D"] = q(at(sc.c11, 0), lam);
        RatFunc e = q(at(rem, 2), lam), f = q(at(rem, 0), lam);
        m.coeffs["e"] = e;
        m.coeffs["f"] = f;
        // (Y1+Y)(Y+Ym)(Y+D) = -e Y^2 - f; canonical numerator -4Y^2 + C^2
        if (e != RatFunc(4)) m.conditions.push_back("scale: e = " + e.str());
        else m.coeffs["C^2"] = -f;
        m.ok = true;
        return m;
    }
    if (family == "prod_shift") {
        auto drop = [](std::vector<Poly> v) {
            if (!v.empty()) v.erase(v.begin());
            return v;
        };
        // a relation still carrying the overall factor Y is divided by it
        auto c11 = sc.c11, c10 = sc.c10, c00 = sc.c00;
        if (at(c11, 0).is_zero() && at(c10, 0).is_zero() && at(c00, 0).is_zero())
            c11 = drop(c11), c10 = drop(c10), c00 = drop(c00);
        if (deg(c10) > 1 || c10.empty() || deg(c00) > 3) return m.residual = "degree pattern", m;
        Poly l0 = at(c10, 0);
        if (l0.is_zero()) return m.residual = "degenerate P+M coefficient", m;
        // c11 = -a * Y * c10
        if (!at(c11, 0).is_zero()) return m.residual = "PM coefficient has a constant term", m;
        Poly a = -at(c11, 1);
        RatFunc av = q(a, l0);
        for (size_t i = 1; i < std::max(c11.size(), c10.size() + 1); ++i)
            if (at(c11, i) * l0 + a * at(c10, i - 1) != Poly()) return m.residual = "PM coefficient is not a multiple of Y*c10", m;
        // normalise c10 -> -(1 - F Y)
        m.coeffs["kappa^2"] = av;
        m.coeffs["F"] = q(at(c10, 1), l0);
        for (int i = 0; i <= 3; ++i) m.coeffs["r" + std::to_string(i)] = q(-at(c00, size_t(i)), l0);
        if (av != RatFunc(1)) m.conditions.push_back("kappa^2 = " + av.str());
        m.ok = true;
        return m;
    }
    m.residual = "unknown family " + family;
    return m;
}

// ---------------------------------------------------------------------------
// degeneracy: parameter loci where the relation acquires a common factor in
// the middle variable

struct DegeneracyBranch {
    std::map<Var, RatFunc> subs;
    Poly factor;   // the common factor on that branch
    Poly reduced;  // relation with the factor divided out
};

inline bool has_dynamic_content(const Poly& rel, const std::set<Var>& lead) {
    return !content_wrt(rel, lead).is_const();
}

// locus: resultant of two outer coefficients in the middle variable; each
// rational linear factor in `param` gives a branch
inline Poly degeneracy_locus(const Poly& rel, Var P, Var c, Var M, Poly* lhs = nullptr, Poly* rhs = nullptr) {
    auto sc = sym_coeffs(rel, P, c, M);
    if (!sc.ok) throw std::invalid_argument("degeneracy_locus: relation not homographic");
    std::vector<Poly> nz;
    for (auto* v : {&sc.c11, &sc.c10, &sc.c00}) {
        Poly f = Poly::from_coeffs(c, *v);
        if (!f.is_zero()) nz.push_back(f);
    }
    if (nz.size() < 2) return Poly();
    if (lhs) *lhs = nz[0];
    if (rhs) *rhs = nz[1];
    Poly r = resultant(nz[0], nz[nz.size() - 1], c);
    return r.primitive();
}

// ---------------------------------------------------------------------------
// univariate rational roots: Durand-Kerner estimates certified exactly

inline std::vector<Rat> rational_roots(const Poly& f, Var v) {
    auto cs = f.coeffs(v);
    utrim(cs);
    std::vector<Rat> a;
    for (auto& c : cs) {
        if (!c.is_const()) throw std::invalid_argument("rational_roots: not univariate");
        a.push_back(c.const_value());
    }
    std::vector<Rat> out;
    auto add = [&](const Rat& r) {
        if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
    };
    // x = 0
    size_t z = 0;
    while (z < a.size() && a[z] == 0) ++z;
    if (z) add(Rat(0));
    a.erase(a.begin(), a.begin() + long(z));
    if (a.size() <= 1) return out;
    // integral primitive
    Int l = 1, g = 0;
    for (auto& x : a) l = lcm(l, x.get_den());
    std::vector<Int> ai;
    for (auto& x : a) ai.push_back(Rat(x * Rat(l)).get_num()), g = gcd(g, ai.back());
    for (auto& x : ai) x /= g;
    size_t n = ai.size() - 1;
    auto value = [&](const Rat& r) {
        Rat s = 0;
        for (size_t i = ai.size(); i-- > 0;) s = s * r + Rat(ai[i]);
        return s;
    };
    if (n == 1) {
        Rat r(-ai[0], ai[1]);
        r.canonicalize();
        add(r);
        return out;
    }
    if (n == 2) {
        Int d = ai[1] * ai[1] - 4 * ai[0] * ai[2];
        if (d >= 0 && mpz_perfect_square_p(d.get_mpz_t())) {
            Int s;
            mpz_sqrt(s.get_mpz_t(), d.get_mpz_t());
            for (int sg : {1, -1}) {
                Rat r(-ai[1] + sg * s, 2 * ai[2]);
                r.canonicalize();
                add(r);
            }
        }
        return out;
    }
    using C = std::complex<long double>;
    std::vector<C> c(n + 1);
    long double lead = ai[n].get_d();
    for (size_t i = 0; i <= n; ++i) c[i] = C((long double)ai[i].get_d() / lead);
    std::vector<C> x(n);
    for (size_t i = 0; i < n; ++i) x[i] = std::pow(C(0.4L, 0.9L), (long double)i);
    for (int it = 0; it < 500; ++it) {
        long double delta = 0;
        for (size_t i = 0; i < n; ++i) {
            C num = 0;
            for (size_t k = n + 1; k-- > 0;) num = num * x[i] + c[k];
            C den = 1;
            for (size_t j = 0; j < n; ++j)
                if (j != i) den *= (x[i] - x[j]);
            if (std::abs(den) == 0) den = C(1e-18L);
            C d = num / den;
            x[i] -= d;
            delta = std::max(delta, std::abs(d));
        }
        if (delta < 1e-16L) break;
    }
    // a rational root p/q of a primitive polynomial has q | a_n
    for (auto& r : x) {
        if (std::abs(r.imag()) > 1e-6L * (1 + std::abs(r.real()))) continue;
        long double t = r.real() * (long double)ai[n].get_d();
        if (std::fabs(t) > 1e17L) continue;
        for (long dlt = -1; dlt <= 1; ++dlt) {
            Int num((long)std::llround(t) + dlt);
            Rat cand(num, ai[n]);
            cand.canonicalize();
            if (value(cand) == 0) add(cand);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// exact solver for small polynomial systems in a few unknowns

struct AlgebraicSolution {
    std::map<std::string, RatFunc> values;  // unknown -> value (may involve free unknowns)
    std::vector<std::string> conditions;     // unresolved polynomial conditions
    std::vector<std::string> free;           // unknowns left free
};

class PolySolver {
public:
    PolySolver(std::vector<Var> unknowns, int max_depth = 40) : unk_(std::move(unknowns)), max_depth_(max_depth) {}

    std::vector<AlgebraicSolution> solve(const std::vector<Poly>& eqs, const std::vector<Poly>& nonzero = {}) {
        out_.clear();
        rec(eqs, {}, nonzero, 0);
        return out_;
    }

private:
    std::vector<Var> unk_;
    int max_depth_;
    std::vector<AlgebraicSolution> out_;
    struct Assign {
        Var v;
        RatFunc e;
    };

    bool is_unknown(Var v) const { return std::find(unk_.begin(), unk_.end(), v) != unk_.end(); }
    std::set<Var> unknowns_in(const Poly& p) const {
        std::set<Var> s;
        for (Var v : p.vars())
            if (is_unknown(v)) s.insert(v);
        return s;
    }

    static std::vector<Poly> clean(const std::vector<Poly>& eqs, bool& inconsistent) {
        inconsistent = false;
        std::vector<Poly> out;
        for (auto& e : eqs) {
            if (e.is_zero()) continue;
            if (e.is_const()) {
                inconsistent = true;
                return {};
            }
            Poly p = e.primitive();
            if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
        }
        std::sort(out.begin(), out.end(), [](const Poly& a, const Poly& b) {
            return a.total_degree() != b.total_degree() ? a.total_degree() < b.total_degree() : a.size() < b.size();
        });
        return out;
    }

    static std::vector<Poly> substitute(const std::vector<Poly>& eqs, Var v, const RatFunc& e) {
        std::vector<Poly> out;
        for (auto& p : eqs) out.push_back(p.has(v) ? RatFunc(p).subs(v, e).num() : p);
        return out;
    }

    void finish(const std::vector<Assign>& as, const std::vector<Poly>& nonzero, const std::vector<Poly>& conds) {
        std::map<Var, RatFunc> val;
        for (size_t i = as.size(); i-- > 0;) {
            RatFunc e = as[i].e.subs(std::map<Var, RatFunc>(val.begin(), val.end()));
            val[as[i].v] = e;
        }
        // nondegeneracy guards
        for (auto& nz : nonzero) {
            RatFunc t = RatFunc(nz).subs(val);
            if (t.is_zero()) return;
            bool vanish = false;
            for (auto& c : conds) {
                // zero modulo a univariate condition
                auto u = unknowns_in(c);
                if (u.size() == 1) {
                    Poly r = prem(t.num(), c, *u.begin());
                    if (r.is_zero()) vanish = true;
                }
            }
            if (vanish) return;
        }
        AlgebraicSolution s;
        for (auto& [v, e] : val) s.values[var_name(v)] = e;
        for (auto& c : conds) s.conditions.push_back(c.str() + " = 0");
        for (Var v : unk_)
            if (!val.count(v)) {
                bool in_cond = false;
                for (auto& c : conds) in_cond |= c.has(v);
                if (!in_cond) s.free.push_back(var_name(v));
            }
        for (auto& o : out_)
            if (o.values.size() == s.values.size() && o.conditions == s.conditions) {
                bool same = true;
                for (auto& [k, v] : o.values)
                    if (!s.values.count(k) || s.values.at(k) != v) same = false;
                if (same) return;
            }
        out_.push_back(std::move(s));
    }

    void rec(const std::vector<Poly>& eqs0, std::vector<Assign> as, std::vector<Poly> nonzero, int depth) {
        if (depth > max_depth_ || out_.size() > 64) return;
        bool bad;
        auto eqs = clean(eqs0, bad);
        if (bad) return;
        if (eqs.empty()) return finish(as, nonzero, {});
        // 1. an equation linear in some unknown
        const Poly* best = nullptr;
        Var bv = 0;
        Poly bc1, bc0;
        size_t bscore = ~size_t(0);
        for (auto& e : eqs)
            for (Var v : unknowns_in(e)) {
                if (e.degree(v) != 1) continue;
                Poly c1 = e.coeff(v, 1);
                size_t score = c1.is_const() ? 0 : 1 + c1.size() * 8 + e.size();
                if (score < bscore) bscore = score, best = &e, bv = v, bc1 = c1, bc0 = e.coeff(v, 0);
            }
        if (best) {
            RatFunc val = RatFunc::normalize(-bc0, bc1);
            std::vector<Poly> rest;
            for (auto& e : eqs)
                if (&e != best) rest.push_back(e);
            auto as2 = as;
            as2.push_back({bv, val});
            auto nz2 = nonzero;
            if (!bc1.is_const()) nz2.push_back(bc1);
            // substitute into guards too
            std::vector<Poly> nz3;
            for (auto& n : nz2) nz3.push_back(n.has(bv) ? RatFunc(n).subs(bv, val).num() : n);
            bool ok = true;
            for (auto& n : nz3)
                if (n.is_zero()) ok = false;
            if (ok) rec(substitute(rest, bv, val), as2, nz3, depth + 1);
            if (!bc1.is_const()) {
                auto e2 = rest;
                e2.push_back(bc1);
                e2.push_back(bc0);
                rec(e2, as, nonzero, depth + 1);
            }
            return;
        }
        // 2. a univariate equation
        for (auto& e : eqs) {
            auto u = unknowns_in(e);
            if (u.size() != 1) continue;
            Var v = *u.begin();
            if (e.vars().size() != 1) continue;  // coefficients must be numeric
            auto roots = rational_roots(e, v);
            Poly rest = e;
            for (auto& r : roots) remove_factor(rest, Poly::variable(v) - Poly(r));
            for (auto& r : roots) {
                auto as2 = as;
                as2.push_back({v, RatFunc(r)});
                std::vector<Poly> nz;
                for (auto& n : nonzero) nz.push_back(n.eval({{v, r}}));
                bool ok = true;
                for (auto& n : nz)
                    if (n.is_zero()) ok = false;
                if (ok) rec(substitute(eqs, v, RatFunc(r)), as2, nz, depth + 1);
            }
            if (!rest.is_const()) {
                // irrational branch: reduce the others modulo it and report
                std::vector<Poly> conds{rest.primitive()};
                bool consistent = true;
                for (auto& o : eqs) {
                    if (&o == &e) continue;
                    Poly r = o.has(v) ? prem(o, rest, v) : o;
                    if (r.is_zero()) continue;
                    if (unknowns_in(r).empty()) {
                        consistent = false;
                        break;
                    }
                    conds.push_back(r.primitive());
                }
                if (consistent) finish(as, nonzero, conds);
            }
            return;
        }
        // 3. eliminate by a resultant between two equations sharing an unknown
        for (size_t i = 0; i < eqs.size(); ++i)
            for (size_t j = i + 1; j < eqs.size(); ++j)
                for (Var v : unknowns_in(eqs[i])) {
                    if (!eqs[j].has(v)) continue;
                    Poly r = resultant(eqs[i], eqs[j], v);
                    if (r.is_zero()) continue;
                    r = r.primitive();
                    if (std::find(eqs.begin(), eqs.end(), r) != eqs.end()) continue;
                    auto e2 = eqs;
                    e2.push_back(r);
                    return rec(e2, as, nonzero, depth + 1);
                }
        // nothing applies: report the remaining system as conditions
        finish(as, nonzero, eqs);
    }
};

}  // namespace qrt
