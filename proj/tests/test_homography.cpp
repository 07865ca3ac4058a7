#include "qrtkit/homography.hpp"

#include <catch_amalgamated.hpp>

using namespace qrt;

namespace {

Homography H(const char* e) { return Homography::from_expr(parse_expr(e), var("u")); }

bool same_map(const Homography& a, const Homography& b) {
    return rf_equal(a.apply(RatFunc::variable("u")), b.apply(RatFunc::variable("u")));
}

}  // namespace

TEST_CASE("composition and inverse", "[homography]") {
    auto h = H("(2*u + 3)/(u - 1)");
    CHECK(h.det() == Poly(-5));
    CHECK(compose(h, h.inverse()).is_identity());
    CHECK(compose(h.inverse(), h).is_identity());
    // (u+1) o (2u) = 2u + 1
    CHECK(same_map(compose(H("u + 1"), H("2*u")), H("2*u + 1")));
    CHECK_FALSE(same_map(compose(H("2*u"), H("u + 1")), H("2*u + 1")));
    // symbolic entries
    auto s = H("(a*u + 1)/(u + b)");
    CHECK(s.det() == parse_poly("a*b - 1"));
    CHECK(compose(s, s.inverse()).is_identity());
}

TEST_CASE("degenerate homographies are rejected", "[homography]") {
    CHECK_THROWS_AS(H("(2*u + 4)/(u + 2)"), DegenerateHomography);
    CHECK_THROWS_AS(H("u^2"), DegenerateHomography);
}

TEST_CASE("conjugation and its inverse round trip", "[homography]") {
    auto s = System::asymmetric(parse_relation("x[n+1]*x[n] = a*(1-y[n])"), parse_relation("y[n]*y[n-1] = 1-x[n]"));
    auto h = H("(u + 2)/(u - 3)"), g = H("3*u - 1");
    Pullback fwd{{"x", {h, "x"}}, {"y", {g, "y"}}};
    Pullback back{{"x", {h.inverse(), "x"}}, {"y", {g.inverse(), "y"}}};
    System t = conjugate_system(s, fwd);
    CHECK(t.rel_a != s.rel_a);
    System r = conjugate_system(t, back);
    auto dyn = dynamic_vars(s.rel_a * s.rel_b, {"x", "y"});
    auto la = proportional(r.rel_a, s.rel_a, dyn), lb = proportional(r.rel_b, s.rel_b, dyn);
    REQUIRE(la);
    REQUIRE(lb);
    CHECK(la->is_const());
    CHECK(lb->is_const());
}

TEST_CASE("invariant pullback", "[homography]") {
    Invariant inv(parse_expr("(x[n]*y[n] + a)/(x[n] + y[n])"));
    Pullback id{{"x", {Homography(), "x"}}, {"y", {Homography(), "y"}}};
    // identity map with mu = 0 returns 1/K
    CHECK(rf_equal(transform_invariant(inv, id, RatFunc()), inv.K.inv()));
    // scaling x by 7 rescales the pulled back invariant as expected
    Pullback sc{{"x", {H("7*u"), "X"}}, {"y", {Homography(), "y"}}};
    CHECK(rf_equal(pullback(inv.K, sc), parse_expr("(7*X[n]*y[n] + a)/(7*X[n] + y[n])")));
    // K and 7K are the same invariant up to a constant factor
    auto dyn = dynamic_vars(inv.K.num() * inv.K.den(), {"x", "y"});
    auto l = proportional(inv.K * RatFunc(Poly(7)), inv.K, dyn);
    REQUIRE(l);
    CHECK(*l == RatFunc(Poly(7)));
    CHECK_FALSE(proportional(inv.K + RatFunc(Poly(1)), inv.K, dyn));
}

TEST_CASE("canonical shapes", "[homography]") {
    auto add = parse_relation("x[n+1] + x[n-1] = (a*x[n] + b)/(x[n]^2 - 1)");
    auto m = match_shape("add_sym", add, "x");
    REQUIRE(m.ok);
    CHECK(m.conditions.empty());
    CHECK(m.coeffs.at("A") == parse_expr("a"));
    CHECK(m.coeffs.at("B") == parse_expr("b"));

    auto mul = parse_relation("x[n+1]*x[n-1] = (x[n]-a)*(x[n]-b)/((1-c*x[n])*(1-d*x[n]))");
    auto mm = match_shape("mult_sym", mul, "x");
    REQUIRE(mm.ok);
    CHECK(mm.coeffs.at("A+B") == parse_expr("a + b"));
    CHECK(mm.coeffs.at("C*D") == parse_expr("c*d"));

    auto asym = parse_relation("x[n+1] + 2*x[n-1] = x[n]");
    CHECK_FALSE(match_shape("add_sym", asym, "x").ok);
    CHECK_FALSE(match_shape("no_such_family", add, "x").ok);
}

TEST_CASE("degeneracy locus of a multiplicative relation", "[homography]") {
    // numerator and denominator in x[n] share a root exactly when a = b
    auto rel = parse_relation("x[n+1]*x[n-1] = (x[n]-a)/(x[n]-b)");
    Poly locus = degeneracy_locus(rel, ivar("x", 1), ivar("x", 0), ivar("x", -1));
    REQUIRE_FALSE(locus.is_zero());
    auto l = proportional(locus, parse_poly("a - b"), {});
    CHECK(l);
}

TEST_CASE("small exact solver", "[homography]") {
    CHECK(rational_roots(parse_poly("6*t^3 - 5*t^2 - 2*t + 1"), var("t")).size() == 3);
    auto r = rational_roots(parse_poly("t^2 - 2"), var("t"));
    CHECK(r.empty());
    PolySolver ps({var("p"), var("q")});
    auto sols = ps.solve({parse_poly("p*q - 6"), parse_poly("p + q - 5")});
    REQUIRE(sols.size() == 2);
    for (auto& s : sols) {
        auto p = s.values.at("p"), q = s.values.at("q");
        CHECK(p * q == RatFunc(Poly(6)));
        CHECK(p + q == RatFunc(Poly(5)));
    }
}
