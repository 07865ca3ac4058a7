#include "qrtkit/multistep.hpp"

#include <catch_amalgamated.hpp>

using namespace qrt;

namespace {

System dp1_pair() {
    return System::asymmetric(parse_relation("X[n+1]*X[n] = Y[n]"), parse_relation("Y[n]+Y[n-1] = A+B/X[n]"), "X", "Y");
}

ThreePointEquation tp(const char* rel, const char* base) { return three_point(parse_relation(rel), base); }

}  // namespace

TEST_CASE("eliminating one variable of a multiplicative-additive pair", "[elimination]") {
    auto s = dp1_pair();
    auto ex = eliminate(s, 'x');
    CHECK(ex.base == "X");
    CHECK_FALSE(ex.reducible);
    CHECK(equations_equal(ex, tp("X[n+1]+X[n-1] = A/X[n]+B/X[n]^2", "X")));
    CHECK_FALSE(equations_equal(ex, tp("X[n+1]+X[n-1] = A/X[n]-B/X[n]^2", "X")));

    auto ey = eliminate(s, 'y');
    auto target = tp("(Y[n+1]+Y[n])*(Y[n]+Y[n-1]) = B^2/(Y[n]+A/2)", "Y");
    // equal only after translating Y by A/2
    CHECK_FALSE(equations_equal(ey, target));
    CHECK(equations_equal(ey, target, Homography::from_expr(parse_expr("u - A/2"), var("u"))));
}

TEST_CASE("elimination on a numeric QRT system", "[elimination]") {
    auto s = System::asymmetric(
        parse_relation("(x[n+1]-4)/x[n+1]*(x[n]-4)/x[n]*(y[n]-1)/(y[n]-9) = 1"),
        parse_relation("(y[n]-9)/(y[n]-25)*(y[n-1]-9)/(y[n-1]-25)*(x[n]-36)/(x[n]-4) = 1"));
    auto ex = eliminate(s, 'x');
    CHECK_FALSE(ex.reducible);
    CHECK_FALSE(ex.removed.empty());
    CHECK(equations_equal(ex, tp("(x[n+1]-16)/x[n+1]*(x[n-1]-16)/x[n-1]*(x[n]-4)/(x[n]-36) = 1", "x")));
}

TEST_CASE("elimination argument checks", "[elimination]") {
    auto sym = System::symmetric(parse_relation("x[n+1]+x[n-1] = 1/x[n]"));
    CHECK_THROWS_AS(eliminate(sym, 'x'), std::invalid_argument);
    CHECK_THROWS_AS(eliminate(dp1_pair(), 'z'), std::invalid_argument);
}

TEST_CASE("double step from the shifted invariant", "[multistep]") {
    Rat B(-5, 27);
    Bindings bb{{"B", RatFunc(Poly(B))}};
    auto s = System::symmetric(parse_relation("X[n+1]*X[n-1] = (X[n]-B)/(X[n]-1)", bb), "X");
    Invariant inv(parse_expr("(X[n]^2*X[n-1]^2-2*X[n]*X[n-1]*(X[n]+X[n-1])+X[n]^2+X[n-1]^2-(B+1)*(X[n]+X[n-1])+B)/(X[n]*X[n-1])", bb));
    auto d = double_step(s, inv);
    auto target = three_point(
        parse_relation("((X[n]*X[n+2]-B)/(X[n]*X[n+2]-1))*((X[n]*X[n-2]-B)/(X[n]*X[n-2]-1)) = (X[n]-B)/(X[n]-1)", bb), "X");
    // compare in the n+1 / n-1 slots
    auto to_unit = [](const Poly& p) {
        return p.rename({{ivar("X", 2), ivar("X", 1)}, {ivar("X", -2), ivar("X", -1)}});
    };
    CHECK(equations_equal(three_point(to_unit(d.rel), "X"), three_point(to_unit(target.rel), "X")));
    // the relation also holds on an exact orbit
    auto rep = verify_multistep(d.rel, s, 20, false);
    CHECK(rep.pass);
    CHECK(rep.points >= 10);
}

TEST_CASE("multistep relations with non-autonomous parameters", "[multistep]") {
    auto s = System::symmetric(parse_relation("X[n+1]*X[n-1] = (X[n]-B[n])/(X[n]-1)"), "X");
    s.laws["B"] = parse_law("a*n+b+per5(...)", 13);
    // second factor carries B at n-1
    auto good = parse_relation("((X[n]*X[n+2]-B[n+1])/(X[n]*X[n+2]-1))*((X[n]*X[n-2]-B[n-1])/(X[n]*X[n-2]-1)) = (X[n]-B[n])/(X[n]-1)");
    auto bad = parse_relation("((X[n]*X[n+2]-B[n+1])/(X[n]*X[n+2]-1))*((X[n]*X[n-2]-B[n+1])/(X[n]*X[n-2]-1)) = (X[n]-B[n])/(X[n]-1)");
    auto rg = verify_multistep(good, s, 24, false);
    CHECK(rg.pass);
    CHECK_FALSE(rg.shifted);
    CHECK_FALSE(verify_multistep(bad, s, 24, true).pass);
}

TEST_CASE("shift search recovers a relabelled index", "[multistep]") {
    auto s = System::asymmetric(parse_relation("X[n+1]*X[n] = A[n]*(1-Y[n])"), parse_relation("Y[n]*Y[n-1] = 1-X[n]"), "X", "Y");
    s.laws["A"] = parse_law("a*n+b+per4(...)", 13);
    // rel_a written one step late in X
    auto late = parse_relation("X[n+2]*X[n] = A[n]*(1-Y[n])");
    auto rep = verify_multistep(late, s, 20, true);
    CHECK(rep.pass);
    CHECK(rep.shifted);
    CHECK(rep.offsets.at("X[n+2]") == -1);
}
