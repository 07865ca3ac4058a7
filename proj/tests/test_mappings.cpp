#include "qrtkit/mappings.hpp"

#include <catch_amalgamated.hpp>

#include <sstream>

using namespace qrt;

namespace {

const Rat A0(32, 27);

Bindings bind_A() { return {{"A", RatFunc(Poly(A0))}}; }

System remnant() {
    return System::asymmetric(parse_relation("X[n+1]*X[n] = A*(1-Y[n])", bind_A()),
                              parse_relation("Y[n]*Y[n-1] = 1-X[n]"), "X", "Y");
}

Invariant remnant_invariant() {
    return Invariant(parse_expr(
        "(X[n]*Y[n]*(X[n]+Y[n])-X[n]^2-A*Y[n]^2+(A+1)*X[n]+2*A*Y[n]-A)/(X[n]*Y[n])", bind_A()));
}

System sym_remnant(const Rat& B) {
    return System::symmetric(parse_relation("X[n+1]*X[n-1] = (X[n]-B)/(X[n]-1)", {{"B", RatFunc(Poly(B))}}), "X");
}

}  // namespace

TEST_CASE("asymmetric orbit follows rel_b then rel_a", "[mappings]") {
    auto s = remnant();
    Orbit o = iterate_steps(s, Rat(2), Rat(3), 0, 5);
    REQUIRE(o.singular.empty());
    // z_0 = x_0, z_1 = y_0, z_2 = x_1
    CHECK(o.at(0) == 2);
    CHECK(o.at(1) == Rat(-1, 3));
    CHECK(o.at(2) == Rat(64, 81));
    CHECK(o.at(3) == Rat(-17, 27));
    CHECK(o.at(10) == Rat(10816, 4233));
}

TEST_CASE("invariant value and conservation", "[mappings]") {
    auto s = remnant();
    auto inv = remnant_invariant();
    auto v = inv.K.eval({{ivar("X", 0), Rat(1)}, {ivar("Y", 0), Rat(1)}});
    REQUIRE(v.ok());
    CHECK(v.value == Rat(86, 27));
    auto rep = check_conservation(s, inv, Rat(2), Rat(3), 10);
    CHECK(rep.pass);
    CHECK(rep.checked >= 10);
    // a perturbed invariant is not conserved
    Invariant bad(inv.K + parse_expr("X[n]"));
    CHECK_FALSE(check_conservation(s, bad, Rat(2), Rat(3), 10).pass);
}

TEST_CASE("symmetric map conserves its biquadratic invariant", "[mappings]") {
    Rat B(-5, 27);
    auto s = sym_remnant(B);
    Invariant inv(parse_expr("(X[n]^2*X[n-1]^2-2*X[n]*X[n-1]*(X[n]+X[n-1])+X[n]^2+X[n-1]^2-(B+1)*(X[n]+X[n-1])+B)/(X[n]*X[n-1])",
                             {{"B", RatFunc(Poly(B))}}));
    CHECK(check_conservation(s, inv, Rat(3, 7), Rat(5, 11), 12).pass);
    CHECK(check_reversible(s, Rat(3, 7), Rat(5, 11), 1));
}

TEST_CASE("specialisation substitutes parameters", "[mappings]") {
    auto s = System::asymmetric(parse_relation("X[n+1]*X[n] = A*(1-Y[n])"), parse_relation("Y[n]*Y[n-1] = 1-X[n]"), "X", "Y");
    CHECK(s.parameters().count("A"));
    auto sp = s.specialize({{"A", A0}});
    CHECK(sp.parameters().empty());
    CHECK(sp.rel_a == remnant().rel_a);
}

TEST_CASE("singular orbits are marked, not fatal", "[mappings]") {
    auto s = remnant();
    // x_0 = 1 gives y_0 = 0 and then a pole
    Orbit o = iterate_steps(s, Rat(1), Rat(3), 0, 3);
    CHECK_FALSE(o.singular.empty());
    CHECK(o.has(2));
    CHECK_FALSE(o.has(3));
    std::ostringstream os;
    write_csv(os, s, o);
    CHECK(os.str().find("AtSingularity") != std::string::npos);
    CHECK(os.str().rfind("n,x,y\n", 0) == 0);
}

TEST_CASE("csv of a zero-step orbit holds the initial row", "[mappings]") {
    auto s = remnant();
    std::ostringstream os;
    write_csv(os, s, iterate_steps(s, Rat(2), Rat(3), 0, 0));
    CHECK(os.str() == "n,x,y\n0,2,\n");
    auto ss = sym_remnant(Rat(2));
    std::ostringstream o2;
    write_csv(o2, ss, iterate_steps(ss, Rat(3), Rat(5), 1, 2));
    CHECK(o2.str() == "n,x\n0,3\n1,5\n2,1/4\n3,7/15\n");
}
