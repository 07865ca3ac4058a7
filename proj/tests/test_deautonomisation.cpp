#include "qrtkit/deautonomisation.hpp"

#include <catch_amalgamated.hpp>

using namespace qrt;

namespace {

// x[n+1] + x[n-1] = A[n]/x[n] + B/x[n]^2
System dp1(const char* law) {
    auto s = System::symmetric(parse_relation("X[n+1]+X[n-1] = A[n]/X[n]+B/X[n]^2"), "X");
    s.laws["A"] = parse_law(law, 13);
    s.laws["B"] = parse_law("c", 13);
    return s;
}

System remnant_sym(const char* law) {
    auto s = System::symmetric(parse_relation("X[n+1]*X[n-1] = (X[n]-B[n])/(X[n]-1)"), "X");
    s.laws["B"] = parse_law(law, 13, true);
    return s;
}

ConfinementProbe probe(const char* entry, long k) {
    ConfinementProbe p;
    p.entry = parse_expr(entry);
    p.k = k;
    p.horizon = 30;
    return p;
}

}  // namespace

TEST_CASE("linear law confines the additive equation at zero", "[deautonomisation]") {
    auto rep = confinement_check(dp1("a*n+b"), probe("0", 2));
    CHECK(rep.verdict == ConfinementReport::Confined);
    CHECK(rep.verdict_str() == "CONFINED");
    CHECK(rep.length == rep.length_minus);
    // the singularity pattern: 0, inf, 0, then a finite value
    REQUIRE(rep.pattern.size() > 5);
    CHECK(rep.pattern[1] == "0");
    CHECK(rep.pattern[2] == "inf");
    CHECK(rep.pattern[3] == "0");
    CHECK(rep.pattern[4] != "inf");
}

TEST_CASE("a quadratic law does not confine", "[deautonomisation]") {
    auto rep = confinement_check(dp1("n^2"), probe("0", 2));
    CHECK(rep.verdict == ConfinementReport::NotConfined);
    CHECK(rep.length == -1);
}

TEST_CASE("multiplicative law with a parameter-dependent entry", "[deautonomisation]") {
    auto ok = confinement_check(remnant_sym("a*n+b+per5(...)"), probe("B", 3));
    CHECK(ok.verdict == ConfinementReport::Confined);
    auto bad = confinement_check(remnant_sym("n^2"), probe("B", 3));
    CHECK(bad.verdict == ConfinementReport::NotConfined);
}

TEST_CASE("degree growth of an integrable map is quadratic", "[deautonomisation]") {
    // autonomous case: reference degrees from an independent CAS
    auto s = System::symmetric(parse_relation("X[n+1]*X[n-1] = (X[n]+5/27)/(X[n]-1)"), "X");
    auto g = degree_growth(s, 8);
    std::vector<int> want{0, 1, 1, 2, 2, 3, 4, 6, 7};
    CHECK(g.degrees == want);
    auto gl = degree_growth(remnant_sym("a*n+b"), 15);
    CHECK(gl.classification == "polynomial");
    CHECK(gl.entropy < 0.2);
}

TEST_CASE("degree growth of a non-integrable map is exponential", "[deautonomisation]") {
    auto s = System::symmetric(parse_relation("X[n+1]+X[n-1] = 1/X[n]^2 + 3"), "X");
    auto g = degree_growth(s, 10);
    REQUIRE(g.degrees.size() >= 7);
    std::vector<int> head(g.degrees.begin(), g.degrees.begin() + 7);
    CHECK(head == std::vector<int>{0, 1, 2, 4, 10, 24, 56});
    CHECK(g.classification == "exponential");
    CHECK(g.entropy > 0.7);
    CHECK(classify_growth({1, 1, 1, 1, 1, 1}) == "bounded");
    CHECK(classify_growth({1, 2}) == "undetermined");
}
