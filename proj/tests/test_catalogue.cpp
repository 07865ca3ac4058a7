#include "qrtkit/catalogue.hpp"

#include <catch_amalgamated.hpp>

#include <set>

using namespace qrt;

namespace {

const Catalogue& shipped() {
    static const Catalogue C = Catalogue::load(QRTKIT_DEFAULT_CATALOGUE);
    return C;
}

// a one-entry catalogue around an additive map with a biquadratic invariant
json tiny(json checks) {
    return json{{"entries",
                 {{{"id", "TINY"},
                   {"description", "additive test map"},
                   {"system", {{"kind", "symmetric"}, {"x", "w"}, {"rel", "w[n+1]+w[n-1] = a/w[n]+1/w[n]^2"}}},
                   {"params", {{"a", "3"}}},
                   {"invariant", {{"K", "w[n]^2*w[n-1]^2-a*w[n]*w[n-1]-(w[n]+w[n-1])"}}},
                   {"checks", checks}}}}};
}

}  // namespace

TEST_CASE("shipped catalogue loads", "[catalogue]") {
    auto& C = shipped();
    CHECK(C.entries.size() >= 18);
    std::set<std::string> ids;
    for (auto& e : C.entries) {
        CHECK_FALSE(e.description.empty());
        ids.insert(e.id);
    }
    CHECK(ids.size() == C.entries.size());
    CHECK(C.identities.size() >= 6);
    CHECK_FALSE(C.out_of_scope.empty());
}

TEST_CASE("every shipped check has its expected outcome", "[catalogue]") {
    auto rs = verify_all(shipped());
    REQUIRE(rs.size() >= 80);
    for (auto& r : rs) {
        INFO(r.entry << " | " << r.name << " | " << r.detail);
        CHECK(r.pass);
        CHECK_FALSE(r.error);
    }
    CHECK(exit_status(rs) == 0);
    std::set<int> crit;
    for (auto& r : rs) crit.insert(r.criterion);
    for (int k = 1; k <= 11; ++k) CHECK(crit.count(k));
}

TEST_CASE("reports are independent of the job count", "[catalogue]") {
    auto& C = shipped();
    std::vector<std::string> ids{"REMNANT_SYM", "CASE7_XEQ", "DP1_PAIR", "CASE10_AUTONOMOUS"};
    auto a = make_report(C, verify_entries(C, ids, {}, 1)).dump();
    auto b = make_report(C, verify_entries(C, ids, {}, 3)).dump();
    CHECK(a == b);
    CHECK(a.find("seconds") == std::string::npos);
}

TEST_CASE("variants are selected by --set", "[catalogue]") {
    auto& C = shipped();
    auto rs = verify_entry(C, C.get("CASE10_AUTONOMOUS"), {{"gamma", "0"}});
    REQUIRE(rs.size() == 2);
    for (auto& r : rs) CHECK(r.pass);
}

TEST_CASE("unknown ids and malformed data", "[catalogue]") {
    auto& C = shipped();
    CHECK_THROWS_AS(C.get("NO_SUCH"), CatalogueError);
    CHECK_THROWS_AS(verify_entries(C, {"REMNANT_SYM", "NO_SUCH"}), CatalogueError);
    CHECK_THROWS_AS(Catalogue::load("/nonexistent/catalogue.json"), CatalogueError);
    json dup = tiny(json::array());
    dup["entries"].push_back(dup["entries"][0]);
    CHECK_THROWS_AS(Catalogue::from_json(dup), CatalogueError);
    auto T = Catalogue::from_json(tiny(json::array({{{"type", "no_such_check"}}})));
    auto rs = verify_entry(T, T.get("TINY"));
    REQUIRE(rs.size() == 1);
    CHECK(rs[0].error);
    CHECK(exit_status(rs) == 2);
}

TEST_CASE("checks on an ad-hoc entry", "[catalogue]") {
    json checks = json::array({
        {{"type", "conservation"}, {"name", "conserved"}, {"start", {"1/2", "2/3"}}, {"steps", 12}},
        {{"type", "miura"},
         {"name", "linear coupling gives the Fibonacci recursion"},
         {"system", {{"kind", "asymmetric"}, {"x", "p"}, {"y", "q"}, {"rel_a", "q[n] = p[n+1]+p[n]"}, {"rel_b", "p[n] = q[n]-q[n-1]"}}},
         {"laws", json::object()},
         {"steps", 8},
         {"targets", {"p[n+1] = p[n]+p[n-1]"}}},
    });
    auto T = Catalogue::from_json(tiny(checks));
    auto rs = verify_entry(T, T.get("TINY"));
    REQUIRE(rs.size() == 2);
    for (auto& r : rs) {
        INFO(r.name << " | " << r.detail);
        CHECK(r.pass);
    }
    // a wrong invariant fails without being a data error
    json bad = tiny(json::array({checks[0]}));
    bad["entries"][0]["invariant"]["K"] = "w[n]*w[n-1]";
    auto B = Catalogue::from_json(bad);
    auto rb = verify_entry(B, B.get("TINY"));
    CHECK_FALSE(rb[0].pass);
    CHECK_FALSE(rb[0].error);
    CHECK(exit_status(rb) == 1);
}
