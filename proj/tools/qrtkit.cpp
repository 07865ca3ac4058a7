// qrtkit: command-line front end to the catalogue.
//
//   qrtkit verify CASE7_REMNANT            run one entry
//   qrtkit verify --all --jobs 4           everything, exit 0 iff all pass
//   qrtkit orbit CASE7_REMNANT --start 2,3 --steps 5
//   qrtkit confine CASE7_REMNANT --law "n^2"
//
// Exit codes: 0 pass, 1 verification failure, 2 usage or data error.

#include "qrtkit/catalogue.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <sstream>

#ifndef QRTKIT_DEFAULT_CATALOGUE
#define QRTKIT_DEFAULT_CATALOGUE "data/catalogue.json"
#endif

using namespace qrt;

namespace {

struct Globals {
    std::string catalogue = QRTKIT_DEFAULT_CATALOGUE;
    std::string out;
    bool json = false;
    bool timing = false;
    unsigned jobs = 1;
    std::uint64_t seed = 1;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::map<std::string, std::string> parse_sets(const std::vector<std::string>& v) {
    std::map<std::string, std::string> out;
    for (auto& s : v) {
        auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--set expects name=value, got " + s);
        out[s.substr(0, eq)] = s.substr(eq + 1);
    }
    return out;
}

std::map<std::string, Rat> merged_params(const Entry& e, const std::map<std::string, std::string>& set) {
    auto p = e.params;
    for (auto& [k, v] : set) p[k] = cat::rat(json(v));
    return p;
}

Rat parse_rat(const std::string& s) {
    RatFunc f = parse_expr(s);
    if (!f.is_const()) throw ParseError("not a rational number: " + s);
    return f.const_value();
}

// writes to --out if given, else stdout
void emit(const Globals& g, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(g.out);
    if (!f) throw UsageError("cannot write " + g.out);
    f << text;
}

std::string result_line(const CheckResult& r) {
    std::string tag = r.error ? "ERROR" : r.pass ? "PASS " : "FAIL ";
    std::string crit = r.criterion ? " [" + std::to_string(r.criterion) + "]" : "";
    return tag + " " + r.entry + crit + " " + r.name + ": " + r.detail + "\n";
}

const json* first_check(const Entry& e, const std::string& type) {
    if (!e.raw.contains("checks")) return nullptr;
    for (auto& c : e.raw.at("checks"))
        if (c.at("type") == type) return &c;
    return nullptr;
}

// declared law block of an entry, with `law` replacing one slot
json law_block(const Entry& e, const json* chk, const std::string& law, std::string slot) {
    json laws = e.raw.value("declared_law", json::object());
    if (laws.empty() && chk && chk->contains("laws")) laws = chk->at("laws");
    if (laws.empty() && law.empty()) throw UsageError(e.id + " declares no parameter law; pass --law");
    if (law.empty()) return laws;
    if (slot.empty()) {
        if (chk && chk->contains("perturb")) slot = chk->at("perturb").get<std::string>();
        else if (!laws.empty()) slot = laws.begin().key();
        else throw UsageError("--slot is required for " + e.id);
    }
    bool mult = laws.contains(slot) && laws[slot].is_object() && laws[slot].value("multiplicative", false);
    laws[slot] = mult ? json{{"law", law}, {"multiplicative", true}} : json(law);
    return laws;
}

int cmd_verify(const Globals& g, const Catalogue& C, const std::vector<std::string>& ids, bool all,
               const std::vector<std::string>& sets) {
    auto set = parse_sets(sets);
    if (!all && ids.empty()) throw UsageError("verify needs entry ids or --all");
    std::vector<CheckResult> rs;
    if (all) {
        std::vector<std::string> every;
        for (auto& e : C.entries) every.push_back(e.id);
        rs = verify_entries(C, every, set, g.jobs);
        for (auto& r : verify_identities(C)) rs.push_back(std::move(r));
    } else {
        std::vector<std::string> entries;
        std::vector<const json*> idents;
        for (auto& id : ids) {
            bool found = C.has(id);
            if (found) entries.push_back(id);
            for (auto& c : C.identities)
                if (c.at("id") == id) idents.push_back(&c), found = true;
            if (!found) throw CatalogueError("unknown entry " + id);
        }
        rs = verify_entries(C, entries, set, g.jobs);
        for (auto* c : idents) rs.push_back(verify_identity(*c, C.seed));
    }
    int st = exit_status(rs);
    if (g.json || !g.out.empty()) emit(g, make_report(C, rs, g.timing).dump(2) + "\n");
    if (!g.json) {
        size_t pass = 0;
        for (auto& r : rs) std::cout << result_line(r), pass += r.pass;
        std::cout << pass << "/" << rs.size() << " checks passed\n";
    }
    return st;
}

int cmd_orbit(const Globals& g, const Catalogue& C, const std::string& id, const std::string& start, long steps,
              const std::vector<std::string>& sets) {
    const Entry& e = C.get(id);
    auto comma = start.find(',');
    if (comma == std::string::npos) throw UsageError("--start expects two values a,b");
    Rat a = parse_rat(start.substr(0, comma)), b = parse_rat(start.substr(comma + 1));
    if (steps < 0) throw UsageError("--steps must be non-negative");
    System s = e.system.specialize(merged_params(e, parse_sets(sets)));
    Orbit o = iterate_steps(s, a, b, 0, steps);
    std::ostringstream os;
    write_csv(os, s, o);
    emit(g, os.str());
    return 0;
}

int cmd_eliminate(const Globals& g, const Catalogue& C, const std::string& id, const std::string& keep,
                  const std::vector<std::string>& sets) {
    const Entry& e = C.get(id);
    if (keep != "x" && keep != "y") throw UsageError("--keep must be x or y");
    System s = e.system.specialize(merged_params(e, parse_sets(sets)));
    auto eq = eliminate(s, keep[0]);
    if (g.json) {
        emit(g, json{{"entry", id}, {"relation", eq.rel.str()}, {"removed", eq.removed}, {"reducible", eq.reducible}}.dump(2) + "\n");
    } else {
        std::string t = eq.str() + "\n";
        for (auto& r : eq.removed) t += "removed: " + r + "\n";
        if (eq.reducible) t += "warning: the relation did not survive the orbit test\n";
        emit(g, t);
    }
    return eq.reducible ? 1 : 0;
}

int cmd_restore(const Globals& g, const Catalogue& C, const std::string& id, const std::vector<std::string>& maps,
                const std::string& mu, const std::string& family, const std::vector<std::string>& sets) {
    const Entry& e = C.get(id);
    std::vector<CheckResult> rs;
    if (!maps.empty()) {
        // ad-hoc: --map old:new:expr with old written in new
        json c{{"type", "restoration"}, {"name", "ad-hoc restoration"}, {"homographies", json::array()}};
        for (auto& m : maps) {
            auto p1 = m.find(':'), p2 = m.find(':', p1 + 1);
            if (p1 == std::string::npos || p2 == std::string::npos) throw UsageError("--map expects old:new:expr");
            c["homographies"].push_back({{"old", m.substr(0, p1)}, {"new", m.substr(p1 + 1, p2 - p1 - 1)}, {"expr", m.substr(p2 + 1)}});
        }
        if (!mu.empty()) c["mu"] = mu;
        c["show_invariant"] = true;
        c["target"] = family.empty() ? json::object() : json{{"family", family}, {"allow_conditions", true}};
        auto set = parse_sets(sets);
        if (!set.empty()) c = with_params(c, set);
        rs.push_back(run_check(C, e, c));
    } else {
        for (auto& r : verify_entry(C, e, parse_sets(sets)))
            if (r.type == "restoration" || r.type == "solve_restoration") rs.push_back(r);
        if (rs.empty()) throw UsageError(id + " has no restoration checks; pass --map");
    }
    if (g.json) {
        emit(g, make_report(C, rs, g.timing).at("checks").dump(2) + "\n");
    } else {
        std::string t;
        for (auto& r : rs) {
            t += result_line(r);
            for (auto& [k, v] : r.data.items()) t += "  " + k + ": " + v.dump() + "\n";
        }
        emit(g, t);
    }
    return exit_status(rs);
}

int cmd_confine(const Globals& g, const Catalogue& C, const std::string& id, const std::string& law, const std::string& slot,
                const std::string& entry, long k, long horizon) {
    const Entry& e = C.get(id);
    const json* chk = first_check(e, "confinement");
    ConfinementProbe pr;
    if (!entry.empty()) pr.entry = parse_expr(entry);
    else if (chk) pr.entry = parse_expr(cat::str(chk->at("entry")));
    else throw UsageError(id + " has no confinement probe; pass --entry");
    pr.k = k >= 0 ? k : chk ? chk->value("k", 2L) : 2L;
    pr.horizon = horizon;
    System s = e.system;
    s.laws = cat::make_laws(law_block(e, chk, law, slot), C.seed + 6);
    auto rep = confinement_check(s, pr);
    json j{{"entry", id}, {"verdict", rep.verdict_str()}, {"length", rep.length}, {"length_minus_eps", rep.length_minus},
           {"pattern", rep.pattern}};
    if (g.json) emit(g, j.dump(2) + "\n");
    else {
        std::string t = rep.verdict_str();
        if (rep.verdict == ConfinementReport::Confined) t += " after " + std::to_string(rep.length) + " half-steps";
        t += "\npattern:";
        for (auto& p : rep.pattern) t += " " + p;
        emit(g, t + "\n");
    }
    return 0;
}

int cmd_entropy(const Globals& g, const Catalogue& C, const std::string& id, const std::string& law, const std::string& slot,
                long N) {
    const Entry& e = C.get(id);
    const json* chk = first_check(e, "degree_growth");
    if (!chk) chk = first_check(e, "confinement");
    System s = e.system;
    s.laws = cat::make_laws(law_block(e, chk, law, slot), C.seed + 6);
    auto dg = degree_growth(s, N);
    json j{{"entry", id}, {"degrees", dg.degrees}, {"classification", dg.classification}, {"entropy_estimate", dg.entropy}};
    if (g.json) emit(g, j.dump(2) + "\n");
    else {
        std::string t = dg.classification + "\ndegrees:";
        for (int d : dg.degrees) t += " " + std::to_string(d);
        emit(g, t + "\n");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact verification of QRT-type mappings and their deautonomisations"};
    app.fallthrough();
    app.require_subcommand(1);
    Globals g;
    app.add_option("--catalogue", g.catalogue, "catalogue JSON file");
    app.add_option("--out", g.out, "write the report or table to this file");
    app.add_flag("--json", g.json, "JSON output");
    app.add_flag("--timing", g.timing, "include per-check seconds in JSON reports");
    app.add_option("--jobs", g.jobs, "worker threads for verify")->check(CLI::Range(1u, 256u));
    app.add_option("--seed", g.seed, "seed for randomized identity checks");

    std::vector<std::string> ids, sets, maps;
    bool all = false, csv = false;
    std::string start = "3/7,5/11", keep = "x", law, slot, entry, mu, family;
    long steps = 10, k = -1, horizon = 30, N = 15;

    auto* verify = app.add_subcommand("verify", "run catalogue checks");
    verify->add_option("ids", ids, "entry or identity ids");
    verify->add_flag("--all", all, "every entry and identity");
    verify->add_option("--set", sets, "parameter override name=value (selects a matching variant)");

    auto* orbit = app.add_subcommand("orbit", "exact orbit as CSV");
    std::string orbit_id;
    orbit->add_option("id", orbit_id)->required();
    orbit->add_option("--start", start, "initial values a,b: (x[0], x[-1]) or (x[0], y[-1])");
    orbit->add_option("--steps", steps, "number of steps");
    orbit->add_flag("--csv", csv, "CSV output (the default)");
    orbit->add_option("--set", sets);

    auto* elim = app.add_subcommand("eliminate", "single-variable equation of an asymmetric system");
    std::string elim_id;
    elim->add_option("id", elim_id)->required();
    elim->add_option("--keep", keep, "x or y");
    elim->add_option("--set", sets);

    auto* restore = app.add_subcommand("restore", "restoration checks, or an ad-hoc homography");
    std::string restore_id;
    restore->add_option("id", restore_id)->required();
    restore->add_option("--map", maps, "old:new:expr, the old variable written in the new one");
    restore->add_option("--mu", mu, "shift of the invariant");
    restore->add_option("--family", family, "mult_sym, add_sym, sum_shift or prod_shift");
    restore->add_option("--set", sets);

    auto* confine = app.add_subcommand("confine", "singularity confinement with the declared or given law");
    std::string confine_id;
    confine->add_option("id", confine_id)->required();
    confine->add_option("--law", law, "law for the slot, e.g. \"a*n+b+per4(...)\"");
    confine->add_option("--slot", slot, "parameter receiving --law");
    confine->add_option("--entry", entry, "singular value entered");
    confine->add_option("--k", k, "half-step index of the entry");
    confine->add_option("--horizon", horizon, "half-steps followed after the entry");

    auto* entropy = app.add_subcommand("entropy", "degree growth with the declared or given law");
    std::string entropy_id;
    entropy->add_option("id", entropy_id)->required();
    entropy->add_option("--law", law);
    entropy->add_option("--slot", slot);
    entropy->add_option("-N", N, "number of iterates");

    auto* report = app.add_subcommand("report", "full JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        Catalogue C = Catalogue::load(g.catalogue);
        C.seed = g.seed;
        if (*verify) return cmd_verify(g, C, ids, all, sets);
        if (*orbit) return cmd_orbit(g, C, orbit_id, start, steps, sets);
        if (*elim) return cmd_eliminate(g, C, elim_id, keep, sets);
        if (*restore) return cmd_restore(g, C, restore_id, maps, mu, family, sets);
        if (*confine) return cmd_confine(g, C, confine_id, law, slot, entry, k, horizon);
        if (*entropy) return cmd_entropy(g, C, entropy_id, law, slot, N);
        if (*report) {
            auto rs = verify_all(C, g.jobs);
            emit(g, make_report(C, rs, g.timing).dump(2) + "\n");
            return exit_status(rs);
        }
    } catch (const CatalogueError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
