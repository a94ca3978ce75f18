// End-to-end acceptance run: one PASS/FAIL line per criterion, exit 0 iff all pass.
//
// usage: osclab_acceptance <path-to-osc-lab> <scratch-dir>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "osclab/harness.hpp"

using namespace osclab;
using namespace osclab::harness;

namespace {

struct Outcome {
    bool ok = true;
    std::vector<std::string> notes;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes.push_back("failed: " + what);
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

/// Named assertions must exist, pass, and have at least `min_samples` samples.
void require_assertions(Outcome& o, const Report& rep, const std::vector<std::string>& names, std::size_t min_samples) {
    for (const auto& n : names) {
        const auto* a = rep.battery.find(n);
        if (!a) {
            o.require(false, n + " missing");
            continue;
        }
        o.require(a->passed(), n + " (" + std::to_string(a->violations) + " violations, worst " + fmt(a->measured) +
                                   " > " + fmt(a->bound) + ")");
        o.require(a->samples >= min_samples,
                  n + " has " + std::to_string(a->samples) + " samples < " + std::to_string(min_samples));
    }
}

void require_report_passes(Outcome& o, const Report& rep, const std::string& what) {
    for (const auto& a : rep.battery.assertions())
        if (!a.passed()) o.require(false, what + ": " + a.name);
}

ExperimentConfig scenario(Scenario s, std::int64_t trials) {
    ExperimentConfig c;
    c.scenario = s;
    c.trials = trials;
    return c;
}

// ---------------------------------------------------------------- criteria

Outcome oracle_equivalence() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    auto c = scenario(Scenario::seminorm_chain, 1000);
    c.oracle_trials = 1000;
    const auto rep = run_verify(c);
    const double dt = seconds_since(t0);
    require_assertions(o, rep, {"oracle_variation", "oracle_jump_count", "oracle_overlap_jump_count"}, 1000);
    require_assertions(o, rep, {"oracle_sup_oscillation", "oracle_masked_oscillation"}, 1000);
    o.require(c.n_max <= 12, "families longer than 12");
    o.require(dt < 30.0, "runtime " + fmt(dt) + " s >= 30 s");
    o.notes.push_back("1000 families, n <= 12, r in {1, 1.5, 2, 3}, lambda in {0.25, 0.5, 1}, rel tol 1e-12, " + fmt(dt) + " s");
    return o;
}

Outcome inequality_battery() {
    Outcome o;
    auto c = scenario(Scenario::seminorm_chain, 10000);
    c.oracle_trials = 0;
    const auto rep = run_verify(c);
    require_assertions(o, rep,
                       {"oscillation_below_variation", "variation_below_twice_lr", "crude_oscillation_bound", "sup_bound",
                        "jump_variation_bridge", "jump_sandwich_lower", "jump_sandwich_upper", "maximal_domination",
                        "oscillation_subadditive", "disjoint_union_split", "variation_nonincreasing_in_r"},
                       10000);
    require_report_passes(o, rep, "seminorm_chain");
    o.require(c.tol.inequality == 1e-10, "inequality tolerance changed");
    o.notes.push_back("10000 draws, zero violations, abs slack 1e-10");
    return o;
}

Outcome identity_battery() {
    Outcome o;
    const auto mart = run_verify(scenario(Scenario::martingale_osc, 500));
    require_assertions(o, mart, {"martingale_lattice_identity", "refined_martingale_lattice_identity",
                                 "martingale_block_increment_identity", "refined_martingale_block_increment_identity"},
                       500);
    const auto carl = run_verify(scenario(Scenario::carleson_osc, 500));
    require_assertions(o, carl, {"cutoff_lattice_identity", "cutoff_block_increment_identity"}, 500);
    const auto dz = run_verify(scenario(Scenario::dz_theorem, 500));
    require_assertions(o, dz, {"birkhoff_telescoping", "birkhoff_telescoping_lattice", "composition_matches_joint_average",
                               "composition_matches_joint_average_lattice"},
                       500);
    const auto tel = run_verify(scenario(Scenario::multiparam_telescoping, 500));
    require_assertions(o, tel, {"martingale_pair_telescoping", "average_pair_telescoping", "mixed_pair_telescoping"}, 500);
    for (const auto* r : {&mart, &carl, &dz, &tel}) require_report_passes(o, *r, to_string(r->config.scenario));
    const Tolerances t;
    o.require(t.identity == 1e-12 && t.birkhoff_telescoping == 1e-13 && t.multiparam_telescoping == 1e-11,
              "identity tolerances changed");
    o.notes.push_back("500 draws each; lattice/block 1e-12, Birkhoff 1e-13, multi-parameter 1e-11, composition 1e-12");
    return o;
}

Outcome bessel_bound() {
    Outcome o;
    const auto mart = run_verify(scenario(Scenario::martingale_osc, 500));
    require_assertions(o, mart, {"martingale_bessel", "martingale_levels_bessel"}, 500);
    const auto carl = run_verify(scenario(Scenario::carleson_osc, 500));
    require_assertions(o, carl, {"cutoff_bessel", "fourier_partial_sum_bessel", "haar_partial_sum_bessel"}, 500);
    o.notes.push_back("dyadic, refined dyadic, sharp cutoff, Fourier and Haar partial sums; 500 f each; slack 1e-12");
    return o;
}

Outcome growth_check() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig c;
    c.trials = 500;
    c.J_values = {4, 8, 16, 32, 64};
    for (auto fam : {EstimateFamily::martingale, EstimateFamily::birkhoff}) {
        c.estimate_family = fam;
        const auto rep = run_estimate(c);
        const std::string f = to_string(fam);
        require_assertions(o, rep, {f + "_normalized_curve_nonincreasing", f + "_growth_ratio"}, 1);
        for (const auto& e : rep.estimates)
            if (e.p == 2.0)
                o.notes.push_back(f + ": ratio(64)/ratio(4) = " + fmt(e.empirical_sup.back() / e.empirical_sup.front()));
    }
    const double dt = seconds_since(t0);
    o.require(dt < 180.0, "runtime " + fmt(dt) + " s >= 180 s");
    o.notes.push_back("K = 14 and Z_{2^14}, 500 trials, " + fmt(dt) + " s");
    return o;
}

Outcome gauss_checkpoint() {
    Outcome o;
    auto c = scenario(Scenario::dz_theorem, 100);
    o.require(c.N == 101, "N is not 101");
    const auto rep = run_verify(c);
    require_assertions(o, rep, {"gauss_sum_modulus", "gauss_sum_direct_summation"}, 100);
    require_assertions(o, rep, {"gauss_product_bound"}, 1);
    o.require(c.tol.gauss == 1e-10 && c.tol.gauss_factor == 5.0, "Gauss tolerances changed");
    std::ostringstream d2;
    d2 << "d = 2 deviation within 5x N^{-1} C_2 C_3;";
    for (const auto& [k, v] : rep.observations)
        if (k.starts_with("weyl_constant") || k.starts_with("gauss_product")) d2 << ' ' << k << " = " << fmt(v);
    for (const auto& [k, v] : rep.battery.observations())
        if (k.starts_with("gauss_product")) d2 << ' ' << k << " = " << fmt(v);
    o.notes.push_back("d = 1: all 100 characters give N^{-1/2} within 1e-10, matching direct summation");
    o.notes.push_back(d2.str());
    return o;
}

Outcome degeneration() {
    Outcome o;
    const auto tel = run_verify(scenario(Scenario::multiparam_telescoping, 200));
    require_assertions(o, tel, {"identity_factor_degeneration", "diagonal_below_multiparam_sup", "oracle_multiparam_sup"}, 200);
    if (const auto* a = tel.battery.find("identity_factor_degeneration"))
        o.require(a->measured == 0.0, "identity factors not bit-identical");
    const auto sem = run_verify(scenario(Scenario::seminorm_chain, 1000));
    require_assertions(o, sem, {"diagonal_below_multiparam_sup", "oracle_multiparam_sup"}, 1000);
    o.notes.push_back("identity factors bit-identical; diagonal <= exhaustive 3x3 sup on 1200 grids");
    return o;
}

int run(const std::string& cmd) {
    const int st = std::system(cmd.c_str());
#ifdef WEXITSTATUS
    return st == -1 ? -1 : WEXITSTATUS(st);
#else
    return st;
#endif
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism_and_mutations(const std::string& cli, const std::filesystem::path& dir) {
    Outcome o;
    std::filesystem::create_directories(dir);
    const std::string q = "\"" + cli + "\"";
    auto path = [&](const char* n) { return (dir / n).string(); };
    for (const char* sc : {"seminorm_chain", "martingale_osc", "dz_theorem"}) {
        const std::string base = q + " verify --scenario " + sc + " --trials 200 --seed 9 ";
        const int a = run(base + "--report \"" + path("a.json") + "\"");
        const int b = run("OSC_LAB_THREADS=1 " + base + "--report \"" + path("b.json") + "\"");
        o.require(a == 0 && b == 0, std::string(sc) + " runs exit " + std::to_string(a) + "/" + std::to_string(b));
        o.require(!slurp(path("a.json")).empty() && slurp(path("a.json")) == slurp(path("b.json")),
                  std::string(sc) + " reports differ");
    }
    const std::string est = q + " estimate --family martingale --trials 20 --estimate_K 10 --J_values 4 8 16 ";
    run(est + "--report \"" + path("e1.json") + "\" --plot \"" + path("p1.csv") + "\"");
    run(est + "--report \"" + path("e2.json") + "\" --plot \"" + path("p2.csv") + "\"");
    o.require(slurp(path("e1.json")) == slurp(path("e2.json")) && slurp(path("p1.csv")) == slurp(path("p2.csv")),
              "estimate outputs differ");
    for (const char* m : {"block_boundary", "non_strict", "empty_sup"}) {
        const int rc = run(q + " verify --scenario seminorm_chain --trials 200 --mutation " + m + " --report \"" +
                           path("m.json") + "\" 2>/dev/null");
        o.require(rc == 1, std::string("mutation ") + m + " exit " + std::to_string(rc));
    }
    o.require(run(q + " verify --trials 0 --report \"" + path("z.json") + "\" 2>/dev/null") == 2, "trials=0 not exit 2");
    o.notes.push_back("byte-identical reports across runs and thread caps; block_boundary, non_strict, empty_sup exit 1");
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: osclab_acceptance <osc-lab> <scratch-dir>\n";
        return 2;
    }
    const std::string cli = argv[1];
    const std::filesystem::path dir = argv[2];

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"oracle equivalence", oracle_equivalence},
        {"pointwise inequality battery", inequality_battery},
        {"exact identity battery", identity_battery},
        {"Bessel bound", bessel_bound},
        {"uniform-oscillation growth", growth_check},
        {"Gauss-sum checkpoint", gauss_checkpoint},
        {"degeneration", degeneration},
        {"determinism and negative controls", [&] { return determinism_and_mutations(cli, dir); }},
    };

    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        all &= o.ok;
        std::cout << (o.ok ? "PASS" : "FAIL") << " [" << i + 1 << "/" << criteria.size() << "] " << criteria[i].first << " ("
                  << fmt(seconds_since(t0)) << " s)";
        for (const auto& n : o.notes) std::cout << "\n    " << n;
        std::cout << std::endl;
    }
    return all ? 0 : 1;
}
