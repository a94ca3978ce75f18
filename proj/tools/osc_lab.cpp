// osc-lab: command-line front end for the oscillation library.
//
// Exit codes: 0 success / all assertions hold, 1 an assertion was violated,
// 2 usage, configuration or input errors.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "osclab/osclab.hpp"

namespace {

using namespace osclab;
using io::json;

constexpr int kPass = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    out << text;
    if (!out) throw FormatError("failed writing " + path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json read_json(const std::string& path) {
    if (path == "-") {
        try {
            return json::parse(std::cin);
        } catch (const json::exception& e) {
            throw FormatError(std::string("stdin: ") + e.what());
        }
    }
    return io::read_json_file(path);
}

ParamFamily read_series(const std::string& path) {
    if (path == "-") return io::read_series(std::cin);
    return io::read_series_file(path);
}

/// "t;t;t" with comma-separated coordinates inside each entry, e.g. "0,1;2,3".
IncreasingSequence parse_sequence(const std::string& text) {
    std::vector<IndexPoint> entries;
    std::stringstream outer(text);
    std::string item;
    while (std::getline(outer, item, ';')) {
        IndexPoint p;
        for (const auto& c : io::detail::split_csv(item)) p.push_back(parse_rational(c));
        if (p.empty()) throw FormatError("empty entry in --sequence");
        entries.push_back(std::move(p));
    }
    return IncreasingSequence(std::move(entries));
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
    std::vector<std::int64_t> out;
    for (const auto& c : io::detail::split_csv(text)) {
        const double v = io::detail::parse_double(c, "--sequence");
        if (v != static_cast<double>(static_cast<std::int64_t>(v))) throw FormatError("--sequence entries must be integers");
        out.push_back(static_cast<std::int64_t>(v));
    }
    return out;
}

AverageStrategy parse_strategy(const std::string& s) {
    if (s == "automatic") return AverageStrategy::automatic;
    if (s == "direct") return AverageStrategy::direct;
    if (s == "kernel") return AverageStrategy::kernel;
    throw ConfigError("strategy must be automatic, direct or kernel");
}

unsigned dyadic_depth(std::size_t n, const std::string& who) {
    if (n < 2 || (n & (n - 1)) != 0) throw DomainError(who + ": field length must be a power of two");
    return static_cast<unsigned>(std::countr_zero(n));
}

std::shared_ptr<const OperatorFamily> make_family(const std::string& name, std::size_t n) {
    if (name == "martingale") return std::make_shared<MartingaleFamily>(dyadic_depth(n, name));
    if (name == "refined_martingale") return std::make_shared<MartingaleFamily>(dyadic_depth(n, name), true);
    if (name == "cutoff") return std::make_shared<CutoffFamily>(n);
    if (name == "smooth_bump") return std::make_shared<SmoothBumpFamily>(n);
    if (name == "fourier_partial_sum")
        return std::make_shared<PartialSumFamily>(std::make_shared<const OrthonormalSystem>(OrthonormalSystem::fourier(n)));
    if (name == "haar_partial_sum")
        return std::make_shared<PartialSumFamily>(
            std::make_shared<const OrthonormalSystem>(OrthonormalSystem::haar(dyadic_depth(n, name))));
    throw ConfigError("unknown family '" + name + "'");
}

// ---------------------------------------------------------------- seminorm

struct SeminormArgs {
    std::string input;
    std::string kind = "variation";
    double r = 2.0;
    double lambda = 1.0;
    std::string sequence;
    std::size_t j_max = 0;
    double epsilon = 1e-3;
    std::string out;
};

int run_seminorm(const SeminormArgs& a) {
    const auto fam = read_series(a.input);
    json out;
    if (a.kind == "variation") {
        out = io::to_json(variation(fam, a.r));
    } else if (a.kind == "oscillation") {
        if (a.sequence.empty()) throw ConfigError("--kind oscillation needs --sequence");
        out = io::to_json(oscillation(fam, parse_sequence(a.sequence), a.r));
    } else if (a.kind == "sup_oscillation") {
        if (fam.dim() == 1) {
            out = io::to_json(sup_oscillation(fam, a.r, a.j_max));
        } else {
            MultiparamSearch opts;
            opts.j_max = a.j_max;
            out = io::to_json(sup_oscillation_multiparam(fam, a.r, opts));
        }
    } else if (a.kind == "jump_count") {
        out = io::to_json(jump_count(fam, a.lambda));
    } else if (a.kind == "overlap_jump_count") {
        out = io::to_json(overlap_jump_count(fam, a.lambda));
    } else if (a.kind == "sup_norm") {
        out = io::to_json(sup_norm(fam));
    } else if (a.kind == "maximal_domination") {
        const auto m = maximal_domination(fam, a.r);
        out = json{{"kind", "maximal_domination"}, {"parameter", a.r}, {"maximal", m.maximal}, {"base", m.base},
                   {"oscillation", m.oscillation}, {"slack", m.slack()}};
    } else if (a.kind == "convergence") {
        const auto c = convergence_certificate(fam, a.epsilon);
        out = json{{"kind", "convergence"}, {"epsilon", a.epsilon}, {"found", c.found}};
        if (c.found) {
            out["threshold"] = to_string(c.threshold);
            out["tail_diameter"] = c.tail_diameter;
            out["tail_size"] = c.tail_size;
        }
    } else {
        throw ConfigError("unknown seminorm kind '" + a.kind + "'");
    }
    write_text(a.out, dump(out));
    return kPass;
}

// ---------------------------------------------------------------- average / multiparam

struct AverageArgs {
    std::string function;
    std::vector<std::string> specs;
    std::string strategy = "automatic";
    bool check = false;
    double tolerance = 1e-12;
    std::string out;
};

int run_average(const AverageArgs& a) {
    const auto f = io::lattice_function_from_json(read_json(a.function));
    const auto spec = io::average_spec_from_json(read_json(a.specs.at(0)));
    write_text(a.out, dump(io::to_json(ergodic_average(f, spec, parse_strategy(a.strategy)))));
    return kPass;
}

int run_multiparam(const AverageArgs& a) {
    const auto f = io::lattice_function_from_json(read_json(a.function));
    std::vector<AverageSpec> specs;
    for (const auto& s : a.specs) specs.push_back(io::average_spec_from_json(read_json(s)));
    const auto composed = multiparam_average(f, specs, parse_strategy(a.strategy));
    json out{{"result", io::to_json(composed)}};
    int rc = kPass;
    if (a.check) {
        const double scale = std::max(1.0, norm(f, std::numeric_limits<double>::infinity()));
        std::vector<AverageSpec> reversed(specs.rbegin(), specs.rend());
        const double joint = max_abs_diff(composed, multiparam_average_direct(f, specs)) / scale;
        const double swap = max_abs_diff(composed, multiparam_average(f, reversed)) / scale;
        out["composition_residual"] = joint;
        out["commutation_defect"] = swap;
        out["tolerance"] = a.tolerance;
        const bool ok = joint <= a.tolerance && swap <= a.tolerance;
        out["passed"] = ok;
        if (!ok) rc = kViolation;
    }
    write_text(a.out, dump(out));
    return rc;
}

// ---------------------------------------------------------------- project

struct ProjectArgs {
    std::string family;
    std::string input;
    std::optional<std::int64_t> index;
    std::string sequence;
    double r = 2.0;
    bool maximal = false;
    std::string out;
};

int run_project(const ProjectArgs& a) {
    const Field f = io::field_from_json(read_json(a.input));
    const auto fam = make_family(a.family, f.size());
    json out{{"family", fam->name()}};
    int modes = 0;
    if (a.index) {
        out["index"] = *a.index;
        out["result"] = io::field_to_json(fam->apply(*a.index, f));
        ++modes;
    }
    if (!a.sequence.empty()) {
        const auto seq = parse_int_list(a.sequence);
        const auto osc = oscillation_field(*fam, f, seq, a.r);
        out["sequence"] = seq;
        out["r"] = a.r;
        out["oscillation"] = io::field_to_json(osc);
        out["oscillation_l2"] = field_norm(osc, 2.0);
        ++modes;
    }
    if (a.maximal) {
        const auto m = maximal_function(*fam, f);
        out["maximal"] = io::field_to_json(m);
        out["maximal_l2"] = field_norm(m, 2.0);
        ++modes;
    }
    if (modes == 0) throw ConfigError("project needs --index, --sequence or --maximal");
    write_text(a.out, dump(out));
    return kPass;
}

// ---------------------------------------------------------------- verify / estimate

struct ExperimentArgs {
    harness::ExperimentConfig cfg;
    std::string scenario = "seminorm_chain";
    std::string family = "all";
    std::string config;
};

/// Config file items as command-line tokens for `sub`: top-level keys and keys
/// in a section named after the subcommand.
std::vector<std::string> config_tokens(const std::string& path, const std::string& sub) {
    std::vector<std::string> out{sub};
    for (const auto& item : CLI::ConfigTOML().from_file(path)) {
        if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == sub)) continue;
        if (item.name == "config" || item.name == "++" || item.name == "--") continue;
        out.push_back("--" + item.name);
        for (const auto& v : item.inputs) out.push_back(v);
    }
    return out;
}

void add_experiment_options(CLI::App* sub, ExperimentArgs& a, bool verify) {
    auto& c = a.cfg;
    sub->add_option("--config", a.config, "Key-value configuration file (INI/TOML); command-line flags take precedence");
    sub->add_option("--seed", c.seed, "Base seed for per-trial random streams")->capture_default_str();
    sub->add_option("--trials", c.trials, "Number of seeded trials")->capture_default_str();
    sub->add_option("--report", c.report_path, "Write the JSON report here (default: stdout)");
    sub->add_option("--plot", c.plot_path, "Write x,y,series plot data here");
    sub->add_option("--tol_oracle", c.tol.oracle)->capture_default_str();
    sub->add_option("--tol_inequality", c.tol.inequality)->capture_default_str();
    sub->add_option("--tol_identity", c.tol.identity)->capture_default_str();
    if (verify) {
        sub->add_option("--scenario", a.scenario, "Battery to run")->capture_default_str();
        sub->add_option("--mutation", c.mutation, "Fault injection: none, block_boundary, non_strict, empty_sup")
            ->capture_default_str();
        sub->add_option("--n_max", c.n_max, "Longest random scalar family")->capture_default_str();
        sub->add_option("--oracle_trials", c.oracle_trials, "Trials also checked against brute force")->capture_default_str();
        sub->add_option("--K", c.K, "Dyadic depth of martingale batteries")->capture_default_str();
        sub->add_option("--N", c.N, "Prime modulus of the one-dimensional torus")->capture_default_str();
        sub->add_option("--grid_N", c.grid_N, "Side of the two-dimensional torus")->capture_default_str();
        sub->add_option("--grid_K", c.grid_K, "Dyadic depth per axis of product martingales")->capture_default_str();
        sub->add_option("--r", c.r, "Exponent r of the long/short split")->capture_default_str();
        sub->add_option("--p", c.p, "Exponent p of the long/short split")->capture_default_str();
        sub->add_option("--tol_birkhoff_telescoping", c.tol.birkhoff_telescoping)->capture_default_str();
        sub->add_option("--tol_multiparam_telescoping", c.tol.multiparam_telescoping)->capture_default_str();
        sub->add_option("--tol_gauss", c.tol.gauss)->capture_default_str();
        sub->add_option("--tol_doob", c.tol.doob)->capture_default_str();
        sub->add_option("--tol_gauss_factor", c.tol.gauss_factor)->capture_default_str();
        sub->add_option("--tol_long_short_C", c.tol.long_short_C)->capture_default_str();
    } else {
        sub->add_option("--family", a.family, "martingale, birkhoff, lacunary or all")->capture_default_str();
        sub->add_option("--J_values", c.J_values, "Sequence lengths J")->capture_default_str();
        sub->add_option("--p_values", c.p_values, "Exponents p of the normalized ratios")->capture_default_str();
        sub->add_option("--taus", c.taus, "Lacunarity parameters tau > 1")->capture_default_str();
        sub->add_option("--estimate_K", c.estimate_K, "Dyadic depth of the martingale sweep")->capture_default_str();
        sub->add_option("--birkhoff_log2N", c.birkhoff_log2N)->capture_default_str();
        sub->add_option("--birkhoff_M_max", c.birkhoff_M_max)->capture_default_str();
        sub->add_option("--lacunary_log2N", c.lacunary_log2N)->capture_default_str();
        sub->add_option("--tol_growth_band", c.tol.growth_band)->capture_default_str();
        sub->add_option("--tol_growth_ratio", c.tol.growth_ratio)->capture_default_str();
    }
}

int finish_report(const harness::Report& rep) {
    write_text(rep.config.report_path, harness::dump_report(rep));
    if (!rep.config.plot_path.empty()) write_text(rep.config.plot_path, harness::emit_plot_data(rep));
    for (const auto& a : rep.battery.assertions())
        if (!a.passed())
            std::cerr << "violated: " << a.name << " (" << a.violations << "/" << a.samples << ", worst " << a.measured
                      << " > " << a.bound << ")\n";
    return rep.exit_code();
}

int run_verify(ExperimentArgs& a) {
    a.cfg.scenario = harness::parse_scenario(a.scenario);
    return finish_report(harness::run_verify(a.cfg));
}

int run_estimate(ExperimentArgs& a) {
    a.cfg.estimate_family = harness::parse_estimate_family(a.family);
    return finish_report(harness::run_estimate(a.cfg));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Oscillation and variation seminorm laboratory"};
    app.require_subcommand(1);

    SeminormArgs sem;
    auto* s = app.add_subcommand("seminorm", "Evaluate a seminorm of a parametrized series (CSV or JSON)");
    s->add_option("--input,-i", sem.input, "Series file, '-' for stdin")->required();
    s->add_option("--kind,-k", sem.kind,
                  "variation, oscillation, sup_oscillation, jump_count, overlap_jump_count, sup_norm, "
                  "maximal_domination or convergence")
        ->capture_default_str();
    s->add_option("-r", sem.r, "Exponent r >= 1")->capture_default_str();
    s->add_option("--lambda", sem.lambda, "Jump size")->capture_default_str();
    s->add_option("--sequence", sem.sequence, "Increasing sequence 't;t;...', coordinates comma-separated");
    s->add_option("--j-max", sem.j_max, "Largest J for sup_oscillation (0 = unbounded)")->capture_default_str();
    s->add_option("--epsilon", sem.epsilon, "Cauchy tolerance for convergence certificates")->capture_default_str();
    s->add_option("--out,-o", sem.out, "Output file (default: stdout)");

    AverageArgs avg;
    auto* a = app.add_subcommand("average", "Polynomial ergodic average of a lattice function");
    a->add_option("--function,-f", avg.function, "Lattice function JSON")->required();
    a->add_option("--spec,-s", avg.specs, "Average specification JSON")->required()->expected(1);
    a->add_option("--strategy", avg.strategy, "automatic, direct or kernel")->capture_default_str();
    a->add_option("--out,-o", avg.out, "Output file (default: stdout)");

    AverageArgs mp;
    auto* m = app.add_subcommand("multiparam", "Composition of commuting polynomial averages");
    m->add_option("--function,-f", mp.function, "Lattice function JSON")->required();
    m->add_option("--spec,-s", mp.specs, "Average specification JSON, one per factor")->required()->expected(1, 16);
    m->add_option("--strategy", mp.strategy, "automatic, direct or kernel")->capture_default_str();
    m->add_flag("--check", mp.check, "Compare with the joint double average and the reversed composition");
    m->add_option("--tolerance", mp.tolerance, "Relative tolerance for --check")->capture_default_str();
    m->add_option("--out,-o", mp.out, "Output file (default: stdout)");

    ProjectArgs proj;
    auto* p = app.add_subcommand("project", "Apply a projection or operator family to a sampled function");
    p->add_option("--family", proj.family,
                  "martingale, refined_martingale, cutoff, fourier_partial_sum, haar_partial_sum or smooth_bump")
        ->required();
    p->add_option("--input,-i", proj.input, "JSON array of values or [re, im] pairs")->required();
    p->add_option("--index", proj.index, "Evaluate T_t f at this index");
    p->add_option("--sequence", proj.sequence, "Comma-separated indices for the pointwise oscillation");
    p->add_option("-r", proj.r, "Oscillation exponent")->capture_default_str();
    p->add_flag("--maximal", proj.maximal, "Emit the maximal function sup_t |T_t f|");
    p->add_option("--out,-o", proj.out, "Output file (default: stdout)");

    ExperimentArgs ver;
    auto* v = app.add_subcommand("verify", "Run an invariant battery and write a JSON report");
    add_experiment_options(v, ver, true);

    ExperimentArgs est;
    auto* e = app.add_subcommand("estimate", "Empirical oscillation constants over J sweeps");
    add_experiment_options(e, est, false);

    try {
        app.parse(argc, argv);
        for (auto [sub, args] : {std::pair{v, &ver}, std::pair{e, &est}}) {
            if (!*sub || args->config.empty()) continue;
            // Config values first, then the command line again on top of them.
            auto tokens = config_tokens(args->config, sub->get_name());
            std::reverse(tokens.begin(), tokens.end());
            app.parse(tokens);
            app.parse(argc, argv);
        }
    } catch (const CLI::ParseError& err) {
        return app.exit(err) == 0 ? kPass : kUsage;
    }

    try {
        if (*s) return run_seminorm(sem);
        if (*a) return run_average(avg);
        if (*m) return run_multiparam(mp);
        if (*p) return run_project(proj);
        if (*v) return run_verify(ver);
        if (*e) return run_estimate(est);
    } catch (const ConfigError& err) {
        std::cerr << "configuration error: " << err.what() << "\n";
        return kUsage;
    } catch (const FormatError& err) {
        std::cerr << "input error: " << err.what() << "\n";
        return kUsage;
    } catch (const DomainError& err) {
        std::cerr << "domain error: " << err.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
