#pragma once

// Experiment configuration, assertion batteries, reports and plot data.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "osclab/errors.hpp"

namespace osclab::harness {

using nlohmann::json;

enum class Scenario {
    seminorm_chain,
    martingale_osc,
    carleson_osc,
    dz_theorem,
    projection_hypotheses,
    multiparam_telescoping,
    long_short_split,
};

inline const std::vector<std::pair<Scenario, const char*>>& scenario_names() {
    static const std::vector<std::pair<Scenario, const char*>> names = {
        {Scenario::seminorm_chain, "seminorm_chain"},
        {Scenario::martingale_osc, "martingale_osc"},
        {Scenario::carleson_osc, "carleson_osc"},
        {Scenario::dz_theorem, "dz_theorem"},
        {Scenario::projection_hypotheses, "projection_hypotheses"},
        {Scenario::multiparam_telescoping, "multiparam_telescoping"},
        {Scenario::long_short_split, "long_short_split"},
    };
    return names;
}

inline const char* to_string(Scenario s) {
    for (const auto& [v, n] : scenario_names())
        if (v == s) return n;
    return "seminorm_chain";
}

inline Scenario parse_scenario(const std::string& s) {
    for (const auto& [v, n] : scenario_names())
        if (s == n) return v;
    throw ConfigError("unknown scenario '" + s + "'");
}

/// Pass thresholds. Identity tolerances are absolute deviations unless noted;
/// the calibration constants (doob, growth_*, gauss_factor, long_short_C) are
/// engineering choices and can be overridden.
struct Tolerances {
    double oracle = 1e-12;                  // relative, DP against brute force
    double inequality = 1e-10;              // absolute slack of pointwise inequalities
    double identity = 1e-12;                // projection identities, composition, Bessel
    double birkhoff_telescoping = 1e-13;    // relative to sup |g|
    double multiparam_telescoping = 1e-11;  // relative to sup |f|
    double gauss = 1e-10;
    double doob = 2.0;
    double growth_band = 0.10;
    double growth_ratio = 2.0;
    double gauss_factor = 5.0;
    double long_short_C = 8.0;
};

enum class EstimateFamily { all, martingale, birkhoff, lacunary };

inline const char* to_string(EstimateFamily f) {
    switch (f) {
        case EstimateFamily::all: return "all";
        case EstimateFamily::martingale: return "martingale";
        case EstimateFamily::birkhoff: return "birkhoff";
        case EstimateFamily::lacunary: return "lacunary";
    }
    return "all";
}

inline EstimateFamily parse_estimate_family(const std::string& s) {
    for (auto f : {EstimateFamily::all, EstimateFamily::martingale, EstimateFamily::birkhoff, EstimateFamily::lacunary})
        if (s == to_string(f)) return f;
    throw ConfigError("unknown estimate family '" + s + "'");
}

struct ExperimentConfig {
    std::uint64_t seed = 42;
    std::int64_t trials = 100;
    Scenario scenario = Scenario::seminorm_chain;

    // seminorm batteries
    std::size_t n_max = 12;           // longest random family
    std::int64_t oracle_trials = 1000;  // trials also checked against brute force
    // operator batteries
    unsigned K = 8;                   // dyadic depth
    std::int64_t N = 101;             // prime modulus of the one-dimensional torus
    std::int64_t grid_N = 31;         // side of the two-dimensional torus
    unsigned grid_K = 6;              // dyadic depth per axis in product martingales
    // estimates
    EstimateFamily estimate_family = EstimateFamily::all;
    std::vector<std::size_t> J_values{4, 8, 16, 32, 64};
    std::vector<double> p_values{1.5, 2.0, 4.0};
    std::vector<double> taus{2.0};
    unsigned estimate_K = 14;
    unsigned birkhoff_log2N = 14;
    std::int64_t birkhoff_M_max = 256;
    unsigned lacunary_log2N = 16;
    // long/short split
    double r = 2.0;
    double p = 2.0;

    Tolerances tol;
    std::string mutation = "none";
    std::string report_path;
    std::string plot_path;

    void validate() const {
        auto need = [](bool ok, const std::string& what) {
            if (!ok) throw ConfigError(what);
        };
        need(trials >= 1, "trials must be a positive integer");
        need(n_max >= 2 && n_max <= 12, "n_max must lie in [2, 12]");
        need(oracle_trials >= 0, "oracle_trials must be >= 0");
        need(K >= 2 && K <= 16, "K must lie in [2, 16]");
        need(N >= 3 && N <= 4096, "N must lie in [3, 4096]");
        bool prime = true;
        for (std::int64_t q = 2; q * q <= N; ++q) prime &= N % q != 0;
        need(prime, "N must be prime");
        need(grid_N >= 3 && grid_N <= 256, "grid_N must lie in [3, 256]");
        need(grid_K >= 2 && grid_K <= 8, "grid_K must lie in [2, 8]");
        need(!J_values.empty(), "J_values must not be empty");
        for (std::size_t i = 0; i < J_values.size(); ++i) {
            need(J_values[i] >= 1, "J_values entries must be >= 1");
            if (i) need(J_values[i] > J_values[i - 1], "J_values must increase strictly");
        }
        need(!p_values.empty(), "p_values must not be empty");
        for (double q : p_values) need(q >= 1.0 && std::isfinite(q), "p_values entries must be finite and >= 1");
        for (double t : taus) need(t > 1.0 && std::isfinite(t), "taus entries must be finite and > 1");
        need(estimate_K >= 2 && estimate_K <= 20, "estimate_K must lie in [2, 20]");
        need(J_values.back() < (std::size_t{1} << estimate_K), "J_values exceed the refined martingale steps");
        need(birkhoff_log2N >= 2 && birkhoff_log2N <= 20, "birkhoff_log2N must lie in [2, 20]");
        need(lacunary_log2N >= 2 && lacunary_log2N <= 22, "lacunary_log2N must lie in [2, 22]");
        need(birkhoff_M_max >= 2 && birkhoff_M_max <= (std::int64_t{1} << birkhoff_log2N),
             "birkhoff_M_max must lie in [2, 2^birkhoff_log2N]");
        need(static_cast<std::int64_t>(J_values.back()) < birkhoff_M_max, "J_values exceed birkhoff_M_max - 1");
        need(r >= 1.0 && std::isfinite(r), "r must be finite and >= 1");
        need(p >= 1.0 && std::isfinite(p), "p must be finite and >= 1");
        for (double t : {tol.oracle, tol.inequality, tol.identity, tol.birkhoff_telescoping, tol.multiparam_telescoping,
                         tol.gauss, tol.doob, tol.growth_band, tol.growth_ratio, tol.gauss_factor, tol.long_short_C})
            need(t >= 0.0 && std::isfinite(t), "tolerances must be finite and >= 0");
        try {
            fault::parse_mutation(mutation);
        } catch (const FormatError& e) {
            throw ConfigError(e.what());
        }
    }

    /// Everything that influences results; output paths are left out.
    json to_json() const {
        return json{{"seed", seed},
                    {"trials", trials},
                    {"scenario", to_string(scenario)},
                    {"n_max", n_max},
                    {"oracle_trials", oracle_trials},
                    {"K", K},
                    {"N", N},
                    {"grid_N", grid_N},
                    {"grid_K", grid_K},
                    {"estimate_family", to_string(estimate_family)},
                    {"J_values", J_values},
                    {"p_values", p_values},
                    {"taus", taus},
                    {"estimate_K", estimate_K},
                    {"birkhoff_log2N", birkhoff_log2N},
                    {"birkhoff_M_max", birkhoff_M_max},
                    {"lacunary_log2N", lacunary_log2N},
                    {"r", r},
                    {"p", p},
                    {"mutation", mutation},
                    {"tolerances",
                     {{"oracle", tol.oracle},
                      {"inequality", tol.inequality},
                      {"identity", tol.identity},
                      {"birkhoff_telescoping", tol.birkhoff_telescoping},
                      {"multiparam_telescoping", tol.multiparam_telescoping},
                      {"gauss", tol.gauss},
                      {"doob", tol.doob},
                      {"growth_band", tol.growth_band},
                      {"growth_ratio", tol.growth_ratio},
                      {"gauss_factor", tol.gauss_factor},
                      {"long_short_C", tol.long_short_C}}}};
    }
};

/// One named check accumulated over many samples: passes iff every sample had
/// measured <= bound. `measured` keeps the worst sample.
struct Assertion {
    std::string name;
    std::string property;
    double measured = -std::numeric_limits<double>::infinity();
    double bound = 0.0;
    std::size_t samples = 0;
    std::size_t violations = 0;

    double slack() const { return bound - measured; }
    bool passed() const { return violations == 0 && samples > 0; }
};

class Battery {
public:
    void check(const std::string& name, const std::string& property, double measured, double bound) {
        auto& a = slot(name, property, bound);
        if (std::isnan(measured)) measured = std::numeric_limits<double>::infinity();
        ++a.samples;
        if (!(measured <= bound)) ++a.violations;
        if (measured > a.measured) a.measured = measured;
    }

    /// Boolean form: a failed condition counts as measured 1 against bound 0.
    void expect(const std::string& name, const std::string& property, bool ok) {
        check(name, property, ok ? 0.0 : 1.0, 0.0);
    }

    /// Reported value, not a gate; keeps the maximum over samples.
    void observe(const std::string& name, double value) {
        auto [it, fresh] = observations_.emplace(name, value);
        if (!fresh && value > it->second) it->second = value;
    }

    void merge(const Battery& other) {
        for (const auto& [k, v] : other.observations_) observe(k, v);
        for (const auto& b : other.items_) {
            auto& a = slot(b.name, b.property, b.bound);
            a.samples += b.samples;
            a.violations += b.violations;
            if (b.measured > a.measured) a.measured = b.measured;
        }
    }

    const std::vector<Assertion>& assertions() const { return items_; }
    const std::map<std::string, double>& observations() const { return observations_; }
    const Assertion* find(const std::string& name) const {
        auto it = where_.find(name);
        return it == where_.end() ? nullptr : &items_[it->second];
    }
    bool passed() const {
        for (const auto& a : items_)
            if (!a.passed()) return false;
        return true;
    }

private:
    Assertion& slot(const std::string& name, const std::string& property, double bound) {
        auto it = where_.find(name);
        if (it != where_.end()) return items_[it->second];
        where_.emplace(name, items_.size());
        items_.push_back(Assertion{name, property, -std::numeric_limits<double>::infinity(), bound, 0, 0});
        return items_.back();
    }

    std::vector<Assertion> items_;
    std::map<std::string, std::size_t> where_;
    std::map<std::string, double> observations_;
};

/// Empirical lower bound on an operator constant, swept over J.
struct ConstantEstimate {
    std::string label;
    std::string family;
    double p = 2.0;
    double r = 2.0;
    std::size_t samples = 0;  // trials per J
    std::vector<double> J;
    std::vector<double> empirical_sup;  // max over trials of ||O|| / ||f||
    std::vector<double> normalized;     // empirical_sup / sqrt(J)
    std::vector<double> baseline;       // empirical_sup(J_0) * sqrt(J / J_0)

    double overall_sup() const {
        double m = 0.0;
        for (double v : empirical_sup) m = std::max(m, v);
        return m;
    }
};

struct Curve {
    std::string series;
    std::vector<double> x;
    std::vector<double> y;
};

struct Report {
    ExperimentConfig config;
    std::string command;  // "verify" or "estimate"
    Battery battery;
    std::map<std::string, double> observations;
    std::vector<ConstantEstimate> estimates;
    std::vector<Curve> curves;

    bool passed() const { return battery.passed(); }
    int exit_code() const { return passed() ? 0 : 1; }
};

namespace detail {

inline json number(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

inline json numbers(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) out.push_back(number(x));
    return out;
}

inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return json(v).dump();
}

inline std::string series_name(std::string s) {
    for (auto& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

}  // namespace detail

inline json to_json(const Assertion& a) {
    return json{{"name", a.name},
                {"property", a.property},
                {"measured", detail::number(a.measured)},
                {"bound", detail::number(a.bound)},
                {"slack", detail::number(a.slack())},
                {"samples", a.samples},
                {"violations", a.violations},
                {"passed", a.passed()}};
}

inline json to_json(const ConstantEstimate& e) {
    return json{{"label", e.label},
                {"family", e.family},
                {"p", e.p},
                {"r", e.r},
                {"samples", e.samples},
                {"lower_bound", true},
                {"J", detail::numbers(e.J)},
                {"empirical_sup", detail::numbers(e.empirical_sup)},
                {"normalized", detail::numbers(e.normalized)},
                {"baseline_sqrt_J", detail::numbers(e.baseline)}};
}

inline json to_json(const Report& r) {
    json assertions = json::array();
    for (const auto& a : r.battery.assertions()) assertions.push_back(to_json(a));
    json obs = json::object();
    for (const auto& [k, v] : r.battery.observations()) obs[k] = detail::number(v);
    for (const auto& [k, v] : r.observations) obs[k] = detail::number(v);
    json est = json::array();
    for (const auto& e : r.estimates) est.push_back(to_json(e));
    json curves = json::array();
    for (const auto& c : r.curves)
        curves.push_back({{"series", c.series}, {"x", detail::numbers(c.x)}, {"y", detail::numbers(c.y)}});
    return json{{"command", r.command},
                {"config", r.config.to_json()},
                {"passed", r.passed()},
                {"assertions", assertions},
                {"observations", obs},
                {"estimates", est},
                {"curves", curves}};
}

/// Deterministic text: sorted keys, shortest round-trip doubles, trailing newline.
inline std::string dump_report(const Report& r) { return to_json(r).dump(2) + "\n"; }

// ---------------------------------------------------------------- plot data

struct PlotPoint {
    double x = 0.0;
    double y = 0.0;
    std::string series;
    bool operator==(const PlotPoint&) const = default;
};

/// Flattened curves of a report, in report order.
inline std::vector<PlotPoint> plot_points(const Report& r) {
    std::vector<PlotPoint> out;
    auto add = [&](const std::string& series, const std::vector<double>& x, const std::vector<double>& y) {
        for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) out.push_back({x[i], y[i], detail::series_name(series)});
    };
    for (const auto& e : r.estimates) {
        add(e.label + "/empirical_sup", e.J, e.empirical_sup);
        add(e.label + "/normalized", e.J, e.normalized);
        add(e.label + "/baseline_sqrt_J", e.J, e.baseline);
    }
    for (const auto& c : r.curves) add(c.series, c.x, c.y);
    return out;
}

/// CSV with header x,y,series.
inline std::string emit_plot_data(const Report& r) {
    std::ostringstream out;
    out << "x,y,series\n";
    for (const auto& p : plot_points(r))
        out << detail::format_number(p.x) << ',' << detail::format_number(p.y) << ',' << p.series << '\n';
    return out.str();
}

inline std::vector<PlotPoint> parse_plot_data(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != "x,y,series") throw FormatError("plot CSV: header must be x,y,series");
    std::vector<PlotPoint> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto a = line.find(',');
        const auto b = a == std::string::npos ? a : line.find(',', a + 1);
        if (b == std::string::npos) throw FormatError("plot CSV: malformed row '" + line + "'");
        try {
            out.push_back({std::stod(line.substr(0, a)), std::stod(line.substr(a + 1, b - a - 1)), line.substr(b + 1)});
        } catch (const std::exception&) {
            throw FormatError("plot CSV: malformed number in '" + line + "'");
        }
    }
    return out;
}

}  // namespace osclab::harness
