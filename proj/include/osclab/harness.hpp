#pragma once

// Verification batteries and empirical constant estimation.
//
// Every trial draws its randomness from trial_rng(seed, trial), writes into
// its own Battery, and batteries are merged in trial order, so a report is a
// pure function of the configuration.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "osclab/brute_force.hpp"
#include "osclab/compose.hpp"
#include "osclab/lattice.hpp"
#include "osclab/long_short.hpp"
#include "osclab/parallel.hpp"
#include "osclab/projections.hpp"
#include "osclab/random.hpp"
#include "osclab/report.hpp"
#include "osclab/seminorms.hpp"

namespace osclab::harness {

namespace detail {

using namespace osclab::brute;

inline std::vector<std::int64_t> iota(std::int64_t lo, std::int64_t hi) {
    std::vector<std::int64_t> v;
    for (auto i = lo; i <= hi; ++i) v.push_back(i);
    return v;
}

inline double rel_diff(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

inline double sup_abs(const Field& f) { return field_norm(f, std::numeric_limits<double>::infinity()); }

template <class TrialFn>
Battery run_trials(std::size_t trials, TrialFn&& fn) {
    std::vector<Battery> per(trials);
    parallel_for(trials, [&](std::size_t t) {
        try {
            fn(t, per[t]);
            per[t].expect("evaluation_completes", "every trial evaluates without raising", true);
        } catch (const std::exception&) {
            per[t].expect("evaluation_completes", "every trial evaluates without raising", false);
        }
    });
    Battery out;
    for (const auto& b : per) out.merge(b);
    return out;
}

inline std::int64_t uniform(Rng& rng, std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

/// Sorted distinct values drawn from [lo, hi], count in [2, max_count].
inline std::vector<std::int64_t> random_index_chain(Rng& rng, std::int64_t lo, std::int64_t hi, std::size_t max_count) {
    const auto span = static_cast<std::size_t>(hi - lo + 1);
    const std::size_t count = static_cast<std::size_t>(uniform(rng, 2, static_cast<std::int64_t>(std::min(span, max_count))));
    auto pos = random_positions(rng, span, count - 1);
    std::vector<std::int64_t> out;
    for (auto p : pos) out.push_back(lo + static_cast<std::int64_t>(p));
    return out;
}

inline double lr_norm(const ParamFamily& fam, double r) {
    double s = 0.0;
    for (auto v : fam.values()) s += std::pow(std::abs(v), r);
    return std::pow(s, 1.0 / r);
}

/// Three distinct sorted values from [lo, hi].
inline std::array<std::int64_t, 3> random_triple(Rng& rng, std::int64_t lo, std::int64_t hi) {
    const auto pos = random_positions(rng, static_cast<std::size_t>(hi - lo + 1), 2);
    return {lo + static_cast<std::int64_t>(pos[0]), lo + static_cast<std::int64_t>(pos[1]), lo + static_cast<std::int64_t>(pos[2])};
}

inline ParamFamily random_grid_family(Rng& rng, std::size_t side, Ensemble e) {
    const auto v = random_real(rng, side * side, e);
    std::vector<IndexPoint> idx;
    std::vector<Scalar> vals;
    for (std::size_t a = 0; a < side; ++a)
        for (std::size_t b = 0; b < side; ++b) {
            idx.push_back({Rational(static_cast<std::int64_t>(a)), Rational(static_cast<std::int64_t>(b))});
            vals.emplace_back(v[a * side + b]);
        }
    return ParamFamily(std::move(idx), std::move(vals));
}

inline Field field_at_points(const std::vector<Field>& values, std::size_t x) {
    Field out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(v[x]);
    return out;
}

inline std::shared_ptr<const OperatorFamily> on_axis(std::shared_ptr<const OperatorFamily> base, std::size_t n, std::size_t axis) {
    return std::make_shared<AxisLifted>(std::move(base), std::vector<std::size_t>{n, n}, axis);
}

inline IncreasingSequence integer_sequence(const std::vector<std::vector<std::int64_t>>& pts) {
    std::vector<IndexPoint> e;
    for (const auto& p : pts) {
        IndexPoint q;
        for (auto c : p) q.push_back(Rational(c));
        e.push_back(std::move(q));
    }
    return IncreasingSequence(std::move(e));
}

/// Coordinatewise strictly increasing chain of tuples drawn from per-axis index lists.
inline std::vector<std::vector<std::int64_t>> random_tuple_chain(Rng& rng, const std::vector<std::vector<std::int64_t>>& axes,
                                                                 std::size_t max_len) {
    std::size_t len = max_len;
    for (const auto& a : axes) len = std::min(len, a.size());
    len = static_cast<std::size_t>(uniform(rng, 2, static_cast<std::int64_t>(std::max<std::size_t>(len, 2))));
    std::vector<std::vector<std::size_t>> picks;
    for (const auto& a : axes) picks.push_back(random_positions(rng, a.size(), len - 1));
    std::vector<std::vector<std::int64_t>> out(len, std::vector<std::int64_t>(axes.size()));
    for (std::size_t j = 0; j < len; ++j)
        for (std::size_t i = 0; i < axes.size(); ++i) out[j][i] = axes[i][picks[i][j]];
    return out;
}

/// Tuple pair lo <= hi coordinatewise drawn from the axes.
inline std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> random_ordered_pair(
    Rng& rng, const std::vector<std::vector<std::int64_t>>& axes) {
    std::vector<std::int64_t> lo, hi;
    for (const auto& a : axes) {
        auto u = a[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(a.size()) - 1))];
        auto v = a[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(a.size()) - 1))];
        lo.push_back(std::min(u, v));
        hi.push_back(std::max(u, v));
    }
    return {lo, hi};
}

inline IntPolynomial random_polynomial(Rng& rng) {
    switch (uniform(rng, 0, 4)) {
        case 0: return IntPolynomial::monomial(1, 0, 1);
        case 1: return IntPolynomial::monomial(1, 0, 2);
        case 2: return IntPolynomial::monomial(1, 0, 3);
        case 3: return IntPolynomial(1, {{{2}, 1}, {{1}, 1}}, true);
        default: return IntPolynomial(1, {{{3}, 2}, {{1}, -1}}, true);
    }
}

inline Coord random_shift(Rng& rng, std::size_t d) {
    Coord v(d, 0);
    while (std::all_of(v.begin(), v.end(), [](auto c) { return c == 0; }))
        for (auto& c : v) c = uniform(rng, -3, 3);
    return v;
}

inline LatticeFunction character(std::int64_t N, std::vector<std::int64_t> freq) {
    const std::size_t d = freq.size();
    auto f = LatticeFunction::cyclic(d, N);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto x = f.coords(i);
        std::int64_t phase = 0;
        for (std::size_t k = 0; k < d; ++k) phase = (phase + freq[k] * x[k]) % N;
        f.values()[i] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(phase) / static_cast<double>(N));
    }
    return f;
}

inline double sup_abs(const LatticeFunction& f) { return norm(f, std::numeric_limits<double>::infinity()); }

/// max over nonzero frequencies a of sqrt(N) * sup_x |A^P_N e_a(x)| on Z_N.
inline double one_parameter_weyl_constant(const IntPolynomial& P, std::int64_t N) {
    double best = 0.0;
    for (std::int64_t a = 1; a < N; ++a) {
        const auto avg = ergodic_average(character(N, {a}), AverageSpec::single(P, N, {1}));
        best = std::max(best, sup_abs(avg) * std::sqrt(static_cast<double>(N)));
    }
    return best;
}

// ---------------------------------------------------------------- seminorm_chain

inline void seminorm_trial(const ExperimentConfig& cfg, std::size_t t, Battery& b) {
    static constexpr double rs[] = {1.0, 1.5, 2.0, 3.0};
    static constexpr double lams[] = {0.25, 0.5, 1.0};
    auto rng = trial_rng(cfg.seed, t);
    const std::size_t n = 2 + t % (cfg.n_max - 1);
    const auto fam = random_family(rng, n, ensemble_for_trial(t));
    const auto other = random_family(rng, n, ensemble_for_trial(t + 1));
    const double r = rs[t % 4];
    const double lam = lams[(t / 4) % 3];
    const auto pos = random_positions(rng, n, static_cast<std::size_t>(uniform(rng, 1, static_cast<std::int64_t>(n) - 1)));
    const auto seq = IncreasingSequence::from_positions(fam, pos);
    const double tol = cfg.tol.inequality;

    if (static_cast<std::int64_t>(t) < cfg.oracle_trials) {
        const double otol = cfg.tol.oracle;
        for (double q : rs)
            b.check("oracle_variation", "dynamic-programming r-variation equals exhaustive enumeration",
                    rel_diff(variation(fam, q).value, variation_bruteforce(fam, q).value), otol);
        b.check("oracle_sup_oscillation", "dynamic-programming uniform r-oscillation equals exhaustive search",
                rel_diff(sup_oscillation(fam, r).value, sup_oscillation_bruteforce(fam, r).value), otol);
        for (double l : lams) {
            b.check("oracle_jump_count", "greedy/DP jump count equals exhaustive enumeration",
                    rel_diff(jump_count(fam, l).value, jump_count_bruteforce(fam, l).value), otol);
            b.check("oracle_overlap_jump_count", "overlapping-pairs jump count equals exhaustive search",
                    rel_diff(overlap_jump_count(fam, l).value, overlap_jump_count_bruteforce(fam, l).value), otol);
        }
        IndexMask mask(n);
        std::bernoulli_distribution keep(0.5);
        for (std::size_t i = 0; i < n; ++i) mask[i] = keep(rng);
        b.check("oracle_masked_oscillation", "oscillation over a subdomain equals the definition (empty supremum is 0)",
                rel_diff(oscillation(fam, seq, r, mask).value, oscillation_definition(fam, pos, r, mask)), otol);
        const auto grid = random_grid_family(rng, 3, ensemble_for_trial(t));
        const double full = sup_oscillation_bruteforce(grid, r).value;
        b.check("oracle_multiparam_sup", "two-parameter uniform oscillation equals exhaustive search on a 3x3 grid",
                rel_diff(sup_oscillation_multiparam(grid, r).value, full), otol);
        b.check("diagonal_below_multiparam_sup", "diagonal-sequence oscillation never exceeds the multi-parameter supremum",
                sup_oscillation_diagonal(grid, r).value - full, tol);
    }

    const double O = oscillation(fam, seq, r).value;
    const double V = variation(fam, r).value;
    const double L = lr_norm(fam, r);
    b.check("oscillation_below_variation", "O^r_{I,J} <= V^r", O - V, tol);
    b.check("variation_below_twice_lr", "V^r <= 2 (sum_t |a_t|^r)^{1/r}", V - 2.0 * L, tol);
    b.check("crude_oscillation_bound", "O^r_{I,J} <= 2 (sum_t |a_t|^r)^{1/r}", O - 2.0 * L, tol);

    const double sup = sup_norm(fam).value;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t t0 = 0; t0 < n; ++t0) worst = std::max(worst, sup - std::abs(fam.value(t0)) - V);
    b.check("sup_bound", "sup_t |a_t| <= |a_{t0}| + V^r for every t0", worst, tol);

    b.check("variation_nonincreasing_in_r", "r -> V^r is nonincreasing", variation(fam, r + 0.5).value - V, tol);
    if (n > 2) {
        const std::vector<Scalar> sub(fam.values().begin() + 1, fam.values().end());
        b.check("variation_monotone_in_index_set", "I_1 subset of I_2 implies V^r over I_1 <= V^r over I_2",
                variation(ParamFamily::sequence(std::span<const Scalar>(sub)), r).value - V, tol);
    }
    for (double l : {lam, 2.0 * lam}) {
        const double N_l = jump_count(fam, l).value;
        b.check("jump_variation_bridge", "lambda N_lambda^{1/r} <= V^r", l * std::pow(N_l, 1.0 / r) - V, tol);
        const double over = overlap_jump_count(fam, l).value;
        b.check("jump_sandwich_lower", "N_lambda <= overlapping-pairs count", N_l - over, 0.0);
        b.check("jump_sandwich_upper", "overlapping-pairs count at lambda <= N_{lambda/2}",
                over - jump_count(fam, l / 2.0).value, 0.0);
    }

    std::vector<Scalar> sum(n);
    for (std::size_t i = 0; i < n; ++i) sum[i] = fam.value(i) + other.value(i);
    b.check("oscillation_subadditive", "O(a + b) <= O(a) + O(b)",
            oscillation(fam.with_values(sum), seq, r).value - O - oscillation(other, seq, r).value, tol);
    IndexMask even(n), odd(n);
    for (std::size_t i = 0; i < n; ++i) even[i] = i % 2 == 0, odd[i] = i % 2 == 1;
    b.check("disjoint_union_split", "oscillation over a disjoint union is at most the sum over the parts",
            O - oscillation(fam, seq, r, even).value - oscillation(fam, seq, r, odd).value, tol);
    b.check("maximal_domination", "oscillation plus the base value dominates the maximal function",
            -maximal_domination(fam, r).slack(), tol);

    bool rejected = false;
    try {
        IncreasingSequence({{Rational(0)}, {Rational(0)}, {Rational(1)}});
    } catch (const DomainError&) {
        rejected = true;
    }
    bool rejected2 = false;
    try {
        IncreasingSequence({{Rational(0), Rational(0)}, {Rational(1), Rational(0)}});
    } catch (const DomainError&) {
        rejected2 = true;
    }
    b.expect("sequence_strictness", "sequences must increase strictly in every coordinate", rejected && rejected2);
}

// ---------------------------------------------------------------- martingale_osc

inline void martingale_trial(const ExperimentConfig& cfg, std::size_t t, Battery& b) {
    auto rng = trial_rng(cfg.seed, t);
    const unsigned K = cfg.K;
    const std::int64_t N = std::int64_t{1} << K;
    const MartingaleFamily levels(K), refined(K, true);
    const Field f = random_field(rng, static_cast<std::size_t>(N), ensemble_for_trial(t));
    const double itol = cfg.tol.identity;

    b.check("martingale_lattice_identity", "E_s E_t f = E_{min(s,t)} f",
            lattice_identity_residual(levels, f, uniform(rng, 0, K), uniform(rng, 0, K)), itol);
    b.check("refined_martingale_lattice_identity", "P_s P_t f = P_{min(s,t)} f along the refined filtration",
            lattice_identity_residual(refined, f, uniform(rng, 0, N - 1), uniform(rng, 0, N - 1)), itol);
    {
        const auto c = random_triple(rng, 0, K);
        b.check("martingale_block_increment_identity", "(P_t - P_{I_j}) f = P_t (P_{I_{j+1}} - P_{I_j}) f",
                block_increment_identity_check(levels, f, c[0], c[2], c[1]), itol);
        const auto d = random_triple(rng, 0, N - 1);
        b.check("refined_martingale_block_increment_identity", "(P_t - P_{I_j}) f = P_t (P_{I_{j+1}} - P_{I_j}) f along the refined filtration",
                block_increment_identity_check(refined, f, d[0], d[2], d[1]), itol);
    }
    const auto steps = random_index_chain(rng, 0, N - 1, 65);
    b.check("martingale_bessel", "sum_j ||Delta_j f||_2^2 <= ||f||_2^2 along the refined filtration",
            -bessel_check(refined, f, steps).slack(), itol);
    b.check("martingale_levels_bessel", "sum_j ||Delta_j f||_2^2 <= ||f||_2^2 along dyadic levels",
            -bessel_check(levels, f, random_index_chain(rng, 0, K, K + 1)).slack(), itol);

    const auto lv = random_index_chain(rng, 0, K, K + 1);
    b.check("martingale_block_maximal_chain", "oscillation <= block-wise maximal square function, pointwise",
            projection_chain(levels, f, lv).worst_pointwise_excess, cfg.tol.inequality);

    const auto M = maximal_function(levels, f);
    const double nf = field_norm(f, 2.0);
    if (nf > 0.0) {
        b.check("doob_maximal", "||sup_n |E_n f| ||_2 <= 2 ||f||_2", field_norm(M, 2.0) / nf, cfg.tol.doob);
        b.observe("doob_ratio_max", field_norm(M, 2.0) / nf);
    }

    const auto all = levels.apply_all(f);
    for (int probe = 0; probe < 4; ++probe) {
        const auto x = static_cast<std::size_t>(uniform(rng, 0, N - 1));
        const auto fx = field_at_points(all, x);
        b.check("maximal_domination_pointwise", "sup_n |E_n f(x)| <= |E_0 f(x)| + uniform oscillation at x",
                -maximal_domination(ParamFamily::sequence(std::span<const Scalar>(fx)), 2.0).slack(), cfg.tol.inequality);
        const auto osc = oscillation_field(levels, f, lv, 2.0);
        std::vector<std::size_t> pos(lv.begin(), lv.end());
        b.check("oscillation_field_matches_core", "pointwise oscillation of the operator family equals the scalar seminorm",
                rel_diff(osc[x], oscillation(ParamFamily::sequence(std::span<const Scalar>(fx)),
                                             IncreasingSequence::from_positions(ParamFamily::sequence(std::span<const Scalar>(fx)), pos), 2.0)
                                     .value),
                cfg.tol.oracle);
    }

    const auto short_steps = random_index_chain(rng, 0, N - 1, 17);
    std::vector<std::uint64_t> u(short_steps.begin(), short_steps.end());
    const auto fast = refined_martingale_oscillation(f, K, u, 2.0);
    const auto slow = oscillation_field(refined, f, short_steps, 2.0);
    double d = 0.0;
    for (std::size_t x = 0; x < fast.size(); ++x) d = std::max(d, std::abs(fast[x] - slow[x]));
    b.check("refined_oscillation_incremental", "atom-local oscillation update equals the generic evaluation", d, itol);
}

// ---------------------------------------------------------------- carleson_osc

inline void carleson_trial(const ExperimentConfig& cfg, std::size_t t, Battery& b,
                           const std::shared_ptr<const OrthonormalSystem>& fourier,
                           const std::shared_ptr<const OrthonormalSystem>& haar) {
    auto rng = trial_rng(cfg.seed, t);
    const std::int64_t N = cfg.N;
    const CutoffFamily cut(static_cast<std::size_t>(N));
    const PartialSumFamily fsum(fourier), hsum(haar);
    const Field f = random_field(rng, static_cast<std::size_t>(N), ensemble_for_trial(t));
    const double itol = cfg.tol.identity;
    const std::int64_t top = N / 2;

    b.check("cutoff_lattice_identity", "C_s C_t f = C_{min(s,t)} f",
            lattice_identity_residual(cut, f, uniform(rng, 0, top), uniform(rng, 0, top)), itol);
    const auto c = random_triple(rng, 0, top);
    b.check("cutoff_block_increment_identity", "(C_t - C_{I_j}) f = C_t (C_{I_{j+1}} - C_{I_j}) f",
            block_increment_identity_check(cut, f, c[0], c[2], c[1]), itol);
    const auto seq = random_index_chain(rng, 0, top, 33);
    b.check("cutoff_bessel", "sum_j ||Delta_j f||_2^2 <= ||f||_2^2 for sharp cutoffs", -bessel_check(cut, f, seq).slack(), itol);
    b.check("cutoff_block_maximal_chain", "oscillation <= block-wise maximal square function, pointwise",
            projection_chain(cut, f, seq).worst_pointwise_excess, cfg.tol.inequality);

    b.check("fourier_partial_sum_lattice_identity", "S_m S_n f = S_{min(m,n)} f",
            lattice_identity_residual(fsum, f, uniform(rng, 0, N - 1), uniform(rng, 0, N - 1)), itol);
    b.check("fourier_partial_sum_bessel", "sum_j ||Delta_j f||_2^2 <= ||f||_2^2 for Fourier partial sums",
            -bessel_check(fsum, f, random_index_chain(rng, 0, N - 1, 33)).slack(), itol);
    const auto tc = uniform(rng, 0, top);
    b.check("even_partial_sums_are_cutoffs", "S_{2t} f = C_t f in the balanced Fourier ordering",
            max_abs_diff(fsum.apply(2 * tc, f), cut.apply(tc, f)), itol);

    const auto hn = static_cast<std::int64_t>(haar->size());
    const Field g = random_field(rng, haar->size(), ensemble_for_trial(t + 1));
    b.check("haar_partial_sum_bessel", "sum_j ||Delta_j f||_2^2 <= ||f||_2^2 for Haar partial sums",
            -bessel_check(hsum, g, random_index_chain(rng, 0, hn - 1, 33)).slack(), itol);
    const auto step = uniform(rng, 0, hn - 1);
    b.check("haar_partial_sums_are_refined_martingale", "Haar partial sums equal the refined dyadic conditional expectations",
            max_abs_diff(hsum.apply(step, g), refined_martingale_projection(g, cfg.K, static_cast<std::uint64_t>(step))), itol);

    const double nf = field_norm(f, 2.0);
    if (nf > 0.0) {
        b.observe("carleson_maximal_ratio_max", field_norm(maximal_function(cut, f), 2.0) / nf);
        b.observe("smooth_sharp_square_ratio_max", smooth_sharp_square_ratio(f));
    }
}

// ---------------------------------------------------------------- projection_hypotheses

inline void hypotheses_trial(const ExperimentConfig& cfg, std::size_t t, Battery& b,
                             const std::vector<std::shared_ptr<const OperatorFamily>>& fams) {
    auto rng = trial_rng(cfg.seed, t);
    const double itol = cfg.tol.identity;
    for (const auto& fam : fams) {
        const auto& I = fam->indices();
        const auto n = static_cast<std::int64_t>(I.size());
        const Field f = random_field(rng, fam->space_size(), ensemble_for_trial(t));
        auto pick = [&] { return I[static_cast<std::size_t>(uniform(rng, 0, n - 1))]; };
        const std::string name = fam->name();
        if (fam->is_projection_family()) {
            b.check(name + "_projection_property", "declared projection family satisfies P_s P_t = P_{min(s,t)}",
                    lattice_identity_residual(*fam, f, pick(), pick()), itol);
        } else {
            // Gaussian probe: structured ensembles can sit where the multiplier is 0 or 1.
            const Field g = random_field(rng, fam->space_size(), Ensemble::gaussian);
            double defect = 0.0;
            for (auto s : I) defect = std::max(defect, max_abs_diff(fam->apply(s, fam->apply(s, g)), fam->apply(s, g)));
            b.expect(name + "_declared_non_projection", "a family not declared a projection family is not idempotent",
                     defect > 1e-9);
        }
        if (fam->orthogonal_increments() && n >= 2) {
            auto c = random_index_chain(rng, 0, n - 1, 4);
            const std::size_t k = c.size();
            const Field d1 = fam->apply(I[c[1]], f) - fam->apply(I[c[0]], f);
            const Field d2 = fam->apply(I[c[k - 1]], f) - fam->apply(I[c[k - 2]], f);
            std::complex<double> ip = 0.0;
            if (k >= 3) {
                for (std::size_t x = 0; x < f.size(); ++x) ip += d1[x] * std::conj(d2[x]);
                ip /= static_cast<double>(f.size());
            }
            b.check(name + "_orthogonal_increments", "increments over disjoint index intervals are orthogonal",
                    std::abs(ip), itol);
        }
        if (fam->positive()) {
            const auto s = pick();
            const Field lhs = fam->apply(s, f), rhs = fam->apply(s, abs_field(f));
            double excess = -std::numeric_limits<double>::infinity();
            for (std::size_t x = 0; x < f.size(); ++x) excess = std::max(excess, std::abs(lhs[x]) - rhs[x].real());
            b.check(name + "_positivity", "positive kernel: |T_t f| <= T_t |f| pointwise", excess, itol);
        }
    }

    const auto gN = static_cast<std::size_t>(cfg.grid_N);
    const auto mK = std::size_t{1} << cfg.grid_K;
    auto m = std::make_shared<MartingaleFamily>(cfg.grid_K);
    const ComposedFamily mart({on_axis(m, mK, 0), on_axis(m, mK, 1)});
    b.check("martingale_factors_commute", "axis factors of the product martingale commute",
            mart.commutation_defect(2, cfg.seed + t), itol);
    auto a1 = std::make_shared<PolynomialAverageFamily>(cfg.grid_N, IntPolynomial::monomial(1, 0, 2), iota(1, 8));
    auto a2 = std::make_shared<PolynomialAverageFamily>(cfg.grid_N, IntPolynomial::monomial(1, 0, 3), iota(1, 8));
    const ComposedFamily dz({on_axis(a1, gN, 0), on_axis(a2, gN, 1)});
    b.check("average_factors_commute", "axis factors of the product polynomial averages commute",
            dz.commutation_defect(2, cfg.seed + t), itol);
}

// ---------------------------------------------------------------- dz_theorem

struct WeylModulus {
    std::int64_t N = 0;
    double C2 = 0.0;  // one-parameter Weyl constant for m^2
    double C3 = 0.0;  // for m^3
};

/// The configured prime, plus the next prime = 1 (mod 3) when cubing permutes Z_N
/// (N = 2 mod 3), where the cubic constant and the product bound collapse to 0.
inline std::vector<WeylModulus> weyl_moduli(std::int64_t N) {
    auto prime = [](std::int64_t n) {
        for (std::int64_t q = 2; q * q <= n; ++q)
            if (n % q == 0) return false;
        return n >= 2;
    };
    std::vector<std::int64_t> Ns{N};
    if (N % 3 == 2) {
        std::int64_t M = N + 1;
        while (!(prime(M) && M % 3 == 1)) ++M;
        Ns.push_back(M);
    }
    std::vector<WeylModulus> out;
    for (auto n : Ns)
        out.push_back({n, one_parameter_weyl_constant(IntPolynomial::monomial(1, 0, 2), n),
                       one_parameter_weyl_constant(IntPolynomial::monomial(1, 0, 3), n)});
    return out;
}

inline void dz_trial(const ExperimentConfig& cfg, std::size_t t, Battery& b, const std::vector<WeylModulus>& moduli) {
    auto rng = trial_rng(cfg.seed, t);
    const double itol = cfg.tol.identity;
    const std::int64_t gN = cfg.grid_N;
    const auto ens = ensemble_for_trial(t);

    {
        const auto f = LatticeFunction::cyclic(2, gN, random_field(rng, static_cast<std::size_t>(gN * gN), ens));
        const auto s1 = AverageSpec::single(random_polynomial(rng), uniform(rng, 1, 10), random_shift(rng, 2));
        const auto s2 = AverageSpec::single(random_polynomial(rng), uniform(rng, 1, 10), random_shift(rng, 2));
        const double scale = std::max(1.0, sup_abs(f));
        const auto comp = multiparam_average(f, {s1, s2});
        b.check("composition_matches_joint_average", "A^{P_1}_{M_1} A^{P_2}_{M_2} f equals the joint double average",
                max_abs_diff(comp, multiparam_average_direct(f, {s1, s2})) / scale, itol);
        b.check("averages_commute", "averages along commuting shifts commute",
                max_abs_diff(comp, multiparam_average(f, {s2, s1})) / scale, itol);
        b.check("strategies_agree", "direct orbit summation equals the orbit-kernel evaluation",
                max_abs_diff(ergodic_average(f, s1, AverageStrategy::direct), ergodic_average(f, s1, AverageStrategy::kernel)) / scale,
                itol);
        b.check("average_preserves_integral", "integral of A_M f equals integral of f on the torus",
                std::abs(integral(comp) - integral(f)) / scale, itol);
    }
    {
        const auto f = LatticeFunction::lattice({-3, -3}, {7, 7}, random_field(rng, 49, ens));
        const auto s1 = AverageSpec::single(random_polynomial(rng), uniform(rng, 1, 5), random_shift(rng, 2));
        const auto s2 = AverageSpec::single(random_polynomial(rng), uniform(rng, 1, 5), random_shift(rng, 2));
        b.check("composition_matches_joint_average_lattice", "composition equals the joint average on Z^2",
                max_abs_diff(multiparam_average(f, {s1, s2}), multiparam_average_direct(f, {s1, s2})) /
                    std::max(1.0, sup_abs(f)),
                itol);
    }
    {
        const std::int64_t N = cfg.N;
        const auto g = LatticeFunction::cyclic(1, N, random_field(rng, static_cast<std::size_t>(N), ens));
        const Coord v{uniform(rng, 1, 5)};
        b.check("birkhoff_telescoping", "A_M (g - g o T) = M^{-1} (g o T - g o T^{M+1}), relative to sup |g|",
                telescoping_check(g, v, uniform(rng, 1, 3 * N)).relative(), cfg.tol.birkhoff_telescoping);
        const auto h = LatticeFunction::lattice({0}, {16}, random_field(rng, 16, ens));
        b.check("birkhoff_telescoping_lattice", "telescoping identity on Z with finite support",
                telescoping_check(h, {uniform(rng, -3, 3) | 1}, uniform(rng, 1, 40)).relative(), cfg.tol.birkhoff_telescoping);
        const auto dec = birkhoff_decomposition(g, v);
        b.check("birkhoff_decomposition_residual", "f = invariant part + coboundary",
                dec.residual / std::max(1.0, sup_abs(g)), itol);
    }
    {
        const std::int64_t N = cfg.N;
        const std::int64_t a = 1 + static_cast<std::int64_t>(t % static_cast<std::size_t>(N - 1));
        const auto avg = ergodic_average(character(N, {a}), AverageSpec::single(IntPolynomial::monomial(1, 0, 2), N, {1}));
        const double measured = sup_abs(avg);
        std::complex<long double> direct = 0.0L;
        for (std::int64_t m = 1; m <= N; ++m) {
            const auto ph = static_cast<long double>((a * ((m * m) % N)) % N) / static_cast<long double>(N);
            direct += std::polar(1.0L, 2.0L * std::numbers::pi_v<long double> * ph);
        }
        b.check("gauss_sum_modulus", "sup_x |A_N e_a(x)| = N^{-1/2} for P = m^2, N prime",
                std::abs(measured - 1.0 / std::sqrt(static_cast<double>(N))), cfg.tol.gauss);
        b.check("gauss_sum_direct_summation", "average agrees with the directly summed Gauss sum",
                std::abs(measured - static_cast<double>(std::abs(direct) / static_cast<long double>(N))), cfg.tol.gauss);

        if (t < 8) {
            for (const auto& w : moduli) {
                const std::int64_t fa = uniform(rng, 1, w.N - 1), fb = uniform(rng, 1, w.N - 1);
                const auto A = multiparam_average(character(w.N, {fa, fb}),
                                                  {AverageSpec::single(IntPolynomial::monomial(1, 0, 2), w.N, {1, 0}),
                                                   AverageSpec::single(IntPolynomial::monomial(1, 0, 3), w.N, {0, 1})});
                const double bound = w.C2 * w.C3 / static_cast<double>(w.N);
                b.check("gauss_product_bound",
                        "d = 2 deviation at M = (N, N) within the factor of N^{-1} C_2 C_3 (up to roundoff)",
                        sup_abs(A) - cfg.tol.gauss_factor * bound, cfg.tol.gauss);
                if (bound > cfg.tol.gauss)
                    b.observe("gauss_product_deviation_over_bound_N" + std::to_string(w.N), sup_abs(A) / bound);
            }
        }
    }
}

// ---------------------------------------------------------------- multiparam_telescoping

inline void telescoping_trial(const ExperimentConfig& cfg, std::size_t t, Battery& b) {
    auto rng = trial_rng(cfg.seed, t);
    const auto ens = ensemble_for_trial(t);
    const double ttol = cfg.tol.multiparam_telescoping;
    const auto mK = std::size_t{1} << cfg.grid_K;
    const auto gN = static_cast<std::size_t>(cfg.grid_N);

    auto m = std::make_shared<MartingaleFamily>(cfg.grid_K);
    const ComposedFamily mart({on_axis(m, mK, 0), on_axis(m, mK, 1)});
    auto a1 = std::make_shared<PolynomialAverageFamily>(cfg.grid_N, IntPolynomial::monomial(1, 0, 1), iota(1, 16));
    auto a2 = std::make_shared<PolynomialAverageFamily>(cfg.grid_N, IntPolynomial::monomial(1, 0, 2), iota(1, 16));
    const ComposedFamily dz({on_axis(a1, gN, 0), on_axis(a2, gN, 1)});
    auto cut = std::make_shared<CutoffFamily>(gN);
    const ComposedFamily mixed({on_axis(cut, gN, 0), on_axis(a2, gN, 1)});

    auto check_pair = [&](const ComposedFamily& fam, std::size_t n, const std::string& name) {
        const Field f = random_field(rng, n * n, ens);
        const auto [lo, hi] = random_ordered_pair(rng, {fam.axis(0), fam.axis(1)});
        const auto rep = telescoping_identity_check(fam, hi, lo, f);
        b.check(name, "T_n f - T_{I_j} f equals the sum of axis-wise increments, relative to sup |f|",
                rep.max_deviation / std::max(1.0, rep.scale), ttol);
        b.check("telescoping_vacuous_case", "n = I_j gives an identically zero difference",
                telescoping_identity_check(fam, lo, lo, f).max_deviation, 0.0);
    };
    check_pair(mart, mK, "martingale_pair_telescoping");
    check_pair(dz, gN, "average_pair_telescoping");
    check_pair(mixed, gN, "mixed_pair_telescoping");

    // Identity factors reproduce the one-parameter machinery exactly.
    {
        const unsigned K = cfg.K;
        const std::size_t n = std::size_t{1} << K;
        auto levels = std::make_shared<MartingaleFamily>(K);
        const ComposedFamily fam({levels, std::make_shared<IdentityFamily>(n, iota(0, K))});
        const Field f = random_field(rng, n, ens);
        const auto lv = random_index_chain(rng, 0, K, K + 1);
        std::vector<std::vector<std::int64_t>> pts;
        for (std::size_t j = 0; j < lv.size(); ++j) pts.push_back({lv[j], static_cast<std::int64_t>(j)});
        const double r = t % 2 ? 2.0 : 1.5;
        const auto multi = multiparam_oscillation(fam, f, integer_sequence(pts), r);
        const auto one = oscillation_field(*levels, f, lv, r);
        double d = 0.0;
        for (std::size_t x = 0; x < n; ++x) d = std::max(d, std::abs(multi.pointwise[x] - one[x]));
        b.check("identity_factor_degeneration", "k-parameter oscillation with identity factors equals the one-parameter value bit for bit",
                d, 0.0);
    }

    // Pointwise oscillation against the definition on a materialized grid.
    {
        auto m3 = std::make_shared<MartingaleFamily>(3);
        const ComposedFamily small({on_axis(m3, 8, 0), on_axis(m3, 8, 1)});
        const Field f = random_field(rng, 64, ens);
        const auto pts = random_tuple_chain(rng, {iota(0, 3), iota(0, 3)}, 4);
        const auto seq = integer_sequence(pts);
        const double r = t % 2 ? 2.0 : 1.0;
        const auto osc = multiparam_oscillation(small, f, seq, r);
        std::vector<IndexPoint> idx;
        std::vector<Field> vals;
        for (std::int64_t a = 0; a <= 3; ++a)
            for (std::int64_t c = 0; c <= 3; ++c) {
                idx.push_back({Rational(a), Rational(c)});
                const std::int64_t tt[] = {a, c};
                vals.push_back(small.apply(tt, f));
            }
        const auto x = static_cast<std::size_t>(uniform(rng, 0, 63));
        const ParamFamily px(idx, field_at_points(vals, x));
        std::vector<std::size_t> chain;
        for (const auto& e : seq.entries()) chain.push_back(*px.find(e));
        b.check("multiparam_oscillation_definition", "pointwise multi-parameter oscillation equals the definition with half-open boxes",
                rel_diff(osc.pointwise[x], oscillation_definition(px, chain, r)), cfg.tol.oracle);

        // Exhaustive 3x3 search: diagonal sequences never beat the full supremum.
        std::vector<IndexPoint> g3;
        std::vector<Scalar> v3;
        for (std::size_t i = 0; i < idx.size(); ++i)
            if (idx[i][0] <= 2 && idx[i][1] <= 2) g3.push_back(idx[i]), v3.push_back(vals[i][x]);
        const ParamFamily grid(g3, v3);
        const double full = sup_oscillation_bruteforce(grid, r).value;
        b.check("diagonal_below_multiparam_sup", "diagonal-sequence oscillation never exceeds the multi-parameter supremum",
                sup_oscillation_diagonal(grid, r).value - full, cfg.tol.inequality);
        b.check("oracle_multiparam_sup", "two-parameter uniform oscillation equals exhaustive search on a 3x3 grid",
                rel_diff(sup_oscillation_multiparam(grid, r).value, full), cfg.tol.oracle);
    }

    // Proof chain for positive factors.
    {
        const Field f = random_field(rng, mK * mK, ens);
        b.check("composed_proof_chain", "sup over boxes of |T_n f - T_{I_j} f| <= sum of axis maximal block increments",
                composed_chain_excess(mart, f, integer_sequence(random_tuple_chain(rng, {mart.axis(0), mart.axis(1)}, 4))),
                cfg.tol.inequality);
        const Field g = random_field(rng, gN * gN, ens);
        b.check("composed_proof_chain", "sup over boxes of |T_n f - T_{I_j} f| <= sum of axis maximal block increments",
                composed_chain_excess(dz, g, integer_sequence(random_tuple_chain(rng, {dz.axis(0), dz.axis(1)}, 4))),
                cfg.tol.inequality);
    }
}

// ---------------------------------------------------------------- long_short_split

/// Birkhoff averages A_t f, t = 1..T, on Z_X as fields.
inline std::vector<Field> birkhoff_fields(const Field& f, std::int64_t T) {
    const auto X = f.size();
    std::vector<Field> out;
    Field sum(X, 0.0);
    for (std::int64_t t = 1; t <= T; ++t) {
        for (std::size_t x = 0; x < X; ++x) sum[x] += f[(x + X - static_cast<std::size_t>(t) % X) % X];
        Field a(X);
        for (std::size_t x = 0; x < X; ++x) a[x] = sum[x] / static_cast<double>(t);
        out.push_back(std::move(a));
    }
    return out;
}

inline void long_short_trial(const ExperimentConfig& cfg, std::size_t t, Battery& b) {
    auto rng = trial_rng(cfg.seed, t);
    const std::size_t X = 32;
    const unsigned L = 3 + static_cast<unsigned>(t % 3);
    const std::int64_t T = std::int64_t{1} << L;
    std::vector<Field> values;
    if (t % 2 == 0) {
        values = birkhoff_fields(random_field(rng, X, ensemble_for_trial(t / 2)), T);
    } else {
        // Random walks slowed down by 1/t: a smooth-in-t family with decaying steps.
        std::normal_distribution<double> g;
        Field w(X, 0.0);
        for (std::int64_t s = 1; s <= T; ++s) {
            for (auto& v : w) v += g(rng);
            Field a(X);
            for (std::size_t x = 0; x < X; ++x) a[x] = w[x] / static_cast<double>(s);
            values.push_back(std::move(a));
        }
    }
    std::vector<Rational> grid;
    for (std::int64_t s = 1; s <= T; ++s) grid.emplace_back(s);

    const auto rep = long_short_split_report(grid, values, cfg.r, cfg.p, cfg.tol.long_short_C);
    b.check("long_short_inequality", "full-grid oscillation <= C (dyadic oscillation + square sum of short variations)",
            rep.ratio, cfg.tol.long_short_C);
    b.observe("long_short_ratio_max", rep.ratio);

    std::vector<Rational> dyadic;
    std::vector<Field> dv;
    for (std::int64_t s = 1; s <= T; s *= 2) dyadic.emplace_back(s), dv.push_back(values[static_cast<std::size_t>(s - 1)]);
    b.check("dyadic_grid_ratio", "on dyadic times only the ratio is at most 1",
            long_short_split_report(dyadic, dv, cfg.r, cfg.p, cfg.tol.long_short_C).ratio, 1.0 + 1e-12);

    std::vector<Rational> block(grid.begin() + T / 2 - 1, grid.end());
    std::vector<Field> bv(values.begin() + T / 2 - 1, values.end());
    b.check("single_block_ratio", "a single dyadic block reduces to oscillation <= variation",
            long_short_split_report(block, bv, cfg.r, cfg.p, cfg.tol.long_short_C).ratio, 1.0 + 1e-12);
}

}  // namespace detail

// ---------------------------------------------------------------- verify

inline Report run_verify(const ExperimentConfig& cfg) {
    cfg.validate();
    fault::ScopedMutation mutate(fault::parse_mutation(cfg.mutation));
    Report rep;
    rep.config = cfg;
    rep.command = "verify";
    const auto trials = static_cast<std::size_t>(cfg.trials);

    switch (cfg.scenario) {
        case Scenario::seminorm_chain:
            rep.battery = detail::run_trials(trials, [&](std::size_t t, Battery& b) { detail::seminorm_trial(cfg, t, b); });
            break;
        case Scenario::martingale_osc:
            rep.battery = detail::run_trials(trials, [&](std::size_t t, Battery& b) { detail::martingale_trial(cfg, t, b); });
            break;
        case Scenario::carleson_osc: {
            auto fourier = std::make_shared<const OrthonormalSystem>(OrthonormalSystem::fourier(static_cast<std::size_t>(cfg.N)));
            auto haar = std::make_shared<const OrthonormalSystem>(OrthonormalSystem::haar(cfg.K));
            rep.battery = detail::run_trials(
                trials, [&](std::size_t t, Battery& b) { detail::carleson_trial(cfg, t, b, fourier, haar); });
            break;
        }
        case Scenario::projection_hypotheses: {
            const auto N = static_cast<std::size_t>(cfg.N);
            const std::vector<std::shared_ptr<const OperatorFamily>> fams = {
                std::make_shared<MartingaleFamily>(cfg.K),
                std::make_shared<MartingaleFamily>(cfg.K, true),
                std::make_shared<CutoffFamily>(N),
                std::make_shared<PartialSumFamily>(std::make_shared<const OrthonormalSystem>(OrthonormalSystem::fourier(N))),
                std::make_shared<PartialSumFamily>(std::make_shared<const OrthonormalSystem>(OrthonormalSystem::haar(cfg.K))),
                std::make_shared<SmoothBumpFamily>(N),
                std::make_shared<PolynomialAverageFamily>(cfg.N, IntPolynomial::monomial(1, 0, 2), detail::iota(1, 16)),
            };
            rep.battery = detail::run_trials(trials, [&](std::size_t t, Battery& b) { detail::hypotheses_trial(cfg, t, b, fams); });
            break;
        }
        case Scenario::dz_theorem: {
            const auto moduli = detail::weyl_moduli(cfg.N);
            for (const auto& w : moduli) {
                rep.observations["weyl_constant_m2_N" + std::to_string(w.N)] = w.C2;
                rep.observations["weyl_constant_m3_N" + std::to_string(w.N)] = w.C3;
            }
            rep.battery = detail::run_trials(trials, [&](std::size_t t, Battery& b) { detail::dz_trial(cfg, t, b, moduli); });

            // Diagnostic decay probe on a random mean-zero function; averages on Z_N
            // are periodic in M mod N, so only the trend is reported.
            auto rng = trial_rng(cfg.seed, 0, 1);
            auto f = LatticeFunction::cyclic(2, cfg.N, random_field(rng, static_cast<std::size_t>(cfg.N * cfg.N), Ensemble::gaussian));
            const Scalar mean = integral(f);
            for (auto& v : f.values()) v -= mean;
            std::vector<std::vector<std::int64_t>> schedule;
            for (std::int64_t s = 1; s <= 8; s *= 2) schedule.push_back({s * cfg.N, s * cfg.N});
            const auto probe = dz_convergence_probe(
                f, {IntPolynomial::monomial(1, 0, 2), IntPolynomial::monomial(1, 0, 3)}, schedule, 1e-2);
            Curve c{"dz_probe_deviation", {}, probe.deviation};
            for (const auto& M : schedule) c.x.push_back(static_cast<double>(M[0]));
            rep.curves.push_back(std::move(c));
            if (probe.decay_exponent) rep.observations["dz_probe_decay_exponent"] = *probe.decay_exponent;
            break;
        }
        case Scenario::multiparam_telescoping:
            rep.battery = detail::run_trials(trials, [&](std::size_t t, Battery& b) { detail::telescoping_trial(cfg, t, b); });
            break;
        case Scenario::long_short_split:
            rep.battery = detail::run_trials(trials, [&](std::size_t t, Battery& b) { detail::long_short_trial(cfg, t, b); });
            break;
    }
    return rep;
}

// ---------------------------------------------------------------- estimate

namespace detail {

/// ratios[trial][J index][p index] -> one ConstantEstimate per p.
inline std::vector<ConstantEstimate> reduce_ratios(const std::string& family, const std::string& scale,
                                                   const std::vector<std::size_t>& Js, const std::vector<double>& ps,
                                                   const std::vector<std::vector<std::vector<double>>>& ratios) {
    std::vector<ConstantEstimate> out;
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
        ConstantEstimate e;
        e.family = family;
        e.p = ps[pi];
        e.r = 2.0;
        e.samples = ratios.size();
        std::ostringstream label;
        label << family << ' ' << scale << " p=" << ps[pi];
        e.label = label.str();
        for (std::size_t ji = 0; ji < Js.size(); ++ji) {
            double m = 0.0;
            for (const auto& tr : ratios) m = std::max(m, tr[ji][pi]);
            const double J = static_cast<double>(Js[ji]);
            e.J.push_back(J);
            e.empirical_sup.push_back(m);
            e.normalized.push_back(m / std::sqrt(J));
        }
        for (std::size_t ji = 0; ji < Js.size(); ++ji)
            e.baseline.push_back(e.empirical_sup[0] * std::sqrt(e.J[ji] / e.J[0]));
        out.push_back(std::move(e));
    }
    return out;
}

inline double lp_norm(const std::vector<double>& v, double p) { return osclab::detail::lp_mean(v, p); }

inline std::vector<std::size_t> estimate_positions(Rng& rng, std::size_t n, std::size_t J, std::size_t trial) {
    if (trial % 2 == 0) return random_positions(rng, n, J);
    auto pos = random_log_positions(rng, n, J);
    if (pos.size() != J + 1) pos = random_positions(rng, n, J);
    return pos;
}

inline std::vector<ConstantEstimate> martingale_estimates(const ExperimentConfig& cfg) {
    const unsigned K = cfg.estimate_K;
    const std::size_t N = std::size_t{1} << K;
    const auto trials = static_cast<std::size_t>(cfg.trials);
    std::vector<std::vector<std::vector<double>>> ratios(trials);
    parallel_for(trials, [&](std::size_t t) {
        auto rng = trial_rng(cfg.seed, t, 11);
        const Field f = random_field(rng, N, ensemble_for_trial(t));
        std::vector<double> absf(N);
        for (std::size_t x = 0; x < N; ++x) absf[x] = std::abs(f[x]);
        auto& out = ratios[t];
        for (auto J : cfg.J_values) {
            const auto pos = estimate_positions(rng, N, J, t);
            const std::vector<std::uint64_t> seq(pos.begin(), pos.end());
            const auto osc = refined_martingale_oscillation(f, K, seq, 2.0);
            std::vector<double> row;
            for (double p : cfg.p_values) {
                const double nf = lp_norm(absf, p);
                row.push_back(nf > 0.0 ? lp_norm(osc, p) / nf : 0.0);
            }
            out.push_back(std::move(row));
        }
    });
    return reduce_ratios("martingale", "K=" + std::to_string(K), cfg.J_values, cfg.p_values, ratios);
}

/// Pointwise O^2 of (A_M f : M in Ms) along positions pos into Ms; A holds the averages row-wise.
inline std::vector<double> average_oscillation(const std::vector<std::vector<double>>& A, const std::vector<std::size_t>& pos) {
    const std::size_t X = A[0].size();
    std::vector<double> acc(X, 0.0), best(X);
    for (std::size_t j = 0; j + 1 < pos.size(); ++j) {
        std::fill(best.begin(), best.end(), 0.0);
        const auto& base = A[pos[j]];
        for (std::size_t u = pos[j] + 1; u < pos[j + 1]; ++u) {
            const auto& cur = A[u];
            for (std::size_t x = 0; x < X; ++x) {
                const double d = cur[x] - base[x];
                best[x] = std::max(best[x], d * d);
            }
        }
        for (std::size_t x = 0; x < X; ++x) acc[x] += best[x];
    }
    for (auto& v : acc) v = std::sqrt(v);
    return acc;
}

/// Rows A_M f(x) = M^{-1} sum_{m=1}^{M} f(x - m) on Z_N for the given increasing Ms.
inline std::vector<std::vector<double>> birkhoff_rows(const std::vector<double>& f, const std::vector<std::int64_t>& Ms) {
    const std::size_t N = f.size();
    std::vector<double> pre(2 * N + 1, 0.0);  // prefix sums over f extended periodically
    CompensatedSum run;
    for (std::size_t i = 0; i < 2 * N; ++i) {
        run.add(f[i % N]);
        pre[i + 1] = run.value();
    }
    std::vector<std::vector<double>> rows;
    rows.reserve(Ms.size());
    for (auto M : Ms) {
        std::vector<double> row(N);
        const auto m = static_cast<std::size_t>(M);
        const std::size_t full = m / N, rest = m % N;
        const double total = pre[N];
        for (std::size_t x = 0; x < N; ++x) {
            // f(x-1) + ... + f(x-rest) = sum over indices x-rest .. x-1 (mod N)
            const std::size_t hi = x + N, lo = hi - rest;
            row[x] = (static_cast<double>(full) * total + (pre[hi] - pre[lo])) / static_cast<double>(M);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<ConstantEstimate> birkhoff_estimates(const ExperimentConfig& cfg) {
    const std::size_t N = std::size_t{1} << cfg.birkhoff_log2N;
    const auto trials = static_cast<std::size_t>(cfg.trials);
    std::vector<std::int64_t> Ms;
    for (std::int64_t m = 1; m <= cfg.birkhoff_M_max; ++m) Ms.push_back(m);
    std::vector<std::vector<std::vector<double>>> ratios(trials);
    parallel_for(trials, [&](std::size_t t) {
        auto rng = trial_rng(cfg.seed, t, 12);
        const auto f = random_real(rng, N, ensemble_for_trial(t));
        std::vector<double> absf(N);
        for (std::size_t x = 0; x < N; ++x) absf[x] = std::abs(f[x]);
        const auto A = birkhoff_rows(f, Ms);
        auto& out = ratios[t];
        for (auto J : cfg.J_values) {
            const auto osc = average_oscillation(A, estimate_positions(rng, Ms.size(), J, t));
            std::vector<double> row;
            for (double p : cfg.p_values) {
                const double nf = lp_norm(absf, p);
                row.push_back(nf > 0.0 ? lp_norm(osc, p) / nf : 0.0);
            }
            out.push_back(std::move(row));
        }
    });
    return reduce_ratios("birkhoff", "N=2^" + std::to_string(cfg.birkhoff_log2N) + " M<=" + std::to_string(cfg.birkhoff_M_max),
                         cfg.J_values, cfg.p_values, ratios);
}

/// For each tau: the ratio at every admissible J of the lacunary index set {floor(tau^n)}.
inline std::vector<ConstantEstimate> lacunary_estimates(const ExperimentConfig& cfg) {
    const std::size_t N = std::size_t{1} << cfg.lacunary_log2N;
    const auto trials = static_cast<std::size_t>(cfg.trials);
    std::vector<ConstantEstimate> out;
    for (double tau : cfg.taus) {
        const auto Ms = lacunary_sequence(tau, static_cast<std::int64_t>(N));
        if (Ms.size() < 2) continue;
        std::vector<std::size_t> Js;
        for (auto J : cfg.J_values)
            if (J < Ms.size() - 1) Js.push_back(J);
        if (Js.empty()) continue;
        std::vector<std::vector<std::vector<double>>> ratios(trials);
        parallel_for(trials, [&](std::size_t t) {
            auto rng = trial_rng(cfg.seed, t, 13);
            const auto f = random_real(rng, N, ensemble_for_trial(t));
            std::vector<double> absf(N);
            for (std::size_t x = 0; x < N; ++x) absf[x] = std::abs(f[x]);
            const auto A = birkhoff_rows(f, Ms);
            for (auto J : Js) {
                const auto osc = average_oscillation(A, random_positions(rng, Ms.size(), J));
                std::vector<double> row;
                for (double p : cfg.p_values) {
                    const double nf = lp_norm(absf, p);
                    row.push_back(nf > 0.0 ? lp_norm(osc, p) / nf : 0.0);
                }
                ratios[t].push_back(std::move(row));
            }
        });
        std::ostringstream scale;
        scale << "tau=" << tau << " N=2^" << cfg.lacunary_log2N;
        for (auto& e : reduce_ratios("lacunary_birkhoff", scale.str(), Js, cfg.p_values, ratios)) out.push_back(std::move(e));
    }
    return out;
}

/// Growth checks on the p = 2 curve (or the first p when 2 is absent).
inline void growth_checks(const ExperimentConfig& cfg, const std::vector<ConstantEstimate>& ests, const std::string& family,
                          Battery& b) {
    const ConstantEstimate* e = nullptr;
    for (const auto& c : ests)
        if (c.family == family && (c.p == 2.0 || !e)) e = &c;
    if (!e || e->J.size() < 2) return;
    double worst = 0.0;
    for (std::size_t i = 1; i < e->normalized.size(); ++i)
        worst = std::max(worst, e->normalized[i - 1] > 0.0 ? e->normalized[i] / e->normalized[i - 1] : 0.0);
    b.check(family + "_normalized_curve_nonincreasing",
            "J^{-1/2}-normalized empirical ratio is nonincreasing up to the noise band (ratio of consecutive values)", worst,
            1.0 + cfg.tol.growth_band);
    const double growth = e->empirical_sup.front() > 0.0 ? e->empirical_sup.back() / e->empirical_sup.front() : 0.0;
    b.check(family + "_growth_ratio", "ratio(J_max) / ratio(J_min) stays below the sqrt(J) law", growth, cfg.tol.growth_ratio);
}

}  // namespace detail

inline Report run_estimate(const ExperimentConfig& cfg) {
    cfg.validate();
    Report rep;
    rep.config = cfg;
    rep.command = "estimate";
    const auto fam = cfg.estimate_family;
    if (fam == EstimateFamily::all || fam == EstimateFamily::martingale) {
        auto e = detail::martingale_estimates(cfg);
        detail::growth_checks(cfg, e, "martingale", rep.battery);
        for (auto& x : e) rep.estimates.push_back(std::move(x));
    }
    if (fam == EstimateFamily::all || fam == EstimateFamily::birkhoff) {
        auto e = detail::birkhoff_estimates(cfg);
        detail::growth_checks(cfg, e, "birkhoff", rep.battery);
        for (auto& x : e) rep.estimates.push_back(std::move(x));
    }
    if (fam == EstimateFamily::all || fam == EstimateFamily::lacunary) {
        for (auto& x : detail::lacunary_estimates(cfg)) rep.estimates.push_back(std::move(x));
    }
    for (const auto& e : rep.estimates) rep.observations["sup/" + e.label] = e.overall_sup();
    return rep;
}

}  // namespace osclab::harness
