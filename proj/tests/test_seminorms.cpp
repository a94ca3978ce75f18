#include <gtest/gtest.h>

#include <cmath>

#include "osclab/brute_force.hpp"
#include "osclab/random.hpp"
#include "osclab/seminorms.hpp"

using namespace osclab;

namespace {

constexpr double kRel = 1e-12;

void expect_rel(double got, double want) {
    EXPECT_NEAR(got, want, kRel * std::max(1.0, std::abs(want)));
}

ParamFamily grid2(int side, const std::function<double(int, int)>& f) {
    std::vector<IndexPoint> idx;
    std::vector<Scalar> v;
    for (int a = 0; a < side; ++a)
        for (int b = 0; b < side; ++b) {
            idx.push_back(point({a, b}));
            v.emplace_back(f(a, b));
        }
    return ParamFamily(idx, v);
}

double lr_norm(const ParamFamily& fam, double r) {
    double s = 0.0;
    for (auto v : fam.values()) s += std::pow(std::abs(v), r);
    return std::pow(s, 1.0 / r);
}

}  // namespace

// ---------------------------------------------------------------- variation

TEST(Variation, SpecExamples) {
    expect_rel(variation(ParamFamily::sequence({1, 1, 1, 1}), 2).value, 0.0);
    expect_rel(variation(ParamFamily::sequence({0, 1}), 2).value, 1.0);
    // Brute force: all five points, sum of squares 4.
    expect_rel(variation(ParamFamily::sequence({0, 1, 0, 1, 0}), 2).value, 2.0);
    // Endpoints (0,2) beat the consecutive refinement: 4 > 1 + 1.
    expect_rel(variation(ParamFamily::sequence({0, 1, 2}), 2).value, 2.0);
}

TEST(Variation, Errors) {
    EXPECT_THROW(variation(ParamFamily::sequence({0, 1}), 0.5), DomainError);
    EXPECT_THROW(ParamFamily::sequence({1.0}), DomainError);
    EXPECT_THROW(variation(grid2(2, [](int, int) { return 0.0; }), 2), DomainError);
}

TEST(Variation, WitnessReevaluatesToValue) {
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        auto rng = trial_rng(11, trial);
        auto fam = random_family(rng, 3 + trial % 10, ensemble_for_trial(trial));
        const double r = 1.0 + (trial % 4) * 0.5;
        auto v = variation(fam, r);
        ASSERT_GE(v.witness.size(), 2u);
        double s = 0.0;
        for (std::size_t j = 0; j + 1 < v.witness.size(); ++j) {
            ASSERT_LT(v.witness[j], v.witness[j + 1]);
            s += std::pow(std::abs(fam.value(v.witness[j + 1]) - fam.value(v.witness[j])), r);
        }
        expect_rel(std::pow(s, 1.0 / r), v.value);
    }
}

TEST(Variation, WitnessTieBreakIsLexicographicallySmallest) {
    // r = 1 on a monotone family: every chain through the endpoints ties; the
    // smallest chain in lexicographic order takes every point.
    auto v = variation(ParamFamily::sequence({0, 1, 2, 3}), 1);
    EXPECT_EQ(v.witness, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(VariationBruteforce, SpecExamples) {
    expect_rel(brute::variation_bruteforce(ParamFamily::sequence({0, 1, 0}), 1).value, 2.0);
    expect_rel(brute::variation_bruteforce(ParamFamily::sequence({3, 3}), 5).value, 0.0);
    std::vector<double> big(21, 0.0);
    EXPECT_THROW(brute::variation_bruteforce(ParamFamily::sequence(std::span<const double>(big)), 2), DomainError);
}

TEST(VariationBruteforce, AgreesWithDynamicProgramming) {
    const double rs[] = {1.0, 1.5, 2.0, 3.0};
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        auto rng = trial_rng(2024, trial);
        const std::size_t n = 2 + trial % 11;
        auto fam = random_family(rng, n, ensemble_for_trial(trial));
        const double r = rs[trial % 4];
        expect_rel(variation(fam, r).value, brute::variation_bruteforce(fam, r).value);
    }
}

// ---------------------------------------------------------------- oscillation

TEST(Oscillation, SpecExamples) {
    auto fam = ParamFamily::sequence({0, 1, 0, 2});
    // Block [0,2) gives |a_1 - a_0| = 1; block [2,3) holds t = 2 only.
    expect_rel(oscillation(fam, IncreasingSequence::from_integers({0, 2, 3}), 2).value, 1.0);
    // Single block: sup over [0,3) of |a_t - a_0|.
    expect_rel(oscillation(fam, IncreasingSequence::from_integers({0, 3}), 7).value, 1.0);
    auto constant = ParamFamily::sequence({5, 5, 5, 5});
    expect_rel(oscillation(constant, IncreasingSequence::from_integers({0, 1, 3}), 1.5).value, 0.0);
}

TEST(Oscillation, RejectsBadSequences) {
    EXPECT_THROW(IncreasingSequence::from_integers({0, 0, 1}), DomainError);
    EXPECT_THROW(IncreasingSequence::from_integers({2, 1}), DomainError);
    EXPECT_THROW(IncreasingSequence::from_integers({3}), DomainError);
    EXPECT_THROW(IncreasingSequence({point({0, 0}), point({1, 0})}), DomainError);
    auto fam = ParamFamily::sequence({0, 1, 2});
    EXPECT_THROW(oscillation(fam, IncreasingSequence::from_integers({0, 7}), 2), DomainError);
}

TEST(Oscillation, EmptySupremumIsZero) {
    auto fam = ParamFamily::sequence({0, 4, 1, 9, 2});
    IndexMask none(fam.size(), false);
    EXPECT_EQ(oscillation(fam, IncreasingSequence::from_integers({0, 2, 4}), 2, none).value, 0.0);
    // Only t = 3 allowed: block [2,4) sees |9 - 1|.
    IndexMask only3(fam.size(), false);
    only3[3] = true;
    expect_rel(oscillation(fam, IncreasingSequence::from_integers({0, 2, 4}), 1, only3).value, 8.0);
}

TEST(Oscillation, MatchesDefinitionOnRandomSubdomains) {
    for (std::uint64_t trial = 0; trial < 500; ++trial) {
        auto rng = trial_rng(5, trial);
        const std::size_t n = 3 + trial % 10;
        auto fam = random_family(rng, n, ensemble_for_trial(trial));
        auto pos = random_positions(rng, n, 1 + trial % (n - 1));
        IndexMask mask(n);
        for (std::size_t i = 0; i < n; ++i) mask[i] = (rng() & 1u) != 0;
        const double r = 1.0 + (trial % 3);
        auto seq = IncreasingSequence::from_positions(fam, pos);
        expect_rel(oscillation(fam, seq, r, mask).value, brute::oscillation_definition(fam, pos, r, mask));
    }
}

TEST(SupOscillation, ExamplesFromExhaustiveSearch) {
    // Frozen from exhaustive enumeration with half-open blocks.
    expect_rel(sup_oscillation(ParamFamily::sequence({0, 1, 0, 1}), 2, 3).value, 1.0);
    expect_rel(sup_oscillation(ParamFamily::sequence({0, 1, 2, 3}), 1, 3).value, 2.0);
    expect_rel(sup_oscillation(ParamFamily::sequence({2, 2, 2}), 3).value, 0.0);
    expect_rel(brute::sup_oscillation_bruteforce(ParamFamily::sequence({0, 1, 0, 1}), 2, 3).value, 1.0);
    expect_rel(brute::sup_oscillation_bruteforce(ParamFamily::sequence({0, 1, 2, 3}), 1, 3).value, 2.0);
}

TEST(SupOscillation, AgreesWithExhaustiveSearchAndIsMonotoneInJmax) {
    for (std::uint64_t trial = 0; trial < 400; ++trial) {
        auto rng = trial_rng(77, trial);
        const std::size_t n = 2 + trial % 9;
        auto fam = random_family(rng, n, ensemble_for_trial(trial));
        const double r = 1.0 + 0.5 * (trial % 5);
        double prev = 0.0;
        for (std::size_t jm = 1; jm < n; ++jm) {
            const double dp = sup_oscillation(fam, r, jm).value;
            expect_rel(dp, brute::sup_oscillation_bruteforce(fam, r, jm).value);
            EXPECT_GE(dp, prev);
            prev = dp;
        }
        auto full = sup_oscillation(fam, r);
        expect_rel(full.value, brute::oscillation_definition(fam, full.witness, r));
    }
}

TEST(SupOscillationMultiparam, Examples) {
    auto constant = grid2(3, [](int, int) { return 1.0; });
    auto c = sup_oscillation_multiparam(constant, 2);
    EXPECT_EQ(c.value, 0.0);
    EXPECT_TRUE(c.exact);
    // 2x2 grid embedded in {0,1,2}^2 with zero padding: I = ((0,0),(2,2)).
    auto corner = grid2(3, [](int a, int b) { return a == 1 && b == 1 ? 1.0 : 0.0; });
    auto v = sup_oscillation_multiparam(corner, 2);
    expect_rel(v.value, 1.0);
    expect_rel(brute::sup_oscillation_bruteforce(corner, 2).value, 1.0);
}

TEST(SupOscillationMultiparam, AgreesWithExhaustiveSearchOn3x3) {
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        auto rng = trial_rng(303, trial);
        auto vals = random_real(rng, 9, ensemble_for_trial(trial));
        auto fam = grid2(3, [&](int a, int b) { return vals[a * 3 + b]; });
        const double r = 1.0 + (trial % 3);
        auto dp = sup_oscillation_multiparam(fam, r);
        EXPECT_TRUE(dp.exact);
        expect_rel(dp.value, brute::sup_oscillation_bruteforce(fam, r).value);
        expect_rel(dp.value, brute::oscillation_definition(fam, dp.witness, r));
    }
}

TEST(SupOscillationMultiparam, StochasticSearchIsFlaggedLowerBound) {
    auto rng = trial_rng(9, 0);
    auto vals = random_real(rng, 16, Ensemble::gaussian);
    auto fam = grid2(4, [&](int a, int b) { return vals[a * 4 + b]; });
    MultiparamSearch opts;
    opts.exact_limit = 4;
    opts.trials = 500;
    auto lb = sup_oscillation_multiparam(fam, 2, opts);
    EXPECT_FALSE(lb.exact);
    EXPECT_LE(lb.value, sup_oscillation_multiparam(fam, 2).value + 1e-12);
    EXPECT_GT(lb.value, 0.0);
}

// ---------------------------------------------------------------- jumps

TEST(JumpCount, SpecExamples) {
    EXPECT_EQ(jump_count(ParamFamily::sequence({3, 3, 3}), 0.5).value, 0.0);
    EXPECT_EQ(jump_count(ParamFamily::sequence({0, 1, 0, 1, 0}), 1).value, 4.0);
    EXPECT_EQ(jump_count(ParamFamily::sequence({0, 0.5, 1}), 1).value, 1.0);
    EXPECT_THROW(jump_count(ParamFamily::sequence({0, 1}), 0.0), DomainError);
    EXPECT_THROW(overlap_jump_count(ParamFamily::sequence({0, 1}), -1.0), DomainError);
}

TEST(OverlapJumpCount, SpecExamples) {
    EXPECT_EQ(overlap_jump_count(ParamFamily::sequence({0, 1, 0, 1, 0}), 1).value, 4.0);
    auto fam = ParamFamily::sequence({0, 0.6, 1.2});
    EXPECT_EQ(overlap_jump_count(fam, 1).value, 1.0);
    EXPECT_EQ(jump_count(fam, 1).value, 1.0);
    EXPECT_EQ(jump_count(fam, 0.5).value, 2.0);
    EXPECT_EQ(overlap_jump_count(ParamFamily::sequence({2, 2, 2}), 0.1).value, 0.0);
}

TEST(Jumps, AgreeWithBruteForceAndSandwich) {
    const double lambdas[] = {0.25, 0.5, 1.0};
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        auto rng = trial_rng(99, trial);
        const std::size_t n = 2 + trial % 11;
        auto fam = random_family(rng, n, ensemble_for_trial(trial));
        const double lam = lambdas[trial % 3];
        const double N = jump_count(fam, lam).value;
        const double calN = overlap_jump_count(fam, lam).value;
        EXPECT_EQ(N, brute::jump_count_bruteforce(fam, lam).value);
        EXPECT_EQ(calN, brute::overlap_jump_count_bruteforce(fam, lam).value);
        EXPECT_LE(N, calN);
        EXPECT_LE(calN, jump_count(fam, lam / 2).value);
    }
}

// ---------------------------------------------------------------- diagonal & certificates

TEST(DiagonalEmbed, Examples) {
    auto d = diagonal_embed(IncreasingSequence::from_integers({1, 2, 3}), 2);
    ASSERT_EQ(d.length(), 2u);
    EXPECT_EQ(d[0], point({1, 1}));
    EXPECT_EQ(d[2], point({3, 3}));
    EXPECT_THROW(IncreasingSequence::from_integers({1}), DomainError);
}

TEST(DiagonalEmbed, DiagonalOscillationBelowFullSupremum) {
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        auto rng = trial_rng(404, trial);
        auto vals = random_real(rng, 16, ensemble_for_trial(trial));
        auto fam = grid2(4, [&](int a, int b) { return vals[a * 4 + b]; });
        auto seq = IncreasingSequence::from_positions(ParamFamily::sequence({0, 0, 0, 0}),
                                                      std::vector<std::size_t>{0, 2, 3});
        const double diag = oscillation(fam, diagonal_embed(seq, 2), 2).value;
        const double diag_sup = sup_oscillation_diagonal(fam, 2).value;
        const double full = sup_oscillation_multiparam(fam, 2).value;
        EXPECT_LE(diag, diag_sup + 1e-12);
        EXPECT_LE(diag_sup, full + 1e-12);
    }
}

TEST(ConvergenceCertificate, Examples) {
    std::vector<IndexPoint> idx;
    std::vector<Scalar> v;
    for (int a = 1; a <= 16; ++a)
        for (int b = 1; b <= 16; ++b) {
            idx.push_back(point({a, b}));
            v.emplace_back(1.0 / (a * b));
        }
    auto cert = convergence_certificate(ParamFamily(idx, v), 0.25);
    ASSERT_TRUE(cert.found);
    EXPECT_EQ(cert.threshold, Rational(2));
    expect_rel(cert.tail_diameter, 0.25 - 1.0 / 256.0);

    auto constant = ParamFamily({point({3}), point({5}), point({9})}, {2.0, 2.0, 2.0});
    auto c2 = convergence_certificate(constant, 0.0);
    ASSERT_TRUE(c2.found);
    EXPECT_EQ(c2.threshold, Rational(3));

    std::vector<double> alt;
    for (int t = 0; t < 20; ++t) alt.push_back(t % 2 ? -1.0 : 1.0);
    EXPECT_FALSE(convergence_certificate(ParamFamily::sequence(std::span<const double>(alt)), 1.0).found);
}

// ---------------------------------------------------------------- invariants

TEST(Invariants, PointwiseInequalityChain) {
    const double rs[] = {1.0, 1.5, 2.0, 3.0};
    for (std::uint64_t trial = 0; trial < 2000; ++trial) {
        auto rng = trial_rng(1234, trial);
        const std::size_t n = 2 + trial % 11;
        auto fam = random_family(rng, n, ensemble_for_trial(trial));
        auto other = random_family(rng, n, ensemble_for_trial(trial + 1));
        const double r = rs[trial % 4];
        auto seq = IncreasingSequence::from_positions(fam, random_positions(rng, n, 1 + trial % (n - 1)));

        const double O = oscillation(fam, seq, r).value;
        const double V = variation(fam, r).value;
        const double L = lr_norm(fam, r);
        EXPECT_LE(O, V + 1e-12);
        EXPECT_LE(V, 2.0 * L + 1e-12);

        // sup bound from any base point
        const double sup = sup_norm(fam).value;
        for (std::size_t t0 = 0; t0 < n; ++t0) EXPECT_LE(sup, std::abs(fam.value(t0)) + V + 1e-12);

        // r -> V^r nonincreasing; subset monotonicity
        EXPECT_LE(variation(fam, r + 0.5).value, V + 1e-12);
        if (n > 2) {
            std::vector<Scalar> sub(fam.values().begin(), fam.values().end() - 1);
            EXPECT_LE(variation(ParamFamily::sequence(std::span<const Scalar>(sub)), r).value, V + 1e-12);
        }

        // jump bridge
        for (double lam : {0.25, 0.5, 1.0, 2.0})
            EXPECT_LE(lam * std::pow(jump_count(fam, lam).value, 1.0 / r), V + 1e-12);

        // subadditivity of the oscillation seminorm
        std::vector<Scalar> sum(n);
        for (std::size_t i = 0; i < n; ++i) sum[i] = fam.value(i) + other.value(i);
        auto fam_sum = fam.with_values(sum);
        EXPECT_LE(oscillation(fam_sum, seq, r).value, O + oscillation(other, seq, r).value + 1e-12);

        // disjoint-union split
        IndexMask even(n), odd(n);
        for (std::size_t i = 0; i < n; ++i) even[i] = i % 2 == 0, odd[i] = i % 2 == 1;
        EXPECT_LE(O, oscillation(fam, seq, r, even).value + oscillation(fam, seq, r, odd).value + 1e-12);

        // maximal domination
        auto dom = maximal_domination(fam, r);
        EXPECT_GE(dom.slack(), -1e-12);
    }
}

TEST(Invariants, ComplexValuedFamilies) {
    auto fam = ParamFamily::sequence(std::vector<Scalar>{{0, 0}, {0, 1}, {1, 1}, {1, 0}});
    expect_rel(variation(fam, 1).value, 3.0);
    expect_rel(variation(fam, 2).value, std::sqrt(3.0));  // three unit steps beat any diagonal
    EXPECT_EQ(jump_count(fam, 1.0).value, 3.0);
}
