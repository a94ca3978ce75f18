#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "osclab/projections.hpp"
#include "osclab/random.hpp"
#include "osclab/seminorms.hpp"

using namespace osclab;

namespace {

Field random_field_of(Rng& rng, std::size_t n, bool complex = false) {
    std::normal_distribution<double> g;
    Field f(n);
    for (auto& v : f) v = {g(rng), complex ? g(rng) : 0.0};
    return f;
}

std::vector<std::int64_t> random_seq(Rng& rng, const std::vector<std::int64_t>& idx, std::size_t J) {
    const auto pos = random_positions(rng, idx.size(), J);
    std::vector<std::int64_t> s;
    for (auto p : pos) s.push_back(idx[p]);
    return s;
}

}  // namespace

TEST(Martingale, LevelExamples) {
    const Field f{1, 3, 5, 7};
    EXPECT_EQ(martingale_projection(f, 2, 1), (Field{2, 2, 6, 6}));
    EXPECT_EQ(martingale_projection(f, 2, 2), f);
    EXPECT_EQ(martingale_projection(f, 2, 0), (Field{4, 4, 4, 4}));
    EXPECT_THROW(martingale_projection(f, 2, 3), DomainError);
    EXPECT_THROW(martingale_projection(f, 3, 1), DomainError);
}

TEST(Martingale, RefinedFiltrationInterpolatesLevels) {
    Rng rng(1);
    const unsigned K = 5;
    const auto f = random_field_of(rng, 32);
    for (unsigned n = 0; n <= K; ++n)
        EXPECT_LE(max_abs_diff(refined_martingale_projection(f, K, (1u << n) - 1), martingale_projection(f, K, n)), 1e-14);
    // Step 2: level 1 with its first atom split.
    const Field g{1, 3, 5, 7};
    EXPECT_EQ(refined_martingale_projection(g, 2, 2), (Field{1, 3, 6, 6}));
    const Field h{1, 3, 5, 7, 2, 2, 4, 4};
    EXPECT_EQ(refined_martingale_projection(h, 3, 2), (Field{2, 2, 6, 6, 3, 3, 3, 3}));
}

TEST(Martingale, RefinedFiltrationEqualsHaarPartialSums) {
    Rng rng(2);
    const unsigned K = 4;
    const auto sys = std::make_shared<const OrthonormalSystem>(OrthonormalSystem::haar(K));
    const auto f = random_field_of(rng, 16);
    for (std::uint64_t t = 0; t < 16; ++t)
        EXPECT_LE(max_abs_diff(refined_martingale_projection(f, K, t), partial_sum_projection(f, *sys, t)), 1e-13) << t;
}

TEST(Martingale, IncrementalOscillationMatchesGeneric) {
    Rng rng(3);
    const unsigned K = 6;
    const MartingaleFamily fam(K, true);
    for (int trial = 0; trial < 40; ++trial) {
        const auto f = random_field_of(rng, 64);
        const auto seq = random_seq(rng, fam.indices(), 1 + trial % 9);
        std::vector<std::uint64_t> useq(seq.begin(), seq.end());
        const double r = trial % 2 ? 2.0 : 1.5;
        const auto fast = refined_martingale_oscillation(f, K, useq, r);
        const auto slow = oscillation_field(fam, f, seq, r);
        for (std::size_t x = 0; x < fast.size(); ++x) ASSERT_NEAR(fast[x], slow[x], 1e-12) << trial << " " << x;
    }
}

TEST(Martingale, OscillationFieldAgreesWithScalarOscillation) {
    Rng rng(4);
    const MartingaleFamily fam(4);
    const auto f = random_field_of(rng, 16);
    const std::vector<std::int64_t> seq{0, 2, 4};
    const auto field = oscillation_field(fam, f, seq, 2.0);
    const auto vals = fam.apply_all(f);
    for (std::size_t x = 0; x < 16; ++x) {
        std::vector<Scalar> a;
        for (const auto& v : vals) a.push_back(v[x]);
        const auto pf = ParamFamily::sequence(std::span<const Scalar>(a));
        EXPECT_NEAR(field[x], oscillation(pf, IncreasingSequence::from_integers({0, 2, 4}), 2.0).value, 1e-14);
    }
}

TEST(Cutoff, Examples) {
    Field delta(8, 0.0);
    delta[0] = 1.0;
    const auto c = fourier_cutoff(delta, 1);
    for (int x = 0; x < 8; ++x)
        EXPECT_NEAR(c[x].real(), (1.0 + 2.0 * std::cos(2 * std::numbers::pi * x / 8)) / 8.0, 1e-15);
    Rng rng(5);
    const auto f = random_field_of(rng, 9, true);
    EXPECT_LE(max_abs_diff(fourier_cutoff(f, 4), f), 1e-14);
    EXPECT_LE(max_abs_diff(fourier_cutoff(f, 100), f), 1e-14);
}

TEST(Cutoff, LatticeIdentityAndIdempotence) {
    Rng rng(6);
    const CutoffFamily fam(64);
    std::uniform_int_distribution<std::int64_t> t(0, 32);
    for (int trial = 0; trial < 200; ++trial) {
        const auto f = random_field_of(rng, 64, trial % 2);
        const auto s = t(rng), u = t(rng);
        EXPECT_LE(lattice_identity_residual(fam, f, s, u), 1e-12);
    }
    const auto f = random_field_of(rng, 64);
    const auto all = fam.apply_all(f);
    for (std::size_t i = 0; i < all.size(); ++i) EXPECT_LE(max_abs_diff(all[i], fam.apply(fam.indices()[i], f)), 1e-14);
}

TEST(Cutoff, BlockIncrementIdentity) {
    Rng rng(7);
    const CutoffFamily fam(64);
    const auto f = random_field_of(rng, 64, true);
    EXPECT_LE(block_increment_identity_check(fam, f, 3, 9, 5), 1e-12);
    EXPECT_THROW(block_increment_identity_check(fam, f, 3, 9, 3), DomainError);
    EXPECT_THROW(block_increment_identity_check(fam, f, 3, 9, 9), DomainError);
    const MartingaleFamily mart(4);
    const auto g = random_field_of(rng, 16);
    EXPECT_LE(block_increment_identity_check(mart, g, 1, 3, 2), 1e-15);
}

TEST(SmoothBump, ProfileAndClipping) {
    EXPECT_EQ(SmoothBump::chi(1.0), 1.0);
    EXPECT_EQ(SmoothBump::chi(-1.0), 1.0);
    EXPECT_EQ(SmoothBump::chi(2.0), 0.0);
    EXPECT_EQ(SmoothBump::chi(-2.0), 0.0);
    EXPECT_DOUBLE_EQ(SmoothBump::chi(1.5), 0.5);
    double prev = 1.0;
    for (double a = 1.0; a <= 2.0; a += 1.0 / 64) {
        const double v = SmoothBump::chi(a);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, prev + 1e-15);
        prev = v;
    }
    const double pt[] = {0.5, -1.7};
    EXPECT_EQ(SmoothBump::chi(std::span<const double>(pt)), SmoothBump::chi(1.7));
}

TEST(SmoothBump, BandLimitedFunctionsPassThrough) {
    const std::size_t N = 64;
    Field f(N);
    for (std::size_t x = 0; x < N; ++x)
        f[x] = std::cos(2 * std::numbers::pi * 3.0 * x / N) + std::polar(0.5, 2 * std::numbers::pi * -4.0 * x / N);
    EXPECT_LE(max_abs_diff(smooth_dilate_multiplier(f, 2), f), 1e-13);  // |xi| <= 4 = 2^2
    EXPECT_GT(max_abs_diff(smooth_dilate_multiplier(f, 1), f), 1e-3);
}

TEST(SmoothBump, SquareFunctionComparisonIsBounded) {
    Rng rng(8);
    const auto f = random_field_of(rng, 4096);
    const double c = smooth_sharp_square_ratio(f);
    EXPECT_GT(c, 0.0);
    EXPECT_LE(c, 1.0 + 1e-12);
}

TEST(Orthonormal, BuiltInSystemsAreOrthonormal) {
    EXPECT_LE(OrthonormalSystem::fourier(16).gram_deviation(), 1e-12);
    EXPECT_LE(OrthonormalSystem::fourier(15).gram_deviation(), 1e-12);
    EXPECT_LE(OrthonormalSystem::haar(4).gram_deviation(), 1e-12);
    EXPECT_THROW(OrthonormalSystem::from_vectors({{1, 0}, {1, 1}}), DomainError);
    const double s = 1 / std::sqrt(2.0);
    EXPECT_NO_THROW(OrthonormalSystem::from_vectors({{s, s}, {s, -s}}));
}

TEST(Orthonormal, PartialSumExamples) {
    Rng rng(9);
    const auto sys = OrthonormalSystem::fourier(12);
    const auto f = random_field_of(rng, 12, true);
    EXPECT_LE(max_abs_diff(partial_sum_projection(f, sys, 11), f), 1e-13);
    EXPECT_LE(field_norm(partial_sum_projection(sys.vector(3), sys, 2), INFINITY), 1e-14);
    EXPECT_THROW(partial_sum_projection(f, sys, 12), DomainError);
    // Even partial sums of the Fourier system are the sharp cutoffs.
    for (std::size_t t = 0; t <= 5; ++t)
        EXPECT_LE(max_abs_diff(partial_sum_projection(f, sys, 2 * t), fourier_cutoff(f, t)), 1e-13);
}

TEST(Orthonormal, FamilyAndBessel) {
    Rng rng(10);
    const auto fam = PartialSumFamily(std::make_shared<const OrthonormalSystem>(OrthonormalSystem::haar(5)));
    for (int trial = 0; trial < 50; ++trial) {
        const auto f = random_field_of(rng, 32);
        const auto seq = random_seq(rng, fam.indices(), 1 + trial % 12);
        EXPECT_GE(bessel_check(fam, f, seq).slack(), -1e-12);
        const auto sq = block_square_function(fam, f, seq);
        EXPECT_LE(field_norm(sq) / field_norm(f), 1 + 1e-12);
    }
    const auto f = random_field_of(rng, 32);
    const auto all = fam.apply_all(f);
    EXPECT_LE(max_abs_diff(all[7], fam.apply(7, f)), 1e-13);
}

TEST(Families, BlockSquareFunctionSingleBlock) {
    Rng rng(11);
    const MartingaleFamily fam(3);
    const auto f = random_field_of(rng, 8);
    const std::vector<std::int64_t> seq{1, 3};
    const auto sq = block_square_function(fam, f, seq);
    const auto d = fam.apply(3, f) - fam.apply(1, f);
    for (std::size_t x = 0; x < 8; ++x) EXPECT_NEAR(sq[x], std::abs(d[x]), 1e-15);
}

TEST(Families, BlockSquareFunctionHaarSparse) {
    // f = Haar function at level 1, atom 0 (index 2): only the increment 1 -> 2 sees it.
    const auto sys = OrthonormalSystem::haar(3);
    const MartingaleFamily fam(3, true);
    const Field f = sys.vector(2);
    const std::vector<std::int64_t> seq{0, 1, 2, 7};
    const auto sq = block_square_function(fam, f, seq);
    for (std::size_t x = 0; x < 8; ++x) EXPECT_NEAR(sq[x], std::abs(f[x]), 1e-15);
}

TEST(Families, MaximalFunctionAndDoob) {
    Rng rng(12);
    const MartingaleFamily one(3, false, {2});
    const auto f = random_field_of(rng, 8);
    const auto m = maximal_function(one, f);
    const auto p = one.apply(2, f);
    for (std::size_t x = 0; x < 8; ++x) EXPECT_EQ(m[x], std::abs(p[x]));
    const MartingaleFamily fam(12);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const auto g = random_field_of(rng, 4096);
        worst = std::max(worst, field_norm(maximal_function(fam, g)) / field_norm(g));
    }
    EXPECT_LE(worst, 2.0);
}

TEST(Families, ProjectionChainHoldsPointwise) {
    Rng rng(13);
    const MartingaleFamily mart(6);
    const CutoffFamily cut(64);
    const PartialSumFamily haar(std::make_shared<const OrthonormalSystem>(OrthonormalSystem::haar(6)));
    for (const OperatorFamily* fam : std::initializer_list<const OperatorFamily*>{&mart, &cut, &haar}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto f = random_field_of(rng, 64, trial % 2);
            const auto seq = random_seq(rng, fam->indices(), 1 + trial % 5);
            const auto chain = projection_chain(*fam, f, seq);
            EXPECT_LE(chain.worst_pointwise_excess, 1e-12) << fam->name();
            EXPECT_LE(field_norm(chain.increments), field_norm(f) * (1 + 1e-12));
        }
    }
}

TEST(Families, MaximalIsDominatedByOscillationPlusBase) {
    Rng rng(14);
    const MartingaleFamily fam(5);
    const auto f = random_field_of(rng, 32);
    const auto vals = fam.apply_all(f);
    // The top index is excluded: it is never inside a half-open block.
    const auto m = maximal_function(MartingaleFamily(5, false, {0, 1, 2, 3, 4}), f);
    for (std::size_t x = 0; x < 32; ++x) {
        std::vector<Scalar> a;
        for (const auto& v : vals) a.push_back(v[x]);
        const auto pf = ParamFamily::sequence(std::span<const Scalar>(a));
        const auto md = maximal_domination(pf, 2.0);
        EXPECT_NEAR(md.maximal, m[x], 1e-15);
        EXPECT_GE(md.slack(), -1e-12);
    }
}

TEST(Families, RejectBadIndices) {
    EXPECT_THROW(MartingaleFamily(3, false, {0, 4}), DomainError);
    EXPECT_THROW(CutoffFamily(8, {2, 1}), DomainError);
    const MartingaleFamily fam(3);
    Field f(8, 1.0);
    EXPECT_THROW(fam.apply(5, f), DomainError);
    EXPECT_THROW(fam.apply(1, Field(4)), DomainError);
}
