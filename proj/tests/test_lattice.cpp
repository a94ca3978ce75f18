#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "osclab/lattice.hpp"
#include "osclab/random.hpp"

using namespace osclab;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

IntPolynomial mono(unsigned power, std::size_t vars = 1, std::size_t var = 0) {
    return IntPolynomial::monomial(vars, var, power);
}

LatticeFunction random_cyclic(Rng& rng, std::size_t d, std::int64_t n, bool complex = false) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
    std::normal_distribution<double> g;
    std::vector<Scalar> v(total);
    for (auto& x : v) x = Scalar(g(rng), complex ? g(rng) : 0.0);
    return LatticeFunction::cyclic(d, n, std::move(v));
}

LatticeFunction random_lattice(Rng& rng, Coord origin, Coord extent) {
    std::size_t total = 1;
    for (auto e : extent) total *= static_cast<std::size_t>(e);
    std::normal_distribution<double> g;
    std::vector<Scalar> v(total);
    for (auto& x : v) x = g(rng);
    return LatticeFunction::lattice(std::move(origin), std::move(extent), std::move(v));
}

}  // namespace

TEST(Polynomial, EvaluatesExactly) {
    IntPolynomial p(2, {{{2, 0}, 3}, {{0, 1}, -1}, {{1, 1}, 2}}, true);
    const std::int64_t m[] = {4, 5};
    EXPECT_EQ(p.evaluate_i64(m), 3 * 16 - 5 + 2 * 20);
    EXPECT_EQ(p.evaluate_mod(m, 7), (48 - 5 + 40) % 7);
    EXPECT_EQ(p.degree(), 2u);
    const std::int64_t big[] = {3'000'000'000, 1};
    EXPECT_THROW(p.evaluate_i64(big), DomainError);
    EXPECT_EQ(p.evaluate(big), BigInt(3) * BigInt(3'000'000'000) * BigInt(3'000'000'000) - 1 + 6'000'000'000);
}

TEST(Polynomial, RejectsConstantWhenZeroAtOriginRequired) {
    EXPECT_THROW(IntPolynomial(1, {{{0}, 1}}, true), DomainError);
    EXPECT_NO_THROW(IntPolynomial(1, {{{0}, 1}}, false));
    EXPECT_THROW(IntPolynomial(2, {{{1}, 1}}), DomainError);
}

TEST(Lattice, DeltaLinearAverage) {
    const auto f = LatticeFunction::delta(Space::lattice(1), {0});
    const auto a = ergodic_average(f, AverageSpec::standard({mono(1)}, {3}));
    for (std::int64_t x = -2; x <= 6; ++x)
        EXPECT_NEAR(a.at({x}).real(), (x >= 1 && x <= 3) ? 1.0 / 3.0 : 0.0, 1e-15) << x;
}

TEST(Lattice, DeltaQuadraticAverage) {
    const auto f = LatticeFunction::delta(Space::lattice(1), {0});
    const auto a = ergodic_average(f, AverageSpec::standard({mono(2)}, {2}));
    for (std::int64_t x = -1; x <= 6; ++x)
        EXPECT_DOUBLE_EQ(a.at({x}).real(), (x == 1 || x == 4) ? 0.5 : 0.0) << x;
}

TEST(Lattice, DeltaCurveInTwoDimensions) {
    const auto f = LatticeFunction::delta(Space::lattice(2), {0, 0});
    const auto a = ergodic_average(f, AverageSpec::standard({mono(1), mono(2)}, {2}));
    double mass = 0.0;
    for (std::int64_t x = -1; x <= 4; ++x)
        for (std::int64_t y = -1; y <= 6; ++y) {
            const double want = ((x == 1 && y == 1) || (x == 2 && y == 4)) ? 0.5 : 0.0;
            EXPECT_DOUBLE_EQ(a.at({x, y}).real(), want);
            mass += a.at({x, y}).real();
        }
    EXPECT_DOUBLE_EQ(mass, 1.0);
}

TEST(Lattice, EmptyBoxAndBadSpecsAreRejected) {
    const auto f = LatticeFunction::delta(Space::lattice(1), {0});
    EXPECT_THROW(ergodic_average(f, AverageSpec::standard({mono(1)}, {0})), DomainError);
    EXPECT_THROW(ergodic_average(f, AverageSpec::standard({mono(1), mono(1)}, {2})), DomainError);
    EXPECT_THROW(ergodic_average(f, AverageSpec::standard({mono(1)}, {2, 2})), DomainError);
}

TEST(Lattice, OrbitKernelKeepsMultiplicity) {
    // m^2 mod 5 over m = 1..5 hits 1 and 4 twice each, 0 once.
    AverageSpec s = AverageSpec::single(mono(2), 5, {1});
    const auto k = orbit_kernel(s, Space::cyclic(1, 5));
    ASSERT_EQ(k.offsets.size(), 3u);
    EXPECT_EQ(k.total, 5);
    EXPECT_EQ(k.multiplicity, (std::vector<std::int64_t>{1, 2, 2}));
}

TEST(Lattice, StrategiesAgree) {
    Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const auto f = trial % 2 ? random_cyclic(rng, 2, 13, true) : random_lattice(rng, {-3, 2}, {5, 4});
        IntPolynomial p2(2, {{{1, 0}, 1}, {{0, 2}, -2}}, true);
        AverageSpec s{{mono(1, 2, 0), p2}, {3, 4}, {{1, 0}, {1, 1}}};
        const auto a = ergodic_average(f, s, AverageStrategy::direct);
        const auto b = ergodic_average(f, s, AverageStrategy::kernel);
        EXPECT_LE(max_abs_diff(a, b), 1e-14 * std::max(1.0, norm(f, kInf)));
    }
}

TEST(Lattice, CompositionMatchesDirectDoubleSum) {
    Rng rng(11);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto f = random_cyclic(rng, 2, 17, trial % 3 == 0);
        std::uniform_int_distribution<std::int64_t> mdist(1, 30);
        std::vector<AverageSpec> factors{AverageSpec::single(mono(1 + trial % 2), mdist(rng), {1, 0}),
                                         AverageSpec::single(mono(2 + trial % 2), mdist(rng), {0, 1})};
        const auto a = multiparam_average(f, factors);
        const auto b = multiparam_average_direct(f, factors);
        worst = std::max(worst, max_abs_diff(a, b) / norm(f, kInf));
    }
    EXPECT_LE(worst, 1e-12);
}

TEST(Lattice, UnitFactorReducesToSingleAverage) {
    Rng rng(3);
    const auto f = random_cyclic(rng, 2, 11);
    const auto single = AverageSpec::single(mono(2), 9, {0, 1});
    const auto a = multiparam_average(f, {AverageSpec::single(mono(1), 1, {1, 0}), single});
    const auto b = translate(ergodic_average(f, single), {1, 0});
    EXPECT_LE(max_abs_diff(a, b), 1e-15);
}

TEST(Lattice, LinearAveragesMatchPrefixSums) {
    Rng rng(5);
    const auto f = random_lattice(rng, {0, 0}, {9, 7});
    const std::int64_t M1 = 4, M2 = 3;
    const auto a = multiparam_average(f, {AverageSpec::single(mono(1), M1, {1, 0}), AverageSpec::single(mono(1), M2, {0, 1})});
    // Independent oracle: 2-D prefix sums of f; A f(x) = box sum over [x-M, x-1].
    const std::int64_t X = 9, Y = 7;
    std::vector<double> S((X + 1) * (Y + 1), 0.0);
    auto s = [&](std::int64_t i, std::int64_t j) -> double& { return S[static_cast<std::size_t>(i * (Y + 1) + j)]; };
    for (std::int64_t i = 0; i < X; ++i)
        for (std::int64_t j = 0; j < Y; ++j) s(i + 1, j + 1) = f.at({i, j}).real() + s(i, j + 1) + s(i + 1, j) - s(i, j);
    auto box = [&](std::int64_t i0, std::int64_t i1, std::int64_t j0, std::int64_t j1) {
        i0 = std::clamp<std::int64_t>(i0, 0, X), i1 = std::clamp<std::int64_t>(i1, 0, X);
        j0 = std::clamp<std::int64_t>(j0, 0, Y), j1 = std::clamp<std::int64_t>(j1, 0, Y);
        return s(i1, j1) - s(i0, j1) - s(i1, j0) + s(i0, j0);
    };
    for (std::int64_t x = -2; x < X + M1 + 2; ++x)
        for (std::int64_t y = -2; y < Y + M2 + 2; ++y)
            EXPECT_NEAR(a.at({x, y}).real(), box(x - M1, x, y - M2, y) / (M1 * M2), 1e-12);
}

TEST(Lattice, AveragesCommute) {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const auto f = random_cyclic(rng, 2, 19, true);
        const auto A = AverageSpec::single(mono(2), 7 + trial, {1, 2});
        const auto B = AverageSpec::single(mono(3), 5 + trial, {3, 1});
        const auto ab = ergodic_average(ergodic_average(f, B), A);
        const auto ba = ergodic_average(ergodic_average(f, A), B);
        EXPECT_LE(max_abs_diff(ab, ba), 1e-12);
    }
}

TEST(Lattice, MassContractionAndMeasurePreservation) {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const auto f = random_lattice(rng, {-2, 1}, {6, 5});
        const auto a = ergodic_average(f, AverageSpec::standard({mono(1), mono(2)}, {6}));
        EXPECT_LE(std::abs(total_sum(a) - total_sum(f)), 1e-12 * norm(f, 1.0));
        EXPECT_LE(norm(a, kInf), norm(f, kInf) + 1e-15);
        EXPECT_LE(norm(a, 1.0), norm(f, 1.0) * (1 + 1e-14));

        const auto g = random_cyclic(rng, 2, 9);
        const Coord v{2, 7};
        for (double p : {1.0, 2.0, kInf}) EXPECT_EQ(norm(translate(g, v, 3), p), norm(g, p));
        EXPECT_EQ(value_multiset(translate(g, v)), value_multiset(g));
    }
}

TEST(Lattice, TranslateMatchesDefinition) {
    Rng rng(19);
    const auto g = random_cyclic(rng, 2, 7);
    const auto h = translate(g, {1, 3}, 2);
    for (std::int64_t x = 0; x < 7; ++x)
        for (std::int64_t y = 0; y < 7; ++y) EXPECT_EQ(h.at({x, y}), g.at({x - 2, y - 6}));
    const auto l = LatticeFunction::delta(Space::lattice(1), {0});
    EXPECT_EQ(translate(l, {1}, 5).at({5}), Scalar(1.0));
}

TEST(Lattice, TelescopingIdentity) {
    const auto d = LatticeFunction::delta(Space::lattice(1), {0});
    EXPECT_EQ(telescoping_check(d, {1}, 4).max_deviation, 0.0);

    const auto c = LatticeFunction::cyclic(1, 31, std::vector<Scalar>(31, Scalar(2.5)));
    const auto rc = telescoping_check(c, {1}, 7);
    EXPECT_EQ(rc.max_deviation, 0.0);

    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = random_cyclic(rng, 1, 101);
        EXPECT_LE(telescoping_check(g, {1}, 10).relative(), 1e-13);
        const auto g2 = random_cyclic(rng, 2, 15, true);
        EXPECT_LE(telescoping_check(g2, {2, 3}, 12).relative(), 1e-13);
    }
}

TEST(Lattice, BirkhoffInvariantFunction) {
    // v = 2 on Z_8 has orbits {evens} and {odds}.
    std::vector<Scalar> v(8);
    for (int x = 0; x < 8; ++x) v[x] = x % 2 ? 3.0 : -1.0;
    const auto f = LatticeFunction::cyclic(1, 8, v);
    const auto b = birkhoff_decomposition(f, {2});
    EXPECT_LE(max_abs_diff(b.invariant, f), 1e-15);
    EXPECT_LE(norm(b.coboundary, kInf), 1e-14);
    EXPECT_LE(b.residual, 1e-10);
}

TEST(Lattice, BirkhoffCharacterHasNoInvariantPart) {
    const std::int64_t N = 64;
    std::vector<Scalar> v(N);
    for (std::int64_t x = 0; x < N; ++x) v[x] = std::polar(1.0, 2 * std::numbers::pi * x / N);
    const auto f = LatticeFunction::cyclic(1, N, v);
    const auto b = birkhoff_decomposition(f, {1});
    EXPECT_LE(norm(b.invariant, kInf), 1e-14);
    EXPECT_LE(b.residual, 1e-10);
    EXPECT_LE(max_abs_diff(b.coboundary, f), 1e-10);
}

TEST(Lattice, AveragesApproachInvariantPartLikeOneOverM) {
    Rng rng(29);
    const auto f = random_cyclic(rng, 1, 97);
    const auto b = birkhoff_decomposition(f, {1});
    EXPECT_LE(b.residual, 1e-10);
    const double gnorm = norm(b.transfer, kInf);
    for (std::int64_t M : {1, 2, 5, 10, 50, 96}) {
        const auto a = ergodic_average(f, AverageSpec::single(mono(1), M, {1}));
        EXPECT_LE(max_abs_diff(a, b.invariant), 2.0 * gnorm / static_cast<double>(M) + 1e-10) << M;
    }
}

TEST(Lattice, AverageFamilyRunningSumsMatchDirect) {
    const auto d = LatticeFunction::delta(Space::cyclic(1, 8), {0});
    const auto spec = AverageSpec::single(mono(1), 1, {1});
    const auto fam = average_family(d, spec, {{1}, {2}, {4}, {8}});
    ASSERT_EQ(fam.snapshots.size(), 4u);
    const std::int64_t Ms[] = {1, 2, 4, 8};
    for (std::size_t i = 0; i < 4; ++i) {
        AverageSpec s = spec;
        s.M = {Ms[i]};
        EXPECT_LE(max_abs_diff(fam.snapshots[i], ergodic_average(d, s, AverageStrategy::direct)), 1e-15);
    }
    const auto at0 = fam.at({0});
    EXPECT_EQ(at0.size(), 4u);
    EXPECT_DOUBLE_EQ(at0.value(3).real(), 1.0 / 8.0);  // m = 8 hits x = 0
    EXPECT_DOUBLE_EQ(at0.value(0).real(), 0.0);

    Rng rng(31);
    const auto f = random_lattice(rng, {-1}, {6});
    const auto quad = AverageSpec::single(mono(2), 1, {1});
    const auto lf = average_family(f, quad, {{1}, {3}, {7}});
    for (std::size_t i = 0; i < 3; ++i) {
        AverageSpec s = quad;
        s.M = {std::vector<std::int64_t>{1, 3, 7}[i]};
        EXPECT_LE(max_abs_diff(lf.snapshots[i], ergodic_average(f, s)), 1e-15);
    }

    const auto g = random_cyclic(rng, 2, 7);
    const auto two = AverageSpec{{mono(1, 2, 0), mono(2, 2, 1)}, {1, 1}, {{1, 0}, {0, 1}}};
    const auto tf = average_family(g, two, {{1, 2}, {3, 4}});
    AverageSpec s = two;
    s.M = {3, 4};
    EXPECT_LE(max_abs_diff(tf.snapshots[1], ergodic_average(g, s)), 1e-15);
}

TEST(Lattice, AverageFamilyRejectsDegenerateLists) {
    const auto d = LatticeFunction::delta(Space::cyclic(1, 8), {0});
    const auto spec = AverageSpec::single(mono(1), 1, {1});
    EXPECT_THROW(average_family(d, spec, {{1}}), DomainError);
    EXPECT_THROW(average_family(d, spec, {{2}, {2}}), DomainError);
}

TEST(Lattice, LacunarySequence) {
    EXPECT_EQ(lacunary_sequence(2.0, 70), (std::vector<std::int64_t>{1, 2, 4, 8, 16, 32, 64}));
    EXPECT_EQ(lacunary_sequence(1.1, 3), (std::vector<std::int64_t>{1, 2, 3}));
    EXPECT_THROW(lacunary_sequence(1.0, 10), DomainError);
}
