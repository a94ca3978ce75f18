#pragma once

// Seeded random instances: function ensembles, families and increasing
// sequences. Every stream is derived from (seed, trial) so trials are
// independent of scheduling order.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "osclab/seminorms.hpp"

namespace osclab {

using Rng = std::mt19937_64;

inline Rng trial_rng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                      static_cast<std::uint32_t>(stream)};
    return Rng(seq);
}

enum class Ensemble { gaussian, sparse_spikes, low_frequency };

inline const char* to_string(Ensemble e) {
    switch (e) {
        case Ensemble::gaussian: return "gaussian";
        case Ensemble::sparse_spikes: return "sparse_spikes";
        case Ensemble::low_frequency: return "low_frequency";
    }
    return "gaussian";
}

inline Ensemble ensemble_for_trial(std::uint64_t trial) { return static_cast<Ensemble>(trial % 3); }

/// Real samples of length n drawn from one of the three ensembles.
inline std::vector<double> random_real(Rng& rng, std::size_t n, Ensemble e) {
    std::vector<double> out(n, 0.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    switch (e) {
        case Ensemble::gaussian:
            for (auto& v : out) v = normal(rng);
            break;
        case Ensemble::sparse_spikes: {
            const std::size_t spikes = std::max<std::size_t>(1, n / 8);
            std::uniform_int_distribution<std::size_t> where(0, n - 1);
            for (std::size_t s = 0; s < spikes; ++s) out[where(rng)] += normal(rng) * 4.0;
            break;
        }
        case Ensemble::low_frequency: {
            std::uniform_int_distribution<int> freq(1, 4);
            std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
            for (int term = 0; term < 3; ++term) {
                const double f = freq(rng), ph = phase(rng), amp = normal(rng);
                for (std::size_t x = 0; x < n; ++x)
                    out[x] += amp * std::cos(2.0 * std::numbers::pi * f * static_cast<double>(x) / static_cast<double>(n) + ph);
            }
            break;
        }
    }
    return out;
}

inline std::vector<std::complex<double>> random_field(Rng& rng, std::size_t n, Ensemble e) {
    auto re = random_real(rng, n, e);
    return {re.begin(), re.end()};
}

/// One-parameter family of length n on the integers 0..n-1.
inline ParamFamily random_family(Rng& rng, std::size_t n, Ensemble e) {
    auto v = random_real(rng, n, e);
    return ParamFamily::sequence(std::span<const double>(v));
}

/// Strictly increasing positions i_0 < ... < i_J drawn uniformly from 0..n-1.
inline std::vector<std::size_t> random_positions(Rng& rng, std::size_t n, std::size_t J) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(std::min(n, J + 1));
    std::sort(all.begin(), all.end());
    return all;
}

/// Positions spread log-uniformly over 0..n-1 (dense near the start), which is
/// where averages move the most.
inline std::vector<std::size_t> random_log_positions(Rng& rng, std::size_t n, std::size_t J) {
    std::uniform_real_distribution<double> u(0.0, std::log(static_cast<double>(n)));
    std::vector<std::size_t> pos;
    for (int attempt = 0; pos.size() < std::min(n, J + 1) && attempt < 64; ++attempt) {
        while (pos.size() < J + 1) pos.push_back(static_cast<std::size_t>(std::exp(u(rng))) - 1);
        std::sort(pos.begin(), pos.end());
        pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
        for (auto& p : pos) p = std::min(p, n - 1);
        pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
    }
    if (pos.size() < std::min(n, J + 1)) return random_positions(rng, n, J);
    return pos;
}

}  // namespace osclab
