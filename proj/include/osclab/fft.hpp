#pragma once

// Thin FFTW wrapper. Plans are created once per (shape, direction) under a
// lock and never modified afterwards; execution goes through the new-array
// interface, which FFTW documents as thread-safe.

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "osclab/errors.hpp"

namespace osclab::fft {

using Complex = std::complex<double>;

enum class Direction { forward, inverse };

namespace detail {

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const {
        if (p) fftw_destroy_plan(p);
    }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

inline fftw_plan plan_for(const std::vector<int>& shape, Direction dir) {
    static std::map<std::pair<std::vector<int>, int>, Plan> cache;
    std::lock_guard lock(planner_mutex());
    auto key = std::make_pair(shape, dir == Direction::forward ? 0 : 1);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second.get();
    std::size_t total = 1;
    for (int s : shape) total *= static_cast<std::size_t>(s);
    std::vector<Complex> in(total), out(total);
    fftw_plan p = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(),
                                reinterpret_cast<fftw_complex*>(in.data()),
                                reinterpret_cast<fftw_complex*>(out.data()),
                                dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw DomainError("fft: planner failed");
    auto [pos, _] = cache.emplace(std::move(key), Plan(p));
    return pos->second.get();
}

}  // namespace detail

/// Row-major multidimensional DFT.
/// forward: F(xi) = sum_x f(x) e(-x.xi/N); inverse: f(x) = (1/#) sum_xi F(xi) e(x.xi/N).
inline std::vector<Complex> transform(std::span<const Complex> in, const std::vector<int>& shape, Direction dir) {
    std::size_t total = 1;
    for (int s : shape) {
        if (s <= 0) throw DomainError("fft: non-positive extent");
        total *= static_cast<std::size_t>(s);
    }
    if (total != in.size()) throw DomainError("fft: shape does not match data size");
    std::vector<Complex> src(in.begin(), in.end()), out(total);
    fftw_execute_dft(detail::plan_for(shape, dir), reinterpret_cast<fftw_complex*>(src.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    if (dir == Direction::inverse) {
        const double scale = 1.0 / static_cast<double>(total);
        for (auto& z : out) z *= scale;
    }
    return out;
}

inline std::vector<Complex> forward(std::span<const Complex> in) {
    return transform(in, {static_cast<int>(in.size())}, Direction::forward);
}

inline std::vector<Complex> inverse(std::span<const Complex> in) {
    return transform(in, {static_cast<int>(in.size())}, Direction::inverse);
}

/// Balanced representative of residue k mod n: {-floor(n/2), ..., ceil(n/2)-1}.
inline long balanced_frequency(long k, long n) {
    const long half = n / 2;
    k %= n;
    if (k < 0) k += n;
    return k >= n - half ? k - n : k;
}

}  // namespace osclab::fft
