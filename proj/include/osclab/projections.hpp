#pragma once

// Projection families on finite model spaces: dyadic conditional expectations,
// sharp Fourier cutoffs, partial sums of orthonormal expansions, and smooth
// dilated multipliers (which are not projections).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "osclab/errors.hpp"
#include "osclab/fft.hpp"
#include "osclab/operators.hpp"

namespace osclab {

namespace detail {

inline std::size_t dyadic_size(unsigned K) {
    if (K > 30) throw DomainError("dyadic space: K too large");
    return std::size_t{1} << K;
}

inline std::vector<Field::value_type> prefix_sums(const Field& f) {
    std::vector<Field::value_type> s(f.size() + 1);
    for (std::size_t i = 0; i < f.size(); ++i) s[i + 1] = s[i] + f[i];
    return s;
}

/// Replaces f on [lo, lo+len) by its mean, using prefix sums of the original f.
inline void fill_mean(Field& out, const std::vector<Field::value_type>& pre, std::size_t lo, std::size_t len) {
    const auto mean = (pre[lo + len] - pre[lo]) / static_cast<double>(len);
    std::fill(out.begin() + static_cast<std::ptrdiff_t>(lo), out.begin() + static_cast<std::ptrdiff_t>(lo + len), mean);
}

inline void require_dyadic(const Field& f, unsigned K) {
    if (f.size() != dyadic_size(K)) throw DomainError("martingale: field size must be 2^K");
}

}  // namespace detail

/// E[f | F_n] on {0, ..., 2^K - 1}: block means over blocks of length 2^{K-n}.
inline Field martingale_projection(const Field& f, unsigned K, unsigned n) {
    detail::require_dyadic(f, K);
    if (n > K) throw DomainError("martingale_projection: level out of range");
    const auto pre = detail::prefix_sums(f);
    Field out(f.size());
    const std::size_t len = std::size_t{1} << (K - n);
    for (std::size_t lo = 0; lo < f.size(); lo += len) detail::fill_mean(out, pre, lo, len);
    return out;
}

/// Step t of the refined dyadic filtration (t = 0 .. 2^K - 1). Each step splits
/// one atom, left to right within a level, so step 2^n - 1 is level n and the
/// filtration has t + 1 atoms at step t.
struct RefinedStep {
    unsigned level;        // n with 2^n - 1 <= t < 2^{n+1} - 1
    std::size_t split;     // number of level-n atoms already split
};

inline RefinedStep refined_step(std::uint64_t t) {
    unsigned n = 0;
    while ((std::uint64_t{2} << n) - 1 <= t) ++n;
    return {n, static_cast<std::size_t>(t + 1 - (std::uint64_t{1} << n))};
}

inline Field refined_martingale_projection(const Field& f, unsigned K, std::uint64_t t) {
    detail::require_dyadic(f, K);
    if (t >= f.size()) throw DomainError("refined_martingale_projection: step out of range");
    const auto [n, split] = refined_step(t);
    const auto pre = detail::prefix_sums(f);
    Field out(f.size());
    const std::size_t len = std::size_t{1} << (K - n);
    for (std::size_t a = 0, lo = 0; lo < f.size(); ++a, lo += len) {
        if (a < split) {
            detail::fill_mean(out, pre, lo, len / 2);
            detail::fill_mean(out, pre, lo + len / 2, len / 2);
        } else {
            detail::fill_mean(out, pre, lo, len);
        }
    }
    return out;
}

/// Pointwise r-oscillation of (P_t f : 0 <= t < 2^K) for the refined filtration
/// along the steps `seq` (strictly increasing). Returns
/// x -> (sum_j max_{I_j <= t < I_{j+1}} |P_t f(x) - P_{I_j} f(x)|^r)^{1/r}.
/// Each step touches only the atom it splits, so a block costs O(2^K + work of its splits).
inline std::vector<double> refined_martingale_oscillation(const Field& f, unsigned K,
                                                          std::span<const std::uint64_t> seq, double r) {
    detail::require_dyadic(f, K);
    if (seq.size() < 2) throw DomainError("refined_martingale_oscillation: need J >= 1");
    for (std::size_t j = 0; j + 1 < seq.size(); ++j)
        if (seq[j] >= seq[j + 1]) throw DomainError("refined_martingale_oscillation: steps must increase strictly");
    if (seq.back() >= f.size()) throw DomainError("refined_martingale_oscillation: step out of range");
    const auto pre = detail::prefix_sums(f);
    std::vector<double> acc(f.size(), 0.0), best(f.size());
    for (std::size_t j = 0; j + 1 < seq.size(); ++j) {
        const Field base = refined_martingale_projection(f, K, seq[j]);
        Field cur = base;
        std::fill(best.begin(), best.end(), 0.0);
        for (std::uint64_t t = seq[j] + 1; t < seq[j + 1]; ++t) {
            // Step t splits atom `split - 1` of level n.
            const auto [n, split] = refined_step(t);
            std::size_t len, lo;
            if (split == 0) {
                // Entering level n: the last atom of level n-1 was split.
                len = std::size_t{1} << (K - n + 1);
                lo = f.size() - len;
            } else {
                len = std::size_t{1} << (K - n);
                lo = (split - 1) * len;
            }
            detail::fill_mean(cur, pre, lo, len / 2);
            detail::fill_mean(cur, pre, lo + len / 2, len / 2);
            if (r == 2.0)
                for (std::size_t x = lo; x < lo + len; ++x) best[x] = std::max(best[x], std::norm(cur[x] - base[x]));
            else
                for (std::size_t x = lo; x < lo + len; ++x)
                    best[x] = std::max(best[x], std::pow(std::abs(cur[x] - base[x]), r));
        }
        for (std::size_t x = 0; x < f.size(); ++x) acc[x] += best[x];
    }
    for (auto& v : acc) v = std::pow(v, 1.0 / r);
    return acc;
}

/// Sharp cutoff C_t f = inverse DFT of 1_{|xi| <= t} f^(xi), balanced frequencies.
inline Field fourier_cutoff(const Field& f, double t) {
    if (f.empty()) throw DomainError("fourier_cutoff: empty field");
    const long N = static_cast<long>(f.size());
    auto hat = fft::forward(f);
    for (long k = 0; k < N; ++k)
        if (static_cast<double>(std::abs(fft::balanced_frequency(k, N))) > t) hat[static_cast<std::size_t>(k)] = 0.0;
    return fft::inverse(hat);
}

/// chi with 1_{[-1,1]^d} <= chi <= 1_{[-2,2]^d}, built from theta(u) = exp(-1/u).
struct SmoothBump {
    static double theta(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

    /// chi evaluated at a point with sup-norm a = |xi|_inf.
    static double chi(double a) {
        a = std::abs(a);
        if (a <= 1.0) return 1.0;
        if (a >= 2.0) return 0.0;
        const double up = theta(2.0 - a), down = theta(a - 1.0);
        return up / (up + down);
    }

    static double chi(std::span<const double> xi) {
        double a = 0.0;
        for (double v : xi) a = std::max(a, std::abs(v));
        return chi(a);
    }
};

/// Multiplies f^ by chi(2^{-n} xi) on balanced integer frequencies.
inline Field smooth_dilate_multiplier(const Field& f, unsigned n) {
    const long N = static_cast<long>(f.size());
    auto hat = fft::forward(f);
    const double scale = std::ldexp(1.0, -static_cast<int>(n));
    for (long k = 0; k < N; ++k)
        hat[static_cast<std::size_t>(k)] *= SmoothBump::chi(static_cast<double>(fft::balanced_frequency(k, N)) * scale);
    return fft::inverse(hat);
}

/// Orthonormal basis of C^N (counting inner product <f, g> = sum f conj(g)).
class OrthonormalSystem {
public:
    OrthonormalSystem(std::string name, std::vector<Field> vectors) : name_(std::move(name)), phi_(std::move(vectors)) {
        if (phi_.empty()) throw DomainError("OrthonormalSystem: no vectors");
        for (const auto& v : phi_)
            if (v.size() != phi_.size()) throw DomainError("OrthonormalSystem: need N vectors of length N");
    }

    /// Characters e(xi x / N) / sqrt(N) ordered xi = 0, 1, -1, 2, -2, ...
    static OrthonormalSystem fourier(std::size_t N) {
        std::vector<Field> v;
        const double s = 1.0 / std::sqrt(static_cast<double>(N));
        for (std::size_t k = 0; k < N; ++k) {
            const long xi = k == 0 ? 0 : (k % 2 ? static_cast<long>((k + 1) / 2) : -static_cast<long>(k / 2));
            Field phi(N);
            for (std::size_t x = 0; x < N; ++x) {
                const long ph = (xi * static_cast<long>(x)) % static_cast<long>(N);
                phi[x] = std::polar(s, 2.0 * std::numbers::pi * static_cast<double>(ph) / static_cast<double>(N));
            }
            v.push_back(std::move(phi));
        }
        return OrthonormalSystem("fourier", std::move(v));
    }

    /// Haar basis of C^{2^K} in breadth-first order: constant, then level 0, 1, ...
    static OrthonormalSystem haar(unsigned K) {
        const std::size_t N = detail::dyadic_size(K);
        std::vector<Field> v;
        v.emplace_back(N, 1.0 / std::sqrt(static_cast<double>(N)));
        for (unsigned n = 0; n < K; ++n) {
            const std::size_t len = N >> n;
            const double h = 1.0 / std::sqrt(static_cast<double>(len));
            for (std::size_t j = 0; j < (std::size_t{1} << n); ++j) {
                Field phi(N, 0.0);
                for (std::size_t x = 0; x < len; ++x) phi[j * len + x] = x < len / 2 ? h : -h;
                v.push_back(std::move(phi));
            }
        }
        return OrthonormalSystem("haar", std::move(v));
    }

    /// User-supplied basis; rejected unless its Gram matrix is the identity within tol.
    static OrthonormalSystem from_vectors(std::vector<Field> vectors, double tol = 1e-12) {
        OrthonormalSystem s("user", std::move(vectors));
        if (s.gram_deviation() > tol) throw DomainError("OrthonormalSystem: vectors are not orthonormal");
        return s;
    }

    const std::string& name() const { return name_; }
    std::size_t size() const { return phi_.size(); }
    const Field& vector(std::size_t k) const { return phi_.at(k); }

    /// max |<Phi_i, Phi_j> - delta_ij|.
    double gram_deviation() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = i; j < size(); ++j) {
                ComplexCompensatedSum s;
                for (std::size_t x = 0; x < size(); ++x) s.add(phi_[i][x] * std::conj(phi_[j][x]));
                worst = std::max(worst, std::abs(s.value() - (i == j ? 1.0 : 0.0)));
            }
        return worst;
    }

    /// <f, Phi_k> for all k.
    Field coefficients(const Field& f) const {
        if (f.size() != size()) throw DomainError("OrthonormalSystem: field size mismatch");
        Field c(size());
        for (std::size_t k = 0; k < size(); ++k) {
            ComplexCompensatedSum s;
            for (std::size_t x = 0; x < size(); ++x) s.add(f[x] * std::conj(phi_[k][x]));
            c[k] = s.value();
        }
        return c;
    }

private:
    std::string name_;
    std::vector<Field> phi_;
};

/// sum_{k <= n} <f, Phi_k> Phi_k.
inline Field partial_sum_projection(const Field& f, const OrthonormalSystem& sys, std::size_t n) {
    if (n >= sys.size()) throw DomainError("partial_sum_projection: n out of range");
    const Field c = sys.coefficients(f);
    Field out(f.size(), 0.0);
    for (std::size_t k = 0; k <= n; ++k)
        for (std::size_t x = 0; x < f.size(); ++x) out[x] += c[k] * sys.vector(k)[x];
    return out;
}

// ---------------------------------------------------------------------------
// Built-in families

namespace detail {

inline std::vector<std::int64_t> iota_indices(std::int64_t lo, std::int64_t hi_inclusive) {
    std::vector<std::int64_t> v(static_cast<std::size_t>(hi_inclusive - lo + 1));
    std::iota(v.begin(), v.end(), lo);
    return v;
}

inline void require_sorted_subset(const std::vector<std::int64_t>& idx, std::int64_t lo, std::int64_t hi, const char* who) {
    if (idx.empty()) throw DomainError(std::string(who) + ": empty index set");
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < lo || idx[i] > hi) throw DomainError(std::string(who) + ": index out of range");
        if (i && idx[i] <= idx[i - 1]) throw DomainError(std::string(who) + ": indices must increase strictly");
    }
}

}  // namespace detail

/// Dyadic martingale: standard levels 0..K, or refined steps 0..2^K - 1.
class MartingaleFamily : public OperatorFamily {
public:
    explicit MartingaleFamily(unsigned K, bool refined = false, std::vector<std::int64_t> indices = {})
        : K_(K), refined_(refined), N_(detail::dyadic_size(K)) {
        const std::int64_t top = refined ? static_cast<std::int64_t>(N_) - 1 : static_cast<std::int64_t>(K);
        idx_ = indices.empty() ? detail::iota_indices(0, top) : std::move(indices);
        detail::require_sorted_subset(idx_, 0, top, "MartingaleFamily");
    }
    std::string name() const override { return refined_ ? "martingale_refined" : "martingale"; }
    std::size_t space_size() const override { return N_; }
    const std::vector<std::int64_t>& indices() const override { return idx_; }
    Field apply(std::int64_t t, const Field& f) const override {
        check_input(t, f);
        return refined_ ? refined_martingale_projection(f, K_, static_cast<std::uint64_t>(t))
                        : martingale_projection(f, K_, static_cast<unsigned>(t));
    }
    bool is_projection_family() const override { return true; }
    bool orthogonal_increments() const override { return true; }
    bool positive() const override { return true; }
    unsigned K() const { return K_; }
    bool refined() const { return refined_; }

private:
    unsigned K_;
    bool refined_;
    std::size_t N_;
    std::vector<std::int64_t> idx_;
};

/// Sharp Fourier cutoffs C_t on Z_N, t = 0..floor(N/2).
class CutoffFamily : public OperatorFamily {
public:
    explicit CutoffFamily(std::size_t N, std::vector<std::int64_t> indices = {}) : N_(N) {
        if (N == 0) throw DomainError("CutoffFamily: N must be positive");
        const auto top = static_cast<std::int64_t>(N / 2);
        idx_ = indices.empty() ? detail::iota_indices(0, top) : std::move(indices);
        detail::require_sorted_subset(idx_, 0, top, "CutoffFamily");
    }
    std::string name() const override { return "cutoff"; }
    std::size_t space_size() const override { return N_; }
    const std::vector<std::int64_t>& indices() const override { return idx_; }
    Field apply(std::int64_t t, const Field& f) const override {
        check_input(t, f);
        return fourier_cutoff(f, static_cast<double>(t));
    }
    std::vector<Field> apply_all(const Field& f) const override {
        if (f.size() != N_) throw DomainError("cutoff: field size mismatch");
        const auto hat = fft::forward(f);
        std::vector<Field> out;
        out.reserve(idx_.size());
        for (auto t : idx_) {
            Field h(N_);
            for (std::size_t k = 0; k < N_; ++k)
                if (std::abs(fft::balanced_frequency(static_cast<long>(k), static_cast<long>(N_))) <= t) h[k] = hat[k];
            out.push_back(fft::inverse(h));
        }
        return out;
    }
    bool is_projection_family() const override { return true; }
    bool orthogonal_increments() const override { return true; }

private:
    std::size_t N_;
    std::vector<std::int64_t> idx_;
};

/// Partial sums P_n of an orthonormal expansion, n = 0..N-1.
class PartialSumFamily : public OperatorFamily {
public:
    explicit PartialSumFamily(std::shared_ptr<const OrthonormalSystem> sys, std::vector<std::int64_t> indices = {})
        : sys_(std::move(sys)) {
        const auto top = static_cast<std::int64_t>(sys_->size()) - 1;
        idx_ = indices.empty() ? detail::iota_indices(0, top) : std::move(indices);
        detail::require_sorted_subset(idx_, 0, top, "PartialSumFamily");
    }
    std::string name() const override { return "orthonormal_" + sys_->name(); }
    std::size_t space_size() const override { return sys_->size(); }
    const std::vector<std::int64_t>& indices() const override { return idx_; }
    Field apply(std::int64_t t, const Field& f) const override {
        check_input(t, f);
        return partial_sum_projection(f, *sys_, static_cast<std::size_t>(t));
    }
    std::vector<Field> apply_all(const Field& f) const override {
        const Field c = sys_->coefficients(f);
        std::vector<Field> out;
        out.reserve(idx_.size());
        Field run(f.size(), 0.0);
        std::size_t k = 0;
        for (auto t : idx_) {
            for (; k <= static_cast<std::size_t>(t); ++k)
                for (std::size_t x = 0; x < f.size(); ++x) run[x] += c[k] * sys_->vector(k)[x];
            out.push_back(run);
        }
        return out;
    }
    bool is_projection_family() const override { return true; }
    bool orthogonal_increments() const override { return true; }
    const OrthonormalSystem& system() const { return *sys_; }

private:
    std::shared_ptr<const OrthonormalSystem> sys_;
    std::vector<std::int64_t> idx_;
};

/// Smooth multipliers chi(2^{-n} xi), n = 0..L with 2^L >= N/2. Not projections.
class SmoothBumpFamily : public OperatorFamily {
public:
    explicit SmoothBumpFamily(std::size_t N) : N_(N) {
        if (N < 2) throw DomainError("SmoothBumpFamily: N must be at least 2");
        std::int64_t L = 0;
        while ((std::size_t{1} << L) < N / 2) ++L;
        idx_ = detail::iota_indices(0, L);
    }
    std::string name() const override { return "bump"; }
    std::size_t space_size() const override { return N_; }
    const std::vector<std::int64_t>& indices() const override { return idx_; }
    Field apply(std::int64_t t, const Field& f) const override {
        check_input(t, f);
        return smooth_dilate_multiplier(f, static_cast<unsigned>(t));
    }

private:
    std::size_t N_;
    std::vector<std::int64_t> idx_;
};

// ---------------------------------------------------------------------------
// Generic quantities for an operator family

namespace detail {

inline std::vector<std::size_t> positions_of(const OperatorFamily& fam, std::span<const std::int64_t> seq) {
    if (seq.size() < 2) throw DomainError("sequence needs J >= 1");
    const auto& I = fam.indices();
    std::vector<std::size_t> pos;
    for (std::size_t j = 0; j < seq.size(); ++j) {
        if (j && seq[j] <= seq[j - 1]) throw DomainError("sequence must increase strictly");
        auto it = std::lower_bound(I.begin(), I.end(), seq[j]);
        if (it == I.end() || *it != seq[j]) throw DomainError("sequence entry is not in the family's index set");
        pos.push_back(static_cast<std::size_t>(it - I.begin()));
    }
    return pos;
}

}  // namespace detail

/// max_x |P_s P_t f - P_{min(s,t)} f|.
inline double lattice_identity_residual(const OperatorFamily& fam, const Field& f, std::int64_t s, std::int64_t t) {
    const Field lhs = fam.apply(s, fam.apply(t, f));
    return max_abs_diff(lhs, fam.apply(std::min(s, t), f));
}

/// max_x |(P_t - P_lo) f - P_t (P_hi - P_lo) f| for lo < t < hi.
inline double block_increment_identity_check(const OperatorFamily& fam, const Field& f, std::int64_t lo, std::int64_t hi,
                                             std::int64_t t) {
    if (!(lo < t && t < hi)) throw DomainError("block_increment_identity_check: need I_j < t < I_{j+1}");
    if (!fam.has_index(lo) || !fam.has_index(hi) || !fam.has_index(t))
        throw DomainError("block_increment_identity_check: indices must belong to the family");
    const Field p_lo = fam.apply(lo, f);
    const Field lhs = fam.apply(t, f) - p_lo;
    const Field rhs = fam.apply(t, fam.apply(hi, f) - p_lo);
    return max_abs_diff(lhs, rhs);
}

/// x -> (sum_j |(P_{I_{j+1}} - P_{I_j}) f(x)|^r)^{1/r}.
inline std::vector<double> block_square_function(const OperatorFamily& fam, const Field& f,
                                                 std::span<const std::int64_t> seq, double r = 2.0) {
    detail::positions_of(fam, seq);
    std::vector<double> acc(f.size(), 0.0);
    Field prev = fam.apply(seq[0], f);
    for (std::size_t j = 1; j < seq.size(); ++j) {
        Field cur = fam.apply(seq[j], f);
        for (std::size_t x = 0; x < f.size(); ++x) acc[x] += std::pow(std::abs(cur[x] - prev[x]), r);
        prev = std::move(cur);
    }
    for (auto& v : acc) v = std::pow(v, 1.0 / r);
    return acc;
}

/// x -> max_t |T_t f(x)|.
inline std::vector<double> maximal_function(const OperatorFamily& fam, const Field& f) {
    std::vector<double> m(f.size(), 0.0);
    for (const auto& g : fam.apply_all(f))
        for (std::size_t x = 0; x < f.size(); ++x) m[x] = std::max(m[x], std::abs(g[x]));
    return m;
}

/// Pointwise r-oscillation of precomputed fields values[i] = T_{I[i]} f along seq
/// (given as positions into the index set); blocks are half-open.
inline std::vector<double> oscillation_field(const std::vector<Field>& values, std::span<const std::size_t> pos, double r) {
    const std::size_t n = values.front().size();
    std::vector<double> acc(n, 0.0), best(n);
    for (std::size_t j = 0; j + 1 < pos.size(); ++j) {
        std::fill(best.begin(), best.end(), 0.0);
        const Field& base = values[pos[j]];
        for (std::size_t i = pos[j] + 1; i < pos[j + 1]; ++i)
            for (std::size_t x = 0; x < n; ++x) best[x] = std::max(best[x], std::pow(std::abs(values[i][x] - base[x]), r));
        for (std::size_t x = 0; x < n; ++x) acc[x] += best[x];
    }
    for (auto& v : acc) v = std::pow(v, 1.0 / r);
    return acc;
}

inline std::vector<double> oscillation_field(const OperatorFamily& fam, const Field& f, std::span<const std::int64_t> seq,
                                             double r = 2.0) {
    const auto pos = detail::positions_of(fam, seq);
    return oscillation_field(fam.apply_all(f), pos, r);
}

struct BesselReport {
    double increments = 0.0;  // sum_j ||Delta_j f||_2^2
    double total = 0.0;       // ||f||_2^2
    double slack() const { return total - increments; }
};

inline BesselReport bessel_check(const OperatorFamily& fam, const Field& f, std::span<const std::int64_t> seq) {
    detail::positions_of(fam, seq);
    CompensatedSum s;
    Field prev = fam.apply(seq[0], f);
    for (std::size_t j = 1; j < seq.size(); ++j) {
        Field cur = fam.apply(seq[j], f);
        const double d = field_norm(cur - prev, 2.0);
        s.add(d * d);
        prev = std::move(cur);
    }
    const double n = field_norm(f, 2.0);
    return {s.value(), n * n};
}

/// The three pointwise quantities of the projection argument along seq:
/// oscillation of (P_t f), the block-wise maximal square function
/// (sum_j max_{t in block j} |P_t Delta_j f|^2)^{1/2}, and the square function
/// of increments (sum_j |Delta_j f|^2)^{1/2}.
struct ProjectionChain {
    std::vector<double> oscillation;
    std::vector<double> block_maximal;
    std::vector<double> increments;
    double worst_pointwise_excess = 0.0;  // max_x (oscillation - block_maximal), should be <= 0
};

inline ProjectionChain projection_chain(const OperatorFamily& fam, const Field& f, std::span<const std::int64_t> seq) {
    const auto pos = detail::positions_of(fam, seq);
    const auto& I = fam.indices();
    const auto values = fam.apply_all(f);
    ProjectionChain out;
    out.oscillation = oscillation_field(values, pos, 2.0);
    out.block_maximal.assign(f.size(), 0.0);
    out.increments.assign(f.size(), 0.0);
    std::vector<double> best(f.size());
    for (std::size_t j = 0; j + 1 < pos.size(); ++j) {
        const Field delta = values[pos[j + 1]] - values[pos[j]];
        std::fill(best.begin(), best.end(), 0.0);
        for (std::size_t i = pos[j] + 1; i < pos[j + 1]; ++i) {
            const Field g = fam.apply(I[i], delta);
            for (std::size_t x = 0; x < f.size(); ++x) best[x] = std::max(best[x], std::norm(g[x]));
        }
        for (std::size_t x = 0; x < f.size(); ++x) {
            out.block_maximal[x] += best[x];
            out.increments[x] += std::norm(delta[x]);
        }
    }
    for (std::size_t x = 0; x < f.size(); ++x) {
        out.block_maximal[x] = std::sqrt(out.block_maximal[x]);
        out.increments[x] = std::sqrt(out.increments[x]);
        out.worst_pointwise_excess = std::max(out.worst_pointwise_excess, out.oscillation[x] - out.block_maximal[x]);
    }
    if (f.empty()) out.worst_pointwise_excess = 0.0;
    return out;
}

/// sum_n ||(chi(2^{-n} .) - 1_{|.| <= 2^n}) f^||_2^2 / ||f||_2^2: how far the
/// smooth multipliers sit from the sharp cutoffs in square-function norm.
inline double smooth_sharp_square_ratio(const Field& f) {
    const SmoothBumpFamily bump(f.size());
    CompensatedSum s;
    for (auto n : bump.indices()) {
        const Field d = bump.apply(n, f) - fourier_cutoff(f, std::ldexp(1.0, static_cast<int>(n)));
        const double v = field_norm(d, 2.0);
        s.add(v * v);
    }
    const double fn = field_norm(f, 2.0);
    return fn > 0.0 ? s.value() / (fn * fn) : 0.0;
}

}  // namespace osclab
