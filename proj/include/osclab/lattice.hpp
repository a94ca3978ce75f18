#pragma once

// Discrete measure-preserving systems and polynomial ergodic averages.
//
// Two model spaces: Z^d with counting measure (functions stored densely over a
// bounding box, zero outside) and the torus Z_N^d with normalized counting
// measure. A shift vector v acts by T x = x - v, so f o T^n (x) = f(x - n v),
// and A_M f(x) = E_{m in Q_M} f(x - sum_i P_i(m) v_i), Q_M = [M_1] x ... x [M_k].

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "osclab/errors.hpp"
#include "osclab/fft.hpp"
#include "osclab/polynomial.hpp"
#include "osclab/seminorms.hpp"
#include "osclab/summation.hpp"

namespace osclab {

using Coord = std::vector<std::int64_t>;

enum class SpaceKind { lattice, cyclic };

struct Space {
    SpaceKind kind = SpaceKind::lattice;
    std::size_t dim = 1;
    std::int64_t modulus = 0;  // N, cyclic only

    bool operator==(const Space&) const = default;

    static Space lattice(std::size_t d) { return {SpaceKind::lattice, d, 0}; }
    static Space cyclic(std::size_t d, std::int64_t n) {
        if (n < 1) throw DomainError("Space: cyclic modulus must be positive");
        return {SpaceKind::cyclic, d, n};
    }
};

inline const char* to_string(SpaceKind k) { return k == SpaceKind::lattice ? "lattice" : "cyclic"; }

inline std::int64_t floor_mod(std::int64_t a, std::int64_t n) {
    const std::int64_t r = a % n;
    return r < 0 ? r + n : r;
}

/// Function on Z^d (finite support inside a box) or on Z_N^d. Row-major,
/// last coordinate fastest.
class LatticeFunction {
public:
    LatticeFunction() = default;

    static LatticeFunction cyclic(std::size_t dim, std::int64_t n, std::vector<Scalar> values = {}) {
        LatticeFunction f;
        f.space_ = Space::cyclic(dim, n);
        f.origin_.assign(dim, 0);
        f.extent_.assign(dim, n);
        f.init(std::move(values));
        return f;
    }

    static LatticeFunction lattice(Coord origin, Coord extent, std::vector<Scalar> values = {}) {
        if (origin.size() != extent.size() || origin.empty())
            throw DomainError("LatticeFunction: origin/extent dimension mismatch");
        for (auto e : extent)
            if (e < 1) throw DomainError("LatticeFunction: box extents must be positive");
        LatticeFunction f;
        f.space_ = Space::lattice(origin.size());
        f.origin_ = std::move(origin);
        f.extent_ = std::move(extent);
        f.init(std::move(values));
        return f;
    }

    /// Zero function on `space`; a lattice box is the single point 0.
    static LatticeFunction zeros(const Space& space) {
        if (space.kind == SpaceKind::cyclic) return cyclic(space.dim, space.modulus);
        return lattice(Coord(space.dim, 0), Coord(space.dim, 1));
    }

    static LatticeFunction delta(const Space& space, const Coord& at) {
        if (at.size() != space.dim) throw DomainError("LatticeFunction::delta: dimension mismatch");
        LatticeFunction f = space.kind == SpaceKind::cyclic ? cyclic(space.dim, space.modulus)
                                                            : lattice(at, Coord(space.dim, 1));
        f.ref(at) = 1.0;
        return f;
    }

    const Space& space() const { return space_; }
    std::size_t dim() const { return space_.dim; }
    const Coord& origin() const { return origin_; }
    const Coord& extent() const { return extent_; }
    std::size_t size() const { return values_.size(); }
    std::span<const Scalar> values() const { return values_; }
    std::span<Scalar> values() { return values_; }
    const std::vector<std::size_t>& strides() const { return strides_; }

    /// Coordinates of the flat cell `i`.
    Coord coords(std::size_t i) const {
        Coord x(dim());
        for (std::size_t d = 0; d < dim(); ++d) {
            x[d] = origin_[d] + static_cast<std::int64_t>(i / strides_[d]);
            i %= strides_[d];
        }
        return x;
    }

    /// Flat cell of x, or nullopt outside a lattice box. Cyclic coordinates are reduced.
    std::optional<std::size_t> cell(std::span<const std::int64_t> x) const {
        if (x.size() != dim()) throw DomainError("LatticeFunction: point dimension mismatch");
        std::size_t flat = 0;
        for (std::size_t d = 0; d < dim(); ++d) {
            std::int64_t c = x[d] - origin_[d];
            if (space_.kind == SpaceKind::cyclic)
                c = floor_mod(c, space_.modulus);
            else if (c < 0 || c >= extent_[d])
                return std::nullopt;
            flat += static_cast<std::size_t>(c) * strides_[d];
        }
        return flat;
    }

    Scalar at(std::span<const std::int64_t> x) const {
        auto c = cell(x);
        return c ? values_[*c] : Scalar(0.0);
    }
    Scalar at(std::initializer_list<std::int64_t> x) const { return at(std::span<const std::int64_t>(x.begin(), x.size())); }

    /// Writable reference; for a lattice function the point must lie in the box.
    Scalar& ref(std::span<const std::int64_t> x) {
        auto c = cell(x);
        if (!c) throw DomainError("LatticeFunction::ref: point outside the stored box");
        return values_[*c];
    }

    /// Same function stored over a larger box (lattice only).
    LatticeFunction expanded(const Coord& lo, const Coord& hi_exclusive) const {
        if (space_.kind == SpaceKind::cyclic) return *this;
        Coord o(dim()), e(dim());
        for (std::size_t d = 0; d < dim(); ++d) {
            o[d] = std::min(lo[d], origin_[d]);
            e[d] = std::max(hi_exclusive[d], origin_[d] + extent_[d]) - o[d];
        }
        LatticeFunction out = lattice(o, e);
        for (std::size_t i = 0; i < size(); ++i) out.ref(coords(i)) = values_[i];
        return out;
    }

private:
    void init(std::vector<Scalar> values) {
        strides_.assign(dim(), 1);
        std::size_t total = 1;
        for (std::size_t d = dim(); d-- > 0;) {
            strides_[d] = total;
            total *= static_cast<std::size_t>(extent_[d]);
        }
        if (values.empty()) values.assign(total, Scalar(0.0));
        if (values.size() != total) throw DomainError("LatticeFunction: value count does not match the box");
        values_ = std::move(values);
    }

    Space space_;
    Coord origin_, extent_;
    std::vector<std::size_t> strides_;
    std::vector<Scalar> values_;
};

namespace detail {

inline void require_same_space(const LatticeFunction& f, const LatticeFunction& g) {
    if (f.space() != g.space()) throw DomainError("lattice functions live on different spaces");
}

/// Common box of two lattice functions (cyclic: unchanged).
inline std::pair<LatticeFunction, LatticeFunction> aligned(const LatticeFunction& f, const LatticeFunction& g) {
    require_same_space(f, g);
    if (f.space().kind == SpaceKind::cyclic) return {f, g};
    Coord lo(f.dim()), hi(f.dim());
    for (std::size_t d = 0; d < f.dim(); ++d) {
        lo[d] = std::min(f.origin()[d], g.origin()[d]);
        hi[d] = std::max(f.origin()[d] + f.extent()[d], g.origin()[d] + g.extent()[d]);
    }
    return {f.expanded(lo, hi), g.expanded(lo, hi)};
}

/// Visits every cell of a box of extents `ext`, passing the flat index of the
/// cell in the box and the flat target index sum_d map[d][c_d].
template <class Fn>
void for_each_mapped(const Coord& ext, const std::vector<std::vector<std::size_t>>& map, Fn&& fn) {
    const std::size_t d = ext.size();
    std::size_t total = 1;
    for (auto e : ext) total *= static_cast<std::size_t>(e);
    std::vector<std::int64_t> c(d, 0);
    std::size_t target = 0;
    for (std::size_t k = 0; k < d; ++k) target += map[k][0];
    for (std::size_t i = 0; i < total; ++i) {
        fn(i, target);
        for (std::size_t k = d; k-- > 0;) {
            target -= map[k][static_cast<std::size_t>(c[k])];
            if (++c[k] < ext[k]) {
                target += map[k][static_cast<std::size_t>(c[k])];
                break;
            }
            c[k] = 0;
            target += map[k][0];
        }
    }
}

}  // namespace detail

/// f + alpha g over the union of supports.
inline LatticeFunction axpy(const LatticeFunction& f, Scalar alpha, const LatticeFunction& g) {
    auto [a, b] = detail::aligned(f, g);
    auto av = a.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < av.size(); ++i) av[i] += alpha * bv[i];
    return a;
}

inline LatticeFunction operator+(const LatticeFunction& f, const LatticeFunction& g) { return axpy(f, 1.0, g); }
inline LatticeFunction operator-(const LatticeFunction& f, const LatticeFunction& g) { return axpy(f, -1.0, g); }

inline LatticeFunction scaled(LatticeFunction f, Scalar c) {
    for (auto& v : f.values()) v *= c;
    return f;
}

/// f o T^n for the shift T x = x - v, i.e. x -> f(x - n v).
inline LatticeFunction translate(const LatticeFunction& f, const Coord& v, std::int64_t n = 1) {
    if (v.size() != f.dim()) throw DomainError("translate: shift dimension mismatch");
    if (f.space().kind == SpaceKind::lattice) {
        Coord o = f.origin();
        for (std::size_t d = 0; d < o.size(); ++d) o[d] += n * v[d];
        return LatticeFunction::lattice(o, f.extent(), std::vector<Scalar>(f.values().begin(), f.values().end()));
    }
    const std::int64_t N = f.space().modulus;
    LatticeFunction out = LatticeFunction::cyclic(f.dim(), N);
    std::vector<std::vector<std::size_t>> map(f.dim());
    for (std::size_t d = 0; d < f.dim(); ++d) {
        map[d].resize(static_cast<std::size_t>(N));
        const std::int64_t s = floor_mod(static_cast<std::int64_t>(static_cast<__int128>(n) * v[d] % N), N);
        for (std::int64_t c = 0; c < N; ++c)
            map[d][static_cast<std::size_t>(c)] = static_cast<std::size_t>(floor_mod(c - s, N)) * f.strides()[d];
    }
    auto src = f.values();
    auto dst = out.values();
    detail::for_each_mapped(f.extent(), map, [&](std::size_t i, std::size_t j) { dst[i] = src[j]; });
    return out;
}

/// L^p norm: counting measure on Z^d, normalized counting measure on Z_N^d.
/// p = infinity gives the sup norm.
inline double norm(const LatticeFunction& f, double p) {
    if (!(p >= 1.0)) throw DomainError("norm: p must be >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (auto v : f.values()) m = std::max(m, std::abs(v));
        return m;
    }
    CompensatedSum s;
    for (auto v : f.values()) s.add(std::pow(std::abs(v), p));
    double total = s.value();
    if (f.space().kind == SpaceKind::cyclic) total /= static_cast<double>(f.size());
    return std::pow(total, 1.0 / p);
}

inline Scalar total_sum(const LatticeFunction& f) {
    ComplexCompensatedSum s;
    for (auto v : f.values()) s.add(v);
    return s.value();
}

/// Integral with respect to the model measure (the mean on a torus).
inline Scalar integral(const LatticeFunction& f) {
    const Scalar s = total_sum(f);
    return f.space().kind == SpaceKind::cyclic ? s / static_cast<double>(f.size()) : s;
}

inline double max_abs_diff(const LatticeFunction& f, const LatticeFunction& g) {
    return norm(f - g, std::numeric_limits<double>::infinity());
}

/// Multiset of values (sorted by real then imaginary part); shift invariance
/// of this multiset is what measure preservation means on a torus.
inline std::vector<Scalar> value_multiset(const LatticeFunction& f) {
    std::vector<Scalar> v(f.values().begin(), f.values().end());
    std::sort(v.begin(), v.end(), [](Scalar a, Scalar b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return v;
}

// ---------------------------------------------------------------------------
// Averages

/// A_M with polynomials P_1..P_d in k variables, box M = (M_1..M_k) and one
/// shift vector per polynomial.
struct AverageSpec {
    std::vector<IntPolynomial> polys;
    std::vector<std::int64_t> M;
    std::vector<Coord> shifts;

    std::size_t num_vars() const { return polys.empty() ? 0 : polys.front().num_vars(); }

    /// Shifts default to the unit vectors e_1..e_d of Z^d.
    static AverageSpec standard(std::vector<IntPolynomial> polys, std::vector<std::int64_t> M) {
        AverageSpec s{std::move(polys), std::move(M), {}};
        const std::size_t d = s.polys.size();
        for (std::size_t j = 0; j < d; ++j) {
            Coord e(d, 0);
            e[j] = 1;
            s.shifts.push_back(std::move(e));
        }
        return s;
    }

    /// One polynomial in one variable along shift v.
    static AverageSpec single(IntPolynomial p, std::int64_t M, Coord v) {
        return AverageSpec{{std::move(p)}, {M}, {std::move(v)}};
    }

    void validate(std::size_t space_dim) const {
        if (polys.empty()) throw DomainError("AverageSpec: no polynomials");
        if (polys.size() != shifts.size()) throw DomainError("AverageSpec: one shift per polynomial required");
        const std::size_t k = num_vars();
        for (const auto& p : polys)
            if (p.num_vars() != k) throw DomainError("AverageSpec: polynomials must share their variables");
        if (M.size() != k) throw DomainError("AverageSpec: box dimension differs from the number of variables");
        for (auto m : M)
            if (m < 1) throw DomainError("AverageSpec: empty averaging box");
        for (const auto& v : shifts)
            if (v.size() != space_dim) throw DomainError("AverageSpec: shift dimension differs from the space");
    }

    std::int64_t box_size() const {
        std::int64_t n = 1;
        for (auto m : M) {
            if (__builtin_mul_overflow(n, m, &n)) throw DomainError("AverageSpec: averaging box too large");
        }
        return n;
    }
};

/// Visits m in Q_M in lexicographic order (m_1 slowest).
template <class Fn>
void for_each_in_box(std::span<const std::int64_t> M, Fn&& fn) {
    if (M.empty()) return;
    Coord m(M.size(), 1);
    for (;;) {
        fn(std::span<const std::int64_t>(m));
        std::size_t k = M.size();
        for (;;) {
            if (k == 0) return;
            --k;
            if (++m[k] <= M[k]) break;
            m[k] = 1;
        }
    }
}

/// Orbit kernel: the multiset {sum_i P_i(m) v_i : m in Q_M} with multiplicities.
struct OrbitKernel {
    std::vector<Coord> offsets;
    std::vector<std::int64_t> multiplicity;
    std::int64_t total = 0;  // #Q_M
};

namespace detail {

inline Coord orbit_offset(const AverageSpec& spec, const Space& space, std::span<const std::int64_t> m) {
    const std::size_t D = space.dim;
    Coord off(D, 0);
    if (space.kind == SpaceKind::cyclic) {
        const std::int64_t N = space.modulus;
        for (std::size_t i = 0; i < spec.polys.size(); ++i) {
            const std::int64_t p = spec.polys[i].evaluate_mod(m, N);
            for (std::size_t d = 0; d < D; ++d)
                off[d] = static_cast<std::int64_t>(
                    (static_cast<__int128>(off[d]) + static_cast<__int128>(p) * floor_mod(spec.shifts[i][d], N)) % N);
        }
        return off;
    }
    std::vector<BigInt> acc(D, BigInt(0));
    for (std::size_t i = 0; i < spec.polys.size(); ++i) {
        const BigInt p = spec.polys[i].evaluate(m);
        for (std::size_t d = 0; d < D; ++d) acc[d] += p * spec.shifts[i][d];
    }
    const BigInt limit = BigInt(1) << 52;
    for (std::size_t d = 0; d < D; ++d) {
        if (acc[d] > limit || acc[d] < -limit) throw DomainError("average: orbit leaves the representable lattice range");
        off[d] = static_cast<std::int64_t>(acc[d]);
    }
    return off;
}

}  // namespace detail

/// Orbit offsets in m order, duplicates kept.
inline std::vector<Coord> orbit_sequence(const AverageSpec& spec, const Space& space) {
    spec.validate(space.dim);
    std::vector<Coord> out;
    out.reserve(static_cast<std::size_t>(spec.box_size()));
    for_each_in_box(spec.M, [&](std::span<const std::int64_t> m) { out.push_back(detail::orbit_offset(spec, space, m)); });
    return out;
}

inline OrbitKernel orbit_kernel(const AverageSpec& spec, const Space& space) {
    spec.validate(space.dim);
    std::map<Coord, std::int64_t> hist;
    for_each_in_box(spec.M, [&](std::span<const std::int64_t> m) { ++hist[detail::orbit_offset(spec, space, m)]; });
    OrbitKernel k;
    k.total = spec.box_size();
    for (auto& [off, mult] : hist) {
        k.offsets.push_back(off);
        k.multiplicity.push_back(mult);
    }
    return k;
}

enum class AverageStrategy { automatic, direct, kernel };

namespace detail {

inline LatticeFunction average_direct(const LatticeFunction& f, const std::vector<Coord>& orbit, std::int64_t total,
                                      const Coord& out_origin, const Coord& out_extent) {
    LatticeFunction out = f.space().kind == SpaceKind::cyclic
                              ? LatticeFunction::cyclic(f.dim(), f.space().modulus)
                              : LatticeFunction::lattice(out_origin, out_extent);
    auto dst = out.values();
    Coord y(f.dim());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Coord x = out.coords(i);
        ComplexCompensatedSum s;
        for (const auto& off : orbit) {
            for (std::size_t d = 0; d < y.size(); ++d) y[d] = x[d] - off[d];
            s.add(f.at(y));
        }
        dst[i] = s.value() / static_cast<double>(total);
    }
    return out;
}

/// Per-axis map sending a cell x of f's box to the cell of x + off in `out`
/// (which must contain it).
inline std::vector<std::vector<std::size_t>> offset_map(const LatticeFunction& f, const Coord& off,
                                                        const LatticeFunction& out) {
    const bool cyc = f.space().kind == SpaceKind::cyclic;
    std::vector<std::vector<std::size_t>> map(f.dim());
    for (std::size_t d = 0; d < f.dim(); ++d) {
        map[d].resize(static_cast<std::size_t>(f.extent()[d]));
        for (std::int64_t c = 0; c < f.extent()[d]; ++c) {
            const std::int64_t target = cyc ? floor_mod(c + off[d], f.space().modulus)
                                            : c + f.origin()[d] + off[d] - out.origin()[d];
            map[d][static_cast<std::size_t>(c)] = static_cast<std::size_t>(target) * out.strides()[d];
        }
    }
    return map;
}

inline LatticeFunction average_kernel(const LatticeFunction& f, const OrbitKernel& k, const Coord& out_origin,
                                      const Coord& out_extent) {
    const bool cyc = f.space().kind == SpaceKind::cyclic;
    LatticeFunction out = cyc ? LatticeFunction::cyclic(f.dim(), f.space().modulus)
                              : LatticeFunction::lattice(out_origin, out_extent);
    std::vector<CompensatedSum> re(out.size()), im(out.size());
    auto src = f.values();
    for (std::size_t o = 0; o < k.offsets.size(); ++o) {
        const auto map = offset_map(f, k.offsets[o], out);
        const double mult = static_cast<double>(k.multiplicity[o]);
        for_each_mapped(f.extent(), map, [&](std::size_t i, std::size_t j) {
            re[j].add(mult * src[i].real());
            im[j].add(mult * src[i].imag());
        });
    }
    auto dst = out.values();
    const double total = static_cast<double>(k.total);
    for (std::size_t j = 0; j < out.size(); ++j) dst[j] = Scalar(re[j].value(), im[j].value()) / total;
    return out;
}

/// Output box on Z^d: f's box translated by every orbit offset.
inline std::pair<Coord, Coord> average_box(const LatticeFunction& f, const std::vector<Coord>& offsets) {
    Coord lo = f.origin(), hi(f.dim());
    for (std::size_t d = 0; d < f.dim(); ++d) hi[d] = f.origin()[d] + f.extent()[d];
    Coord mn(f.dim(), std::numeric_limits<std::int64_t>::max()), mx(f.dim(), std::numeric_limits<std::int64_t>::min());
    for (const auto& off : offsets)
        for (std::size_t d = 0; d < f.dim(); ++d) {
            mn[d] = std::min(mn[d], off[d]);
            mx[d] = std::max(mx[d], off[d]);
        }
    Coord ext(f.dim());
    for (std::size_t d = 0; d < f.dim(); ++d) {
        lo[d] += mn[d];
        ext[d] = hi[d] + mx[d] - lo[d];
    }
    return {lo, ext};
}

}  // namespace detail

/// A_M f. The kernel strategy sparse-convolves f with the orbit histogram, the
/// direct one sums over Q_M at every output point; automatic picks the cheaper
/// by operation count. Both use compensated summation.
inline LatticeFunction ergodic_average(const LatticeFunction& f, const AverageSpec& spec,
                                       AverageStrategy strategy = AverageStrategy::automatic) {
    spec.validate(f.dim());
    const OrbitKernel k = orbit_kernel(spec, f.space());
    auto [lo, ext] = detail::average_box(f, k.offsets);
    if (strategy == AverageStrategy::automatic) {
        double out_cells = 1.0;
        for (auto e : ext) out_cells *= static_cast<double>(e);
        const double direct_cost = out_cells * static_cast<double>(k.total);
        const double kernel_cost = static_cast<double>(f.size()) * static_cast<double>(k.offsets.size());
        strategy = kernel_cost <= direct_cost ? AverageStrategy::kernel : AverageStrategy::direct;
    }
    if (strategy == AverageStrategy::kernel) return detail::average_kernel(f, k, lo, ext);
    return detail::average_direct(f, orbit_sequence(spec, f.space()), k.total, lo, ext);
}

/// Lifts a polynomial in `p.num_vars()` variables into `total` variables,
/// starting at variable `offset`.
inline IntPolynomial lift(const IntPolynomial& p, std::size_t total, std::size_t offset) {
    if (offset + p.num_vars() > total) throw DomainError("lift: variable range exceeds the target");
    std::map<IntPolynomial::Exponents, std::int64_t> terms;
    for (const auto& [e, c] : p.terms()) {
        IntPolynomial::Exponents big(total, 0);
        std::copy(e.begin(), e.end(), big.begin() + static_cast<std::ptrdiff_t>(offset));
        terms[big] = c;
    }
    return IntPolynomial(total, std::move(terms), p.zero_at_origin());
}

/// Single spec whose box is the product of the factors' boxes and whose orbit
/// is the sum of their orbits (the direct double-sum form of a composition).
inline AverageSpec joint_spec(const std::vector<AverageSpec>& factors) {
    if (factors.empty()) throw DomainError("joint_spec: no factors");
    std::size_t total = 0;
    for (const auto& f : factors) total += f.num_vars();
    AverageSpec out;
    std::size_t offset = 0;
    for (const auto& f : factors) {
        for (std::size_t i = 0; i < f.polys.size(); ++i) {
            out.polys.push_back(lift(f.polys[i], total, offset));
            out.shifts.push_back(f.shifts[i]);
        }
        out.M.insert(out.M.end(), f.M.begin(), f.M.end());
        offset += f.num_vars();
    }
    return out;
}

/// Multi-parameter average as the composition A^{(1)} o ... o A^{(k)} of the
/// factors' averages (applied last factor first).
inline LatticeFunction multiparam_average(const LatticeFunction& f, const std::vector<AverageSpec>& factors,
                                          AverageStrategy strategy = AverageStrategy::automatic) {
    if (factors.empty()) throw DomainError("multiparam_average: no factors");
    LatticeFunction g = f;
    for (std::size_t i = factors.size(); i-- > 0;) g = ergodic_average(g, factors[i], strategy);
    return g;
}

inline LatticeFunction multiparam_average_direct(const LatticeFunction& f, const std::vector<AverageSpec>& factors) {
    return ergodic_average(f, joint_spec(factors), AverageStrategy::direct);
}

struct TelescopingReport {
    double max_deviation = 0.0;   // sup_x |A_M h - M^{-1}(g o T - g o T^{M+1})|
    double scale = 0.0;           // sup |g|
    double relative() const { return scale > 0.0 ? max_deviation / scale : max_deviation; }
};

/// Checks A_M (g - g o T) = M^{-1}(g o T - g o T^{M+1}) for the shift T x = x - v.
inline TelescopingReport telescoping_check(const LatticeFunction& g, const Coord& v, std::int64_t M) {
    if (M < 1) throw DomainError("telescoping_check: M must be positive");
    const LatticeFunction h = g - translate(g, v, 1);
    const auto lhs = ergodic_average(h, AverageSpec::single(IntPolynomial::monomial(1, 0, 1), M, v));
    const auto rhs = scaled(translate(g, v, 1) - translate(g, v, M + 1), 1.0 / static_cast<double>(M));
    return {max_abs_diff(lhs, rhs), norm(g, std::numeric_limits<double>::infinity())};
}

struct BirkhoffDecomposition {
    LatticeFunction invariant;    // projection onto T-invariant functions
    LatticeFunction coboundary;   // g - g o T
    LatticeFunction transfer;     // g
    double residual = 0.0;        // sup |f - invariant - coboundary|
};

/// f = invariant + (g - g o T) on Z_N^d with T x = x - v. The invariant part is
/// the orbit average of f; g solves the cohomological equation frequency-wise.
inline BirkhoffDecomposition birkhoff_decomposition(const LatticeFunction& f, const Coord& v) {
    if (f.space().kind != SpaceKind::cyclic) throw DomainError("birkhoff_decomposition: needs a cyclic space");
    if (v.size() != f.dim()) throw DomainError("birkhoff_decomposition: shift dimension mismatch");
    const std::int64_t N = f.space().modulus;

    // Orbit average: the orbit of x is x - n v, n = 0..L-1 with L the order of v.
    std::int64_t L = 1;
    for (auto c : v) {
        const std::int64_t order = N / std::gcd(floor_mod(c, N), N);
        L = std::lcm(L, order);
    }
    LatticeFunction inv = LatticeFunction::cyclic(f.dim(), N);
    {
        std::vector<ComplexCompensatedSum> acc(f.size());
        LatticeFunction cur = f;
        for (std::int64_t n = 0; n < L; ++n) {
            for (std::size_t i = 0; i < f.size(); ++i) acc[i].add(cur.values()[i]);
            cur = translate(cur, v, 1);
        }
        for (std::size_t i = 0; i < f.size(); ++i) inv.values()[i] = acc[i].value() / static_cast<double>(L);
    }

    // (g o T)^(xi) = e(-v.xi/N) g^(xi), so g^ = h^ / (1 - e(-v.xi/N)) off the invariant frequencies.
    const LatticeFunction h = f - inv;
    const std::vector<int> shape(f.dim(), static_cast<int>(N));
    auto hat = fft::transform(h.values(), shape, fft::Direction::forward);
    std::vector<Scalar> ghat(hat.size());
    for (std::size_t i = 0; i < hat.size(); ++i) {
        const Coord xi = inv.coords(i);
        std::int64_t phase = 0;
        for (std::size_t d = 0; d < xi.size(); ++d)
            phase = static_cast<std::int64_t>((static_cast<__int128>(phase) + static_cast<__int128>(xi[d]) * floor_mod(v[d], N)) % N);
        if (phase == 0) continue;
        const double ang = -2.0 * std::numbers::pi * static_cast<double>(phase) / static_cast<double>(N);
        ghat[i] = hat[i] / (Scalar(1.0) - std::polar(1.0, ang));
    }
    LatticeFunction g = LatticeFunction::cyclic(f.dim(), N, fft::transform(ghat, shape, fft::Direction::inverse));
    LatticeFunction cob = g - translate(g, v, 1);
    const double residual = max_abs_diff(f, inv + cob);
    return {std::move(inv), std::move(cob), std::move(g), residual};
}

/// Snapshots (A_M f : M in M_list) sharing one output box.
struct AverageFamily {
    std::vector<IndexPoint> index;        // M as exact points
    std::vector<LatticeFunction> snapshots;

    /// Scalar family t -> A_t f(x) at the point x.
    ParamFamily at(const Coord& x) const {
        std::vector<Scalar> v;
        v.reserve(snapshots.size());
        for (const auto& s : snapshots) v.push_back(s.at(x));
        return ParamFamily(index, std::move(v));
    }
};

/// Averages of f over each box in M_list (strictly increasing coordinatewise).
/// One-variable specs use running sums: S_{M+1} = S_M + f o T^{P(M+1)}.
inline AverageFamily average_family(const LatticeFunction& f, const AverageSpec& tmpl,
                                    const std::vector<std::vector<std::int64_t>>& M_list) {
    if (M_list.size() < 2) throw DomainError("average_family: need at least two boxes");
    for (std::size_t i = 0; i + 1 < M_list.size(); ++i) {
        if (M_list[i].size() != M_list[i + 1].size()) throw DomainError("average_family: box dimension mismatch");
        for (std::size_t d = 0; d < M_list[i].size(); ++d)
            if (M_list[i][d] >= M_list[i + 1][d]) throw DomainError("average_family: boxes must increase strictly");
    }
    AverageFamily out;
    for (const auto& M : M_list) {
        IndexPoint p;
        for (auto m : M) p.push_back(Rational(m));
        out.index.push_back(std::move(p));
    }
    AverageSpec spec = tmpl;
    spec.M = M_list.back();
    spec.validate(f.dim());

    const auto offsets = orbit_sequence(spec, f.space());
    auto [lo, ext] = detail::average_box(f, offsets);
    Coord hi(lo.size());
    for (std::size_t d = 0; d < lo.size(); ++d) hi[d] = lo[d] + ext[d];
    const LatticeFunction base = f.expanded(lo, hi);

    if (spec.num_vars() != 1) {
        // Q_M grows with M, so every snapshot fits inside the largest box.
        for (const auto& M : M_list) {
            AverageSpec s = tmpl;
            s.M = M;
            out.snapshots.push_back(ergodic_average(f, s).expanded(lo, hi));
        }
        return out;
    }

    std::vector<ComplexCompensatedSum> run(base.size());
    auto src = f.values();
    std::size_t next = 0;
    for (std::int64_t m = 1; m <= spec.M[0] && next < M_list.size(); ++m) {
        const auto map = detail::offset_map(f, offsets[static_cast<std::size_t>(m - 1)], base);
        detail::for_each_mapped(f.extent(), map, [&](std::size_t i, std::size_t j) { run[j].add(src[i]); });
        if (m == M_list[next][0]) {
            LatticeFunction snap = base;
            for (std::size_t i = 0; i < base.size(); ++i) snap.values()[i] = run[i].value() / static_cast<double>(m);
            out.snapshots.push_back(std::move(snap));
            ++next;
        }
    }
    return out;
}

/// floor(tau^n), n = 0, 1, ..., deduplicated, up to `max_value` inclusive.
inline std::vector<std::int64_t> lacunary_sequence(double tau, std::int64_t max_value) {
    if (!(tau > 1.0)) throw DomainError("lacunary_sequence: tau must exceed 1");
    std::vector<std::int64_t> out;
    for (int n = 0;; ++n) {
        const long double v = std::floor(std::pow(static_cast<long double>(tau), n));
        if (v > static_cast<long double>(max_value)) break;
        const auto iv = static_cast<std::int64_t>(v);
        if (out.empty() || iv > out.back()) out.push_back(iv);
    }
    return out;
}

}  // namespace osclab
