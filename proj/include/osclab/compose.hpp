#pragma once

// Multi-parameter families T_t = T^1_{t_1} ... T^k_{t_k} built from commuting
// one-parameter families, the block telescoping identity behind their
// oscillation bounds, and polynomial Dunford-Zygmund averages on tori.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "osclab/errors.hpp"
#include "osclab/lattice.hpp"
#include "osclab/operators.hpp"
#include "osclab/seminorms.hpp"

namespace osclab {

/// T_t = identity for every t.
class IdentityFamily : public OperatorFamily {
public:
    IdentityFamily(std::size_t n, std::vector<std::int64_t> indices) : n_(n), idx_(std::move(indices)) {
        if (idx_.empty()) throw DomainError("IdentityFamily: empty index set");
        for (std::size_t i = 1; i < idx_.size(); ++i)
            if (idx_[i] <= idx_[i - 1]) throw DomainError("IdentityFamily: indices must increase strictly");
    }
    std::string name() const override { return "identity"; }
    std::size_t space_size() const override { return n_; }
    const std::vector<std::int64_t>& indices() const override { return idx_; }
    Field apply(std::int64_t t, const Field& f) const override {
        check_input(t, f);
        return f;
    }
    bool is_projection_family() const override { return true; }
    bool positive() const override { return true; }

private:
    std::size_t n_;
    std::vector<std::int64_t> idx_;
};

/// A_M f(x) = (1/M) sum_{m=1}^M f(x - P(m)) on Z_N, indexed by M.
class PolynomialAverageFamily : public OperatorFamily {
public:
    PolynomialAverageFamily(std::int64_t N, IntPolynomial p, std::vector<std::int64_t> indices)
        : N_(N), p_(std::move(p)), idx_(std::move(indices)) {
        if (N < 1) throw DomainError("PolynomialAverageFamily: N must be positive");
        if (p_.num_vars() != 1) throw DomainError("PolynomialAverageFamily: polynomial must have one variable");
        if (idx_.empty() || idx_.front() < 1) throw DomainError("PolynomialAverageFamily: indices must be >= 1");
        for (std::size_t i = 1; i < idx_.size(); ++i)
            if (idx_[i] <= idx_[i - 1]) throw DomainError("PolynomialAverageFamily: indices must increase strictly");
    }
    std::string name() const override { return "average[" + p_.to_string() + "]"; }
    std::size_t space_size() const override { return static_cast<std::size_t>(N_); }
    const std::vector<std::int64_t>& indices() const override { return idx_; }
    Field apply(std::int64_t t, const Field& f) const override {
        check_input(t, f);
        const auto g = LatticeFunction::cyclic(1, N_, f);
        const auto a = ergodic_average(g, AverageSpec::single(p_, t, {1}));
        return Field(a.values().begin(), a.values().end());
    }
    /// Running sums over m, snapshot at each index.
    std::vector<Field> apply_all(const Field& f) const override {
        if (f.size() != space_size()) throw DomainError(name() + ": field size mismatch");
        std::vector<Field> out;
        out.reserve(idx_.size());
        std::vector<ComplexCompensatedSum> run(f.size());
        std::size_t next = 0;
        const auto n = static_cast<std::size_t>(N_);
        for (std::int64_t m = 1; next < idx_.size(); ++m) {
            const std::int64_t mm[] = {m};
            const auto s = static_cast<std::size_t>(p_.evaluate_mod(mm, N_));
            for (std::size_t x = 0; x < n; ++x) run[x].add(f[(x + n - s) % n]);
            if (m == idx_[next]) {
                Field snap(n);
                for (std::size_t x = 0; x < n; ++x) snap[x] = run[x].value() / static_cast<double>(m);
                out.push_back(std::move(snap));
                ++next;
            }
        }
        return out;
    }
    bool positive() const override { return true; }
    const IntPolynomial& polynomial() const { return p_; }

private:
    std::int64_t N_;
    IntPolynomial p_;
    std::vector<std::int64_t> idx_;
};

/// A one-dimensional family acting along one axis of a row-major grid.
class AxisLifted : public OperatorFamily {
public:
    AxisLifted(std::shared_ptr<const OperatorFamily> base, std::vector<std::size_t> shape, std::size_t axis)
        : base_(std::move(base)), shape_(std::move(shape)), axis_(axis) {
        if (axis_ >= shape_.size()) throw DomainError("AxisLifted: axis out of range");
        if (base_->space_size() != shape_[axis_]) throw DomainError("AxisLifted: family size differs from the axis length");
        size_ = 1;
        for (auto s : shape_) size_ *= s;
        stride_ = 1;
        for (std::size_t d = axis_ + 1; d < shape_.size(); ++d) stride_ *= shape_[d];
    }
    std::string name() const override { return base_->name() + "@axis" + std::to_string(axis_); }
    std::size_t space_size() const override { return size_; }
    const std::vector<std::int64_t>& indices() const override { return base_->indices(); }
    Field apply(std::int64_t t, const Field& f) const override {
        check_input(t, f);
        Field out(size_);
        for_each_line([&](std::size_t start) {
            const Field line = gather(f, start);
            scatter(out, start, base_->apply(t, line));
        });
        return out;
    }
    std::vector<Field> apply_all(const Field& f) const override {
        if (f.size() != size_) throw DomainError(name() + ": field size mismatch");
        std::vector<Field> out(indices().size(), Field(size_));
        for_each_line([&](std::size_t start) {
            const auto lines = base_->apply_all(gather(f, start));
            for (std::size_t i = 0; i < lines.size(); ++i) scatter(out[i], start, lines[i]);
        });
        return out;
    }
    bool is_projection_family() const override { return base_->is_projection_family(); }
    bool orthogonal_increments() const override { return base_->orthogonal_increments(); }
    bool positive() const override { return base_->positive(); }

private:
    template <class Fn>
    void for_each_line(Fn&& fn) const {
        const std::size_t block = stride_ * shape_[axis_];
        for (std::size_t outer = 0; outer < size_; outer += block)
            for (std::size_t inner = 0; inner < stride_; ++inner) fn(outer + inner);
    }
    Field gather(const Field& f, std::size_t start) const {
        Field line(shape_[axis_]);
        for (std::size_t i = 0; i < line.size(); ++i) line[i] = f[start + i * stride_];
        return line;
    }
    void scatter(Field& out, std::size_t start, const Field& line) const {
        for (std::size_t i = 0; i < line.size(); ++i) out[start + i * stride_] = line[i];
    }

    std::shared_ptr<const OperatorFamily> base_;
    std::vector<std::size_t> shape_;
    std::size_t axis_;
    std::size_t size_ = 0, stride_ = 1;
};

/// T_t = T^1_{t_1} ... T^k_{t_k} on a shared model space.
class ComposedFamily {
public:
    explicit ComposedFamily(std::vector<std::shared_ptr<const OperatorFamily>> factors, double tol = 1e-12)
        : factors_(std::move(factors)), tol_(tol) {
        if (factors_.empty()) throw DomainError("ComposedFamily: no factors");
        for (const auto& f : factors_)
            if (f->space_size() != factors_.front()->space_size())
                throw DomainError("ComposedFamily: factors act on different spaces");
    }

    std::size_t k() const { return factors_.size(); }
    std::size_t space_size() const { return factors_.front()->space_size(); }
    const OperatorFamily& factor(std::size_t i) const { return *factors_.at(i); }
    std::shared_ptr<const OperatorFamily> factor_ptr(std::size_t i) const { return factors_.at(i); }
    const std::vector<std::int64_t>& axis(std::size_t i) const { return factors_.at(i)->indices(); }
    double tolerance() const { return tol_; }

    /// T_t f. Factors are applied last to first unless `order` (a permutation
    /// of 0..k-1, applied left to right) is given.
    Field apply(std::span<const std::int64_t> t, const Field& f, std::span<const std::size_t> order = {}) const {
        if (t.size() != k()) throw DomainError("apply_composed: index tuple has the wrong length");
        Field g = f;
        if (order.empty()) {
            for (std::size_t i = k(); i-- > 0;) g = factors_[i]->apply(t[i], g);
        } else {
            if (order.size() != k()) throw DomainError("apply_composed: order must be a permutation");
            std::vector<bool> seen(k(), false);
            for (auto i : order) {
                if (i >= k() || seen[i]) throw DomainError("apply_composed: order must be a permutation");
                seen[i] = true;
                g = factors_[i]->apply(t[i], g);
            }
        }
        return g;
    }

    /// Product of all factors except `skip`, at indices `t` (entry `skip` ignored).
    Field apply_except(std::size_t skip, std::span<const std::int64_t> t, const Field& f) const {
        Field g = f;
        for (std::size_t i = k(); i-- > 0;)
            if (i != skip) g = factors_[i]->apply(t[i], g);
        return g;
    }

    /// max ||T^i_s T^j_t f - T^j_t T^i_s f||_inf over random probes.
    double commutation_defect(std::size_t probes, std::uint64_t seed) const {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g;
        double worst = 0.0;
        for (std::size_t p = 0; p < probes; ++p) {
            Field f(space_size());
            for (auto& v : f) v = g(rng);
            for (std::size_t i = 0; i < k(); ++i)
                for (std::size_t j = i + 1; j < k(); ++j) {
                    const auto& a = axis(i);
                    const auto& b = axis(j);
                    const auto s = a[std::uniform_int_distribution<std::size_t>(0, a.size() - 1)(rng)];
                    const auto t = b[std::uniform_int_distribution<std::size_t>(0, b.size() - 1)(rng)];
                    const Field ab = factors_[i]->apply(s, factors_[j]->apply(t, f));
                    const Field ba = factors_[j]->apply(t, factors_[i]->apply(s, f));
                    worst = std::max(worst, max_abs_diff(ab, ba));
                }
        }
        return worst;
    }

    /// Throws with a diagnostic when the factors do not commute within tolerance.
    void require_commuting(std::size_t probes = 4, std::uint64_t seed = 0) const {
        const double d = commutation_defect(probes, seed);
        if (d > tol_)
            throw DomainError("ComposedFamily: factors do not commute (defect " + std::to_string(d) + ")");
    }

    /// Calls fn(positions, T_t f) for every t in the grid box
    /// [lo_0, hi_0) x ... x [lo_{k-1}, hi_{k-1}) of axis positions. Partial
    /// products are memoized along the sweep (one field per axis level) and the
    /// innermost axis uses the factor's batched apply_all.
    template <class Fn>
    void sweep(const Field& f, std::span<const std::size_t> lo, std::span<const std::size_t> hi, Fn&& fn) const {
        if (lo.size() != k() || hi.size() != k()) throw DomainError("sweep: box has the wrong dimension");
        for (std::size_t i = 0; i < k(); ++i)
            if (lo[i] >= hi[i]) return;
        std::vector<std::size_t> pos(k());
        std::function<void(std::size_t, const Field&)> rec = [&](std::size_t level, const Field& g) {
            if (level == 0) {
                const auto all = factors_[0]->apply_all(g);
                for (pos[0] = lo[0]; pos[0] < hi[0]; ++pos[0]) fn(std::span<const std::size_t>(pos), all[pos[0]]);
                return;
            }
            for (pos[level] = lo[level]; pos[level] < hi[level]; ++pos[level])
                rec(level - 1, factors_[level]->apply(axis(level)[pos[level]], g));
        };
        rec(k() - 1, f);
    }

private:
    std::vector<std::shared_ptr<const OperatorFamily>> factors_;
    double tol_;
};

inline Field apply_composed(const ComposedFamily& fam, std::span<const std::int64_t> t, const Field& f) {
    return fam.apply(t, f);
}

namespace detail {

inline std::int64_t integer_coordinate(const Rational& r) {
    if (r.denominator() != 1) throw DomainError("composed family indices are integers");
    return r.numerator();
}

inline std::size_t axis_position(const std::vector<std::int64_t>& axis, std::int64_t t) {
    auto it = std::lower_bound(axis.begin(), axis.end(), t);
    if (it == axis.end() || *it != t) throw DomainError("index " + std::to_string(t) + " is not on the grid axis");
    return static_cast<std::size_t>(it - axis.begin());
}

inline std::vector<std::int64_t> to_tuple(const IndexPoint& p) {
    std::vector<std::int64_t> t;
    for (const auto& c : p) t.push_back(integer_coordinate(c));
    return t;
}

}  // namespace detail

struct TelescopingIdentityReport {
    double max_deviation = 0.0;  // sup_x |LHS - RHS|
    double scale = 0.0;          // sup_x |f|
};

/// T_n f - T_{I_j} f = sum_m T^{(m)}_{n(m)} (T^m_{n_m} - T^m_{I_jm}) f with
/// n(m) = (n_1, ..., n_{m-1}, I_{j,m+1}, ..., I_{jk}).
inline TelescopingIdentityReport telescoping_identity_check(const ComposedFamily& fam, std::span<const std::int64_t> n,
                                                            std::span<const std::int64_t> Ij, const Field& f) {
    if (n.size() != fam.k() || Ij.size() != fam.k()) throw DomainError("telescoping_identity_check: tuple length mismatch");
    for (std::size_t i = 0; i < fam.k(); ++i) {
        detail::axis_position(fam.axis(i), n[i]);
        detail::axis_position(fam.axis(i), Ij[i]);
        if (Ij[i] > n[i]) throw DomainError("telescoping_identity_check: need I_j <= n coordinatewise");
    }
    const Field lhs = fam.apply(n, f) - fam.apply(Ij, f);
    Field rhs(f.size(), 0.0);
    std::vector<std::int64_t> mixed(fam.k());
    for (std::size_t m = 0; m < fam.k(); ++m) {
        for (std::size_t i = 0; i < fam.k(); ++i) mixed[i] = i < m ? n[i] : Ij[i];
        const Field inc = fam.factor(m).apply(n[m], f) - fam.factor(m).apply(Ij[m], f);
        rhs = rhs + fam.apply_except(m, mixed, inc);
    }
    return {max_abs_diff(lhs, rhs), field_norm(f, std::numeric_limits<double>::infinity())};
}

struct MultiparamOscillation {
    double r = 2.0;
    double p = 2.0;
    std::vector<double> pointwise;  // x -> O^r_{I,J}(T_t f(x) : t in grid)
    double norm = 0.0;              // L^p norm of pointwise

    SeminormValue as_value() const { return {SeminormKind::oscillation, r, norm, {}, true}; }
};

/// Pointwise r-oscillation of (T_t f : t in grid) along seq, with half-open boxes.
inline MultiparamOscillation multiparam_oscillation(const ComposedFamily& fam, const Field& f,
                                                    const IncreasingSequence& seq, double r, double p = 2.0) {
    detail::require_exponent(r);
    if (seq.dim() != fam.k()) throw DomainError("multiparam_oscillation: sequence dimension differs from k");
    const bool closed = fault::active() == fault::Mutation::block_boundary;
    std::vector<std::vector<std::int64_t>> tuples;
    for (const auto& e : seq.entries()) tuples.push_back(detail::to_tuple(e));

    MultiparamOscillation out{r, p, std::vector<double>(f.size(), 0.0), 0.0};
    std::vector<double> best(f.size());
    std::vector<std::size_t> lo(fam.k()), hi(fam.k());
    for (std::size_t j = 0; j + 1 < tuples.size(); ++j) {
        for (std::size_t i = 0; i < fam.k(); ++i) {
            const auto& ax = fam.axis(i);
            lo[i] = detail::axis_position(ax, tuples[j][i]);
            const std::size_t top = detail::axis_position(ax, tuples[j + 1][i]);
            hi[i] = closed ? top + 1 : top;
        }
        const Field base = fam.apply(tuples[j], f);
        std::fill(best.begin(), best.end(), 0.0);
        fam.sweep(f, lo, hi, [&](std::span<const std::size_t>, const Field& v) {
            for (std::size_t x = 0; x < f.size(); ++x) best[x] = std::max(best[x], std::pow(std::abs(v[x] - base[x]), r));
        });
        for (std::size_t x = 0; x < f.size(); ++x) out.pointwise[x] += best[x];
    }
    for (auto& v : out.pointwise) v = std::pow(v, 1.0 / r);
    out.norm = field_norm(out.pointwise, p);
    return out;
}

/// The proof's pointwise estimate for positive factors: for every block j,
///   sup_{n in B[I_j]} |T_n f - T_{I_j} f|
///     <= sum_m sup_{n in B[I_j]} T^{(m)}_{n(m)} F_{jm},
///   F_{jm} = sup_{I_jm <= n_m < I_{j+1,m}} |T^m_{n_m} f - T^m_{I_jm} f|.
/// Returns max over j and x of LHS - RHS (<= 0 when the estimate holds).
inline double composed_chain_excess(const ComposedFamily& fam, const Field& f, const IncreasingSequence& seq) {
    for (std::size_t i = 0; i < fam.k(); ++i)
        if (!fam.factor(i).positive()) throw DomainError("composed_chain_excess: factors must have positive kernels");
    std::vector<std::vector<std::int64_t>> tuples;
    for (const auto& e : seq.entries()) tuples.push_back(detail::to_tuple(e));
    const std::size_t k = fam.k();
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < tuples.size(); ++j) {
        std::vector<std::size_t> lo(k), hi(k);
        for (std::size_t i = 0; i < k; ++i) {
            lo[i] = detail::axis_position(fam.axis(i), tuples[j][i]);
            hi[i] = detail::axis_position(fam.axis(i), tuples[j + 1][i]);
        }
        const Field base = fam.apply(tuples[j], f);
        std::vector<double> lhs(f.size(), 0.0), rhs(f.size(), 0.0);
        fam.sweep(f, lo, hi, [&](std::span<const std::size_t>, const Field& v) {
            for (std::size_t x = 0; x < f.size(); ++x) lhs[x] = std::max(lhs[x], std::abs(v[x] - base[x]));
        });
        for (std::size_t m = 0; m < k; ++m) {
            const auto& ax = fam.axis(m);
            const Field at_base = fam.factor(m).apply(tuples[j][m], f);
            Field F(f.size(), 0.0);
            for (std::size_t q = lo[m]; q < hi[m]; ++q) {
                const Field d = fam.factor(m).apply(ax[q], f) - at_base;
                for (std::size_t x = 0; x < f.size(); ++x) F[x] = std::max(F[x].real(), std::abs(d[x]));
            }
            // Later coordinates pinned at I_j, earlier ones swept over the box.
            Field G = F;
            for (std::size_t i = k; i-- > m + 1;) G = fam.factor(i).apply(tuples[j][i], G);
            std::vector<double> sup(f.size(), 0.0);
            if (m == 0) {
                for (std::size_t x = 0; x < f.size(); ++x) sup[x] = G[x].real();
            } else {
                std::vector<std::shared_ptr<const OperatorFamily>> head;
                for (std::size_t i = 0; i < m; ++i) head.push_back(fam.factor_ptr(i));
                ComposedFamily(head, fam.tolerance())
                    .sweep(G, std::span(lo).first(m), std::span(hi).first(m), [&](std::span<const std::size_t>, const Field& v) {
                        for (std::size_t x = 0; x < f.size(); ++x) sup[x] = std::max(sup[x], v[x].real());
                    });
            }
            for (std::size_t x = 0; x < f.size(); ++x) rhs[x] += sup[x];
        }
        for (std::size_t x = 0; x < f.size(); ++x) worst = std::max(worst, lhs[x] - rhs[x]);
    }
    return worst;
}

struct DzProbeReport {
    std::vector<std::vector<std::int64_t>> schedule;
    std::vector<double> deviation;         // sup_x |A_M f(x) - mean f|
    std::optional<double> decay_exponent;  // slope of log deviation against log min M
    ConvergenceCertificate certificate;    // uniform over x on the schedule
};

/// Least-squares slope of log y against log x over pairs with y > 0.
inline std::optional<double> loglog_slope(std::span<const double> x, std::span<const double> y) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > 0.0 && y[i] > 0.0) pts.emplace_back(std::log(x[i]), std::log(y[i]));
    if (pts.size() < 2) return std::nullopt;
    double mx = 0, my = 0;
    for (auto [a, b] : pts) mx += a, my += b;
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxx = 0, sxy = 0;
    for (auto [a, b] : pts) sxx += (a - mx) * (a - mx), sxy += (a - mx) * (b - my);
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

/// Averages A_M f = A^{P_1}_{M_1} ... A^{P_d}_{M_d} f on Z_N^d (P_i acting on
/// axis i) along a schedule of boxes, their distance to the mean, a fitted
/// decay exponent and a Cauchy certificate at tolerance epsilon.
inline DzProbeReport dz_convergence_probe(const LatticeFunction& f, const std::vector<IntPolynomial>& polys,
                                          const std::vector<std::vector<std::int64_t>>& schedule, double epsilon) {
    if (f.space().kind != SpaceKind::cyclic) throw DomainError("dz_convergence_probe: needs a cyclic space");
    const std::size_t d = f.dim();
    if (polys.size() != d) throw DomainError("dz_convergence_probe: one polynomial per axis required");
    if (schedule.empty()) throw DomainError("dz_convergence_probe: empty schedule");
    const Scalar mean = integral(f);
    DzProbeReport rep;
    rep.schedule = schedule;
    std::vector<LatticeFunction> averages;
    std::vector<double> mins;
    for (const auto& M : schedule) {
        if (M.size() != d) throw DomainError("dz_convergence_probe: schedule entry has the wrong length");
        std::vector<AverageSpec> factors;
        for (std::size_t i = 0; i < d; ++i) {
            Coord e(d, 0);
            e[i] = 1;
            factors.push_back(AverageSpec::single(polys[i], M[i], e));
        }
        auto a = multiparam_average(f, factors);
        double dev = 0.0;
        for (auto v : a.values()) dev = std::max(dev, std::abs(v - mean));
        rep.deviation.push_back(dev);
        mins.push_back(static_cast<double>(*std::min_element(M.begin(), M.end())));
        averages.push_back(std::move(a));
    }
    rep.decay_exponent = loglog_slope(mins, rep.deviation);

    if (schedule.size() >= 2) {
        std::vector<IndexPoint> idx;
        for (const auto& M : schedule) {
            IndexPoint p;
            for (auto m : M) p.push_back(Rational(m));
            idx.push_back(std::move(p));
        }
        ConvergenceCertificate worst{true, Rational(0), 0.0, 0};
        bool first = true;
        for (std::size_t x = 0; x < f.size(); ++x) {
            std::vector<Scalar> vals;
            for (const auto& a : averages) vals.push_back(a.values()[x]);
            const auto c = convergence_certificate(ParamFamily(idx, std::move(vals)), epsilon);
            if (!c.found) {
                worst = {};
                break;
            }
            if (first || c.threshold > worst.threshold ||
                (c.threshold == worst.threshold && c.tail_diameter > worst.tail_diameter))
                worst = c;
            first = false;
        }
        rep.certificate = worst;
    }
    return rep;
}

}  // namespace osclab
