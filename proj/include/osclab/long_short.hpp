#pragma once

// Long/short decomposition of the uniform oscillation norm over a grid in
// (0, inf): the full-grid oscillation against the oscillation at dyadic times
// plus the square sum of r-variations over the dyadic blocks [2^n, 2^{n+1}].

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "osclab/errors.hpp"
#include "osclab/operators.hpp"
#include "osclab/rational.hpp"
#include "osclab/seminorms.hpp"
#include "osclab/summation.hpp"

namespace osclab {

struct LongShortReport {
    double lhs = 0.0;              // sup over I of ||O^r_I(a_t : t in grid)||_p
    double dyadic = 0.0;           // same over the dyadic times of the grid
    double short_variation = 0.0;  // ||(sum_n V^r(a_t : t in [2^n, 2^{n+1}])^2)^{1/2}||_p
    double rhs = 0.0;              // dyadic + short_variation
    double ratio = 0.0;            // lhs / rhs
    double C = 8.0;
    bool exact = true;  // false when p != r: the suprema are then lower bounds
    bool holds = true;  // lhs <= C * rhs
    std::size_t blocks = 0;
    std::vector<std::size_t> witness;  // grid positions of the maximizing I
};

namespace detail {

inline std::optional<int> dyadic_exponent(const Rational& q) {
    auto pow2 = [](std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; };
    if (q <= 0) return std::nullopt;
    if (q.denominator() == 1 && pow2(q.numerator())) return std::countr_zero(static_cast<std::uint64_t>(q.numerator()));
    if (q.numerator() == 1 && pow2(q.denominator()))
        return -static_cast<int>(std::countr_zero(static_cast<std::uint64_t>(q.denominator())));
    return std::nullopt;
}

inline double lp_mean(const std::vector<double>& v, double p) {
    CompensatedSum s;
    for (double x : v) s.add(std::pow(x, p));
    return std::pow(s.value() / static_cast<double>(v.size()), 1.0 / p);
}

/// sup over chains in `pos` of ||O^r||_p for the family restricted to `pos`.
/// The chain maximizes the integral of O^r, which is the exact answer at p = r.
inline std::pair<double, std::vector<std::size_t>> uniform_oscillation_norm(const std::vector<Field>& values,
                                                                            const std::vector<std::size_t>& pos,
                                                                            double r, double p) {
    const std::size_t n = pos.size();
    if (n < 2) return {0.0, {}};
    const std::size_t X = values[pos[0]].size();
    std::vector<double> W(n * n, 0.0), best(X);
    for (std::size_t u = 0; u < n; ++u) {
        std::fill(best.begin(), best.end(), 0.0);
        const Field& base = values[pos[u]];
        for (std::size_t v = u + 1; v < n; ++v) {
            double s = 0.0;
            for (double b : best) s += b;
            W[u * n + v] = s;
            const Field& cur = values[pos[v]];
            for (std::size_t x = 0; x < X; ++x) best[x] = std::max(best[x], std::pow(std::abs(cur[x] - base[x]), r));
        }
    }
    auto chain = heaviest_chain(n, n - 1, [&](std::size_t u, std::size_t v) { return W[u * n + v]; });
    if (chain.nodes.size() < 2) return {0.0, {pos.front(), pos.back()}};

    std::vector<double> osc(X, 0.0);
    for (std::size_t j = 0; j + 1 < chain.nodes.size(); ++j) {
        const std::size_t u = chain.nodes[j], v = chain.nodes[j + 1];
        for (std::size_t x = 0; x < X; ++x) {
            double m = 0.0;
            for (std::size_t t = u; t < v; ++t)
                m = std::max(m, std::pow(std::abs(values[pos[t]][x] - values[pos[u]][x]), r));
            osc[x] += m;
        }
    }
    for (auto& o : osc) o = std::pow(o, 1.0 / r);
    std::vector<std::size_t> witness;
    for (auto c : chain.nodes) witness.push_back(pos[c]);
    return {lp_mean(osc, p), witness};
}

}  // namespace detail

/// values[i] is the field x -> a_{grid[i]}(x) on a finite probability space with
/// uniform weights. The grid must increase strictly, start and end at powers of
/// two and contain every power of two in between.
inline LongShortReport long_short_split_report(const std::vector<Rational>& grid, const std::vector<Field>& values,
                                               double r, double p, double C = 8.0) {
    detail::require_exponent(r);
    if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("long_short_split_report: p must be finite and >= 1");
    if (!(C > 0.0)) throw DomainError("long_short_split_report: C must be positive");
    if (grid.size() < 2 || grid.size() != values.size())
        throw DomainError("long_short_split_report: need at least two grid points with one field each");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i - 1] < grid[i])) throw DomainError("long_short_split_report: grid must increase strictly");
    for (const auto& v : values)
        if (v.size() != values[0].size() || v.empty()) throw DomainError("long_short_split_report: field sizes differ");
    const auto lo = detail::dyadic_exponent(grid.front());
    const auto hi = detail::dyadic_exponent(grid.back());
    if (!lo || !hi) throw DomainError("long_short_split_report: grid must start and end at powers of two");

    std::vector<std::size_t> all(grid.size()), dyadic;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        all[i] = i;
        if (detail::dyadic_exponent(grid[i])) dyadic.push_back(i);
    }
    if (static_cast<int>(dyadic.size()) != *hi - *lo + 1)
        throw DomainError("long_short_split_report: grid does not refine every dyadic block");

    LongShortReport rep;
    rep.C = C;
    rep.exact = p == r;
    std::tie(rep.lhs, rep.witness) = detail::uniform_oscillation_norm(values, all, r, p);
    rep.dyadic = detail::uniform_oscillation_norm(values, dyadic, r, p).first;

    const std::size_t X = values[0].size();
    std::vector<double> sq(X, 0.0);
    rep.blocks = dyadic.size() - 1;
    for (std::size_t b = 0; b + 1 < dyadic.size(); ++b) {
        for (std::size_t x = 0; x < X; ++x) {
            std::vector<Scalar> a;
            for (std::size_t t = dyadic[b]; t <= dyadic[b + 1]; ++t) a.push_back(values[t][x]);
            const double v = variation(ParamFamily::sequence(std::span<const Scalar>(a)), r).value;
            sq[x] += v * v;
        }
    }
    for (auto& s : sq) s = std::sqrt(s);
    rep.short_variation = detail::lp_mean(sq, p);
    rep.rhs = rep.dyadic + rep.short_variation;
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : (rep.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    rep.holds = rep.lhs <= C * rep.rhs + 1e-12 * std::max(1.0, rep.lhs);
    return rep;
}

}  // namespace osclab
