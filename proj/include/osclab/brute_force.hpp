#pragma once

// Exhaustive oracles for the seminorm kernels. These evaluate the definitions
// directly by enumerating sequences and share no code with seminorms.hpp
// beyond the ParamFamily container, so they can serve as independent checks.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "osclab/seminorms.hpp"

namespace osclab::brute {

inline constexpr std::size_t kMaxOneParam = 20;

namespace detail {

inline void require_small(const ParamFamily& fam, std::size_t limit, const char* who) {
    if (fam.size() > limit)
        throw DomainError(std::string(who) + ": refused, index set too large for enumeration");
}

/// Calls visit(chain) for every strictly increasing chain of at least two
/// points of a one-parameter family (bitmask enumeration).
template <class Visit>
void each_subsequence(std::size_t n, Visit&& visit) {
    std::vector<std::size_t> chain;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) < 2) continue;
        chain.clear();
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) chain.push_back(i);
        visit(chain);
    }
}

/// Direct evaluation of the oscillation sum (before the 1/r root): scans the
/// whole index set for every block and tests membership with exact rationals.
inline double oscillation_power(const ParamFamily& fam, const std::vector<std::size_t>& chain, double r,
                                const IndexMask& mask) {
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < chain.size(); ++j) {
        const IndexPoint& lo = fam.index(chain[j]);
        const IndexPoint& hi = fam.index(chain[j + 1]);
        double sup = 0.0;
        for (std::size_t t = 0; t < fam.size(); ++t) {
            if (!mask.empty() && !mask[t]) continue;
            bool inside = true;
            for (std::size_t c = 0; c < lo.size(); ++c)
                if (!(lo[c] <= fam.index(t)[c] && fam.index(t)[c] < hi[c])) inside = false;
            if (inside) sup = std::max(sup, std::pow(std::abs(fam.value(t) - fam.value(chain[j])), r));
        }
        total += sup;
    }
    return total;
}

}  // namespace detail

/// r-variation by enumerating all 2^n subsequences; n <= 20.
inline SeminormValue variation_bruteforce(const ParamFamily& fam, double r) {
    if (!(r >= 1.0)) throw DomainError("variation_bruteforce: r must be >= 1");
    if (fam.dim() != 1) throw DomainError("variation_bruteforce: one-parameter families only");
    detail::require_small(fam, kMaxOneParam, "variation_bruteforce");
    double best = 0.0;
    std::vector<std::size_t> arg;
    detail::each_subsequence(fam.size(), [&](const std::vector<std::size_t>& c) {
        double s = 0.0;
        for (std::size_t j = 0; j + 1 < c.size(); ++j) s += std::pow(std::abs(fam.value(c[j + 1]) - fam.value(c[j])), r);
        if (s > best || arg.empty()) {
            best = std::max(best, s);
            arg = c;
        }
    });
    return {SeminormKind::variation, r, std::pow(best, 1.0 / r), arg, true};
}

inline SeminormValue jump_count_bruteforce(const ParamFamily& fam, double lambda) {
    if (fam.dim() != 1) throw DomainError("jump_count_bruteforce: one-parameter families only");
    detail::require_small(fam, kMaxOneParam, "jump_count_bruteforce");
    std::size_t best = 0;
    detail::each_subsequence(fam.size(), [&](const std::vector<std::size_t>& c) {
        for (std::size_t j = 0; j + 1 < c.size(); ++j)
            if (std::abs(fam.value(c[j + 1]) - fam.value(c[j])) < lambda) return;
        best = std::max(best, c.size() - 1);
    });
    return {SeminormKind::jump_count, lambda, static_cast<double>(best), {}, true};
}

/// Overlapping-pairs jump count by depth-first search over all admissible
/// pair sequences s_1 < t_1 <= s_2 < t_2 <= ...
inline SeminormValue overlap_jump_count_bruteforce(const ParamFamily& fam, double lambda) {
    if (fam.dim() != 1) throw DomainError("overlap_jump_count_bruteforce: one-parameter families only");
    detail::require_small(fam, 14, "overlap_jump_count_bruteforce");
    const std::size_t n = fam.size();
    std::function<std::size_t(std::size_t)> search = [&](std::size_t from) -> std::size_t {
        std::size_t best = 0;
        for (std::size_t s = from; s < n; ++s)
            for (std::size_t t = s + 1; t < n; ++t)
                if (std::abs(fam.value(t) - fam.value(s)) >= lambda) best = std::max(best, 1 + search(t));
        return best;
    };
    return {SeminormKind::overlap_jump_count, lambda, static_cast<double>(search(0)), {}, true};
}

/// Oscillation along the chain of positions, straight from the definition.
inline double oscillation_definition(const ParamFamily& fam, const std::vector<std::size_t>& chain, double r,
                                     const IndexMask& mask = {}) {
    return std::pow(detail::oscillation_power(fam, chain, r, mask), 1.0 / r);
}

/// sup over every strictly increasing chain (any dimension) with at most
/// j_max blocks (0 = unbounded) of the oscillation, by depth-first enumeration.
inline SeminormValue sup_oscillation_bruteforce(const ParamFamily& fam, double r, std::size_t j_max = 0) {
    detail::require_small(fam, 27, "sup_oscillation_bruteforce");
    const std::size_t n = fam.size();
    if (j_max == 0) j_max = n - 1;
    double best = 0.0;
    std::vector<std::size_t> arg, chain;
    std::function<void()> extend = [&]() {
        if (chain.size() >= 2) {
            const double v = detail::oscillation_power(fam, chain, r, {});
            if (v > best || arg.empty()) {
                best = std::max(best, v);
                arg = chain;
            }
        }
        if (chain.size() == j_max + 1) return;
        for (std::size_t v = 0; v < n; ++v) {
            const IndexPoint& prev = fam.index(chain.back());
            const IndexPoint& next = fam.index(v);
            bool up = true;
            for (std::size_t c = 0; c < prev.size(); ++c)
                if (!(prev[c] < next[c])) up = false;
            if (!up) continue;
            chain.push_back(v);
            extend();
            chain.pop_back();
        }
    };
    for (std::size_t s = 0; s < n; ++s) {
        chain = {s};
        extend();
    }
    return {SeminormKind::oscillation, r, std::pow(best, 1.0 / r), arg, true};
}

}  // namespace osclab::brute
