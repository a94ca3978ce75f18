#pragma once

/// Variation, oscillation and jump-counting seminorms of finite parameterized
/// families.
///
/// Index sets live in Q^k and are stored exactly; values are complex doubles.
/// Every routine here is a pure function of its arguments. Suprema over all
/// increasing sequences are computed exactly by longest-path dynamic
/// programming: each of these seminorms is a sum over consecutive pairs of the
/// sequence, so the best sequence is a heaviest path in the DAG of the strict
/// order.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "osclab/errors.hpp"
#include "osclab/rational.hpp"

namespace osclab {

using Scalar = std::complex<double>;

/// Finite family (a_t : t in I), I a finite subset of Q^k.
///
/// Points are kept in lexicographic order, which is a linear extension of the
/// coordinatewise order; for k = 1 it is the natural order.
class ParamFamily {
public:
    ParamFamily(std::vector<IndexPoint> index, std::vector<Scalar> values) {
        if (index.size() != values.size())
            throw DomainError("ParamFamily: index and value counts differ");
        if (index.size() < 2) throw DomainError("ParamFamily: index set needs at least two points");
        const std::size_t k = index.front().size();
        if (k == 0) throw DomainError("ParamFamily: parameter dimension must be positive");
        for (const auto& p : index)
            if (p.size() != k) throw DomainError("ParamFamily: inconsistent parameter dimension");

        std::vector<std::size_t> order(index.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return index[a] < index[b]; });
        index_.reserve(order.size());
        values_.reserve(order.size());
        for (auto i : order) {
            if (!index_.empty() && index_.back() == index[i])
                throw DomainError("ParamFamily: duplicate index point");
            index_.push_back(std::move(index[i]));
            values_.push_back(values[i]);
        }
        dim_ = k;
    }

    /// One-parameter family indexed by 0, 1, ..., n-1.
    static ParamFamily sequence(std::span<const Scalar> values) {
        std::vector<IndexPoint> idx;
        idx.reserve(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) idx.push_back({Rational(static_cast<std::int64_t>(i))});
        return ParamFamily(std::move(idx), std::vector<Scalar>(values.begin(), values.end()));
    }

    static ParamFamily sequence(std::span<const double> values) {
        std::vector<Scalar> v(values.begin(), values.end());
        return sequence(std::span<const Scalar>(v));
    }

    static ParamFamily sequence(std::initializer_list<double> values) {
        std::vector<double> v(values);
        return sequence(std::span<const double>(v));
    }

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return index_.size(); }
    const IndexPoint& index(std::size_t pos) const { return index_[pos]; }
    const std::vector<IndexPoint>& index_set() const { return index_; }
    Scalar value(std::size_t pos) const { return values_[pos]; }
    std::span<const Scalar> values() const { return values_; }

    std::optional<std::size_t> find(const IndexPoint& t) const {
        auto it = std::lower_bound(index_.begin(), index_.end(), t);
        if (it == index_.end() || *it != t) return std::nullopt;
        return static_cast<std::size_t>(it - index_.begin());
    }

    /// Same index set, new values.
    ParamFamily with_values(std::vector<Scalar> values) const {
        if (values.size() != size()) throw DomainError("ParamFamily::with_values: size mismatch");
        ParamFamily out = *this;
        out.values_ = std::move(values);
        return out;
    }

private:
    std::size_t dim_ = 1;
    std::vector<IndexPoint> index_;
    std::vector<Scalar> values_;
};

/// Element of S_J(I): I_0 < I_1 < ... < I_J strictly in every coordinate, J >= 1.
class IncreasingSequence {
public:
    explicit IncreasingSequence(std::vector<IndexPoint> entries) : entries_(std::move(entries)) {
        if (entries_.size() < 2) throw DomainError("IncreasingSequence: need J >= 1 (at least two entries)");
        const std::size_t k = entries_.front().size();
        if (k == 0) throw DomainError("IncreasingSequence: empty index point");
        const bool relaxed = fault::active() == fault::Mutation::non_strict;
        for (std::size_t j = 0; j < entries_.size(); ++j) {
            if (entries_[j].size() != k) throw DomainError("IncreasingSequence: inconsistent dimension");
            if (j == 0) continue;
            const bool ok = relaxed ? below_or_equal(entries_[j - 1], entries_[j])
                                    : strictly_below(entries_[j - 1], entries_[j]);
            if (!ok) throw DomainError("IncreasingSequence: entries must increase strictly in every coordinate");
        }
    }

    static IncreasingSequence from_integers(std::initializer_list<std::int64_t> values) {
        std::vector<IndexPoint> e;
        for (auto v : values) e.push_back({Rational(v)});
        return IncreasingSequence(std::move(e));
    }

    /// Sequence through the given positions of a family (positions must be
    /// increasing in the family's order).
    static IncreasingSequence from_positions(const ParamFamily& fam, std::span<const std::size_t> pos) {
        std::vector<IndexPoint> e;
        e.reserve(pos.size());
        for (auto p : pos) e.push_back(fam.index(p));
        return IncreasingSequence(std::move(e));
    }

    std::size_t length() const { return entries_.size() - 1; }  // J
    std::size_t dim() const { return entries_.front().size(); }
    const IndexPoint& operator[](std::size_t j) const { return entries_[j]; }
    const std::vector<IndexPoint>& entries() const { return entries_; }

private:
    std::vector<IndexPoint> entries_;
};

/// I-bar with I-bar_i = (I_i, ..., I_i).
inline IncreasingSequence diagonal_embed(const IncreasingSequence& seq, std::size_t k_target) {
    if (seq.dim() != 1) throw DomainError("diagonal_embed: input must be a one-parameter sequence");
    if (k_target < 1) throw DomainError("diagonal_embed: target dimension must be positive");
    std::vector<IndexPoint> e;
    e.reserve(seq.entries().size());
    for (const auto& p : seq.entries()) e.emplace_back(k_target, p[0]);
    return IncreasingSequence(std::move(e));
}

enum class SeminormKind { variation, oscillation, jump_count, overlap_jump_count, sup_norm };

inline const char* to_string(SeminormKind k) {
    switch (k) {
        case SeminormKind::variation: return "variation";
        case SeminormKind::oscillation: return "oscillation";
        case SeminormKind::jump_count: return "jump_count";
        case SeminormKind::overlap_jump_count: return "overlap_jump_count";
        case SeminormKind::sup_norm: return "sup_norm";
    }
    return "variation";
}

struct SeminormValue {
    SeminormKind kind = SeminormKind::variation;
    double parameter = 0.0;  // r for variation/oscillation, lambda for jumps
    double value = 0.0;
    /// Positions into the family's (sorted) index set realizing the value.
    /// For overlap_jump_count the positions come in (s_1, t_1, s_2, t_2, ...) pairs.
    std::vector<std::size_t> witness;
    /// False when value is only a lower bound (stochastic search).
    bool exact = true;
};

/// Restriction of the supremum to a subdomain J of I; empty means J = I.
using IndexMask = std::vector<bool>;

namespace detail {

inline void require_exponent(double r) {
    if (!(r >= 1.0) || !std::isfinite(r)) throw DomainError("exponent r must be a finite real >= 1");
}

inline void require_one_parameter(const ParamFamily& fam, const char* who) {
    if (fam.dim() != 1) throw DomainError(std::string(who) + ": requires a one-parameter family");
}

inline bool in_mask(const IndexMask& mask, std::size_t pos) { return mask.empty() || mask[pos]; }

constexpr double kNoEdge = -std::numeric_limits<double>::infinity();

struct Chain {
    double value = 0.0;
    std::vector<std::size_t> nodes;
};

/// Heaviest path in a DAG on nodes 0..n-1 whose edges go from lower to higher
/// node numbers; weight(u, v) == kNoEdge means no edge. Uses at most
/// `max_edges` edges. Ties resolve to the lexicographically smallest node chain.
template <class Weight>
Chain heaviest_chain(std::size_t n, std::size_t max_edges, Weight&& weight) {
    Chain out;
    if (n < 2 || max_edges == 0) return out;
    std::vector<double> w(n * n, kNoEdge);
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v) w[u * n + v] = weight(u, v);

    const std::size_t layers = std::min(max_edges, n - 1);
    const bool unlimited = layers == n - 1;
    // h[c][i]: best suffix value from node i using at most c edges (0 = stop).
    const std::size_t rows = unlimited ? 1 : layers + 1;
    std::vector<double> h(rows * n, 0.0);
    auto row = [&](std::size_t c) { return unlimited ? h.data() : h.data() + c * n; };

    auto relax = [&](double* cur, const double* next) {
        for (std::size_t ii = n; ii-- > 0;) {
            double best = 0.0;
            for (std::size_t j = ii + 1; j < n; ++j) {
                const double e = w[ii * n + j];
                if (e == kNoEdge) continue;
                const double cand = e + next[j];
                if (cand > best) best = cand;
            }
            cur[ii] = best;
        }
    };
    if (unlimited) {
        double* cur = row(0);
        relax(cur, cur);  // reverse sweep: next[j] for j > i is already final
    } else {
        for (std::size_t c = 1; c <= layers; ++c) relax(row(c), row(c - 1));
    }

    // Best chain with at least one edge.
    double best = kNoEdge;
    std::size_t start = n;
    for (std::size_t i = 0; i < n; ++i) {
        const double* next = row(unlimited ? 0 : layers - 1);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double e = w[i * n + j];
            if (e == kNoEdge) continue;
            const double cand = e + next[j];
            if (cand > best) {
                best = cand;
                start = i;
            }
        }
    }
    if (start == n) return out;  // no edges at all

    out.value = best;
    out.nodes.push_back(start);
    std::size_t cur = start;
    double remaining = best;
    std::size_t budget = unlimited ? n : layers;
    while (budget > 0) {
        const double* next = row(unlimited ? 0 : budget - 1);
        std::size_t pick = n;
        for (std::size_t j = cur + 1; j < n; ++j) {
            const double e = w[cur * n + j];
            if (e == kNoEdge) continue;
            if (e + next[j] == remaining) {
                pick = j;
                break;
            }
        }
        if (pick == n) break;
        out.nodes.push_back(pick);
        remaining = next[pick];
        cur = pick;
        if (!unlimited) --budget;
        if (remaining == 0.0) break;  // shortest canonical witness
    }
    return out;
}

/// sup over t in box [I_j, I_{j+1}) of |a_t - a_{I_j}|^r on the positions of a
/// family; honours the fault-injection modes.
inline double block_sup(const ParamFamily& fam, const IndexPoint& lo, const IndexPoint& hi,
                        std::size_t base, double r, const IndexMask& mask,
                        std::optional<std::size_t> next_pos) {
    const auto mode = fault::active();
    const Scalar a0 = fam.value(base);
    double sup = 0.0;
    bool found = false;
    auto consider = [&](std::size_t t) {
        if (!in_mask(mask, t)) return;
        found = true;
        const double d = std::pow(std::abs(fam.value(t) - a0), r);
        if (d > sup) sup = d;
    };
    const bool closed = mode == fault::Mutation::block_boundary;
    if (fam.dim() == 1) {
        const auto& idx = fam.index_set();
        auto first = std::lower_bound(idx.begin(), idx.end(), lo);
        auto last = closed ? std::upper_bound(idx.begin(), idx.end(), hi)
                           : std::lower_bound(idx.begin(), idx.end(), hi);
        for (auto it = first; it < last; ++it) consider(static_cast<std::size_t>(it - idx.begin()));
    } else {
        for (std::size_t t = 0; t < fam.size(); ++t) {
            const bool inside = closed ? (below_or_equal(lo, fam.index(t)) && below_or_equal(fam.index(t), hi))
                                       : in_box(fam.index(t), lo, hi);
            if (inside) consider(t);
        }
    }
    if (!found && mode == fault::Mutation::empty_sup && next_pos)
        sup = std::pow(std::abs(fam.value(*next_pos) - a0), r);
    return sup;
}

}  // namespace detail

/// r-variation: sup over increasing t_0 < ... < t_J of (sum |a_{t_{j+1}} - a_{t_j}|^r)^{1/r}.
/// O(n^2) dynamic programming.
inline SeminormValue variation(const ParamFamily& fam, double r) {
    detail::require_exponent(r);
    detail::require_one_parameter(fam, "variation");
    const auto vals = fam.values();
    auto chain = detail::heaviest_chain(fam.size(), fam.size() - 1, [&](std::size_t u, std::size_t v) {
        return std::pow(std::abs(vals[v] - vals[u]), r);
    });
    if (chain.nodes.size() < 2) chain.nodes = {0, 1};
    return {SeminormKind::variation, r, std::pow(chain.value, 1.0 / r), std::move(chain.nodes), true};
}

/// r-oscillation of the family along `seq`, with the supremum in each box
/// restricted to `subdomain` (empty mask = whole index set). The supremum over
/// an empty set is zero.
inline SeminormValue oscillation(const ParamFamily& fam, const IncreasingSequence& seq, double r,
                                 const IndexMask& subdomain = {}) {
    detail::require_exponent(r);
    if (seq.dim() != fam.dim()) throw DomainError("oscillation: sequence and family dimensions differ");
    if (!subdomain.empty() && subdomain.size() != fam.size())
        throw DomainError("oscillation: subdomain mask size mismatch");
    std::vector<std::size_t> pos;
    pos.reserve(seq.entries().size());
    for (const auto& e : seq.entries()) {
        auto p = fam.find(e);
        if (!p) throw DomainError("oscillation: sequence entry is not in the index set");
        pos.push_back(*p);
    }
    double sum = 0.0;
    for (std::size_t j = 0; j + 1 < pos.size(); ++j)
        sum += detail::block_sup(fam, seq[j], seq[j + 1], pos[j], r, subdomain, pos[j + 1]);
    return {SeminormKind::oscillation, r, std::pow(sum, 1.0 / r), std::move(pos), true};
}

/// sup over J <= j_max and I in S_J(I) of the r-oscillation, one parameter.
/// j_max = 0 means the natural bound #I - 1 (at which the supremum is attained).
inline SeminormValue sup_oscillation(const ParamFamily& fam, double r, std::size_t j_max = 0) {
    detail::require_exponent(r);
    detail::require_one_parameter(fam, "sup_oscillation");
    const std::size_t n = fam.size();
    if (j_max == 0 || j_max > n - 1) j_max = n - 1;
    const auto vals = fam.values();
    const bool closed = fault::active() == fault::Mutation::block_boundary;
    // s[i*n + j] = max_{i <= t < j} |a_t - a_i|^r
    std::vector<double> s(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double run = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (closed) run = std::max(run, std::pow(std::abs(vals[j] - vals[i]), r));
            s[i * n + j] = run;
            if (!closed) run = std::max(run, std::pow(std::abs(vals[j] - vals[i]), r));
        }
    }
    auto chain = detail::heaviest_chain(n, j_max, [&](std::size_t u, std::size_t v) { return s[u * n + v]; });
    if (chain.nodes.size() < 2) chain.nodes = {0, n - 1};
    return {SeminormKind::oscillation, r, std::pow(chain.value, 1.0 / r), std::move(chain.nodes), true};
}

struct MultiparamSearch {
    std::size_t j_max = 0;            // 0 = unbounded
    std::size_t exact_limit = 400;    // exact DP when #I <= exact_limit
    std::size_t trials = 2000;        // random restarts otherwise
    std::uint64_t seed = 0;
};

/// Multi-parameter supremum of the r-oscillation over S_J(I), J <= j_max.
///
/// Exact (heaviest path over the strict coordinatewise order, O(n^3)) while
/// #I <= exact_limit; above that a seeded random search returns a lower bound
/// with `exact == false`.
inline SeminormValue sup_oscillation_multiparam(const ParamFamily& fam, double r,
                                                const MultiparamSearch& opts = {}) {
    detail::require_exponent(r);
    const std::size_t n = fam.size();
    const std::size_t j_max = (opts.j_max == 0 || opts.j_max > n - 1) ? n - 1 : opts.j_max;
    const bool strict_only = fault::active() != fault::Mutation::non_strict;
    auto related = [&](std::size_t u, std::size_t v) {
        return strict_only ? strictly_below(fam.index(u), fam.index(v))
                           : below_or_equal(fam.index(u), fam.index(v));
    };
    auto weight = [&](std::size_t u, std::size_t v) {
        if (!related(u, v)) return detail::kNoEdge;
        return detail::block_sup(fam, fam.index(u), fam.index(v), u, r, {}, v);
    };

    if (n <= opts.exact_limit) {
        auto chain = detail::heaviest_chain(n, j_max, weight);
        return {SeminormKind::oscillation, r, std::pow(chain.value, 1.0 / r), std::move(chain.nodes), true};
    }

    std::mt19937_64 rng(opts.seed);
    double best = 0.0;
    std::vector<std::size_t> best_chain;
    std::vector<std::size_t> succ;
    for (std::size_t trial = 0; trial < opts.trials; ++trial) {
        std::vector<std::size_t> chain{std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)};
        double total = 0.0;
        while (chain.size() <= j_max) {
            succ.clear();
            for (std::size_t v = chain.back() + 1; v < n; ++v)
                if (related(chain.back(), v)) succ.push_back(v);
            if (succ.empty()) break;
            const auto v = succ[std::uniform_int_distribution<std::size_t>(0, succ.size() - 1)(rng)];
            total += weight(chain.back(), v);
            chain.push_back(v);
        }
        if (chain.size() >= 2 && total > best) {
            best = total;
            best_chain = chain;
        }
    }
    return {SeminormKind::oscillation, r, std::pow(best, 1.0 / r), std::move(best_chain), false};
}

/// lambda-jump counting function N_lambda: the longest chain whose consecutive
/// increments are all >= lambda in modulus.
inline SeminormValue jump_count(const ParamFamily& fam, double lambda) {
    if (!(lambda > 0.0)) throw DomainError("jump_count: lambda must be positive");
    detail::require_one_parameter(fam, "jump_count");
    const auto vals = fam.values();
    auto chain = detail::heaviest_chain(fam.size(), fam.size() - 1, [&](std::size_t u, std::size_t v) {
        return std::abs(vals[v] - vals[u]) >= lambda ? 1.0 : detail::kNoEdge;
    });
    return {SeminormKind::jump_count, lambda, chain.value, std::move(chain.nodes), true};
}

/// Overlapping-pairs variant: max J with s_1 < t_1 <= s_2 < t_2 <= ... and
/// |a_{t_j} - a_{s_j}| >= lambda. Greedy earliest-finishing pair is optimal
/// (interval scheduling exchange argument).
inline SeminormValue overlap_jump_count(const ParamFamily& fam, double lambda) {
    if (!(lambda > 0.0)) throw DomainError("overlap_jump_count: lambda must be positive");
    detail::require_one_parameter(fam, "overlap_jump_count");
    const auto vals = fam.values();
    std::vector<std::size_t> witness;
    std::size_t window_start = 0;
    for (std::size_t t = 1; t < vals.size(); ++t) {
        for (std::size_t s = window_start; s < t; ++s) {
            if (std::abs(vals[t] - vals[s]) >= lambda) {
                witness.push_back(s);
                witness.push_back(t);
                window_start = t;
                break;
            }
        }
    }
    const double count = static_cast<double>(witness.size() / 2);
    return {SeminormKind::overlap_jump_count, lambda, count, std::move(witness), true};
}

/// max_t |a_t|.
inline SeminormValue sup_norm(const ParamFamily& fam) {
    double best = 0.0;
    std::size_t at = 0;
    for (std::size_t i = 0; i < fam.size(); ++i)
        if (std::abs(fam.value(i)) > best) {
            best = std::abs(fam.value(i));
            at = i;
        }
    return {SeminormKind::sup_norm, 0.0, best, {at}, true};
}

/// True when the index set is G^k for a one-dimensional grid G.
inline std::optional<std::vector<Rational>> product_grid_axis(const ParamFamily& fam) {
    std::vector<Rational> axis;
    for (const auto& p : fam.index_set())
        for (const auto& c : p) axis.push_back(c);
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    std::size_t expected = 1;
    for (std::size_t i = 0; i < fam.dim(); ++i) expected *= axis.size();
    if (expected != fam.size()) return std::nullopt;
    return axis;
}

/// sup over diagonal sequences I-bar (I in S_J(G)) of the r-oscillation of a
/// family on a product grid G^k.
inline SeminormValue sup_oscillation_diagonal(const ParamFamily& fam, double r) {
    detail::require_exponent(r);
    auto axis = product_grid_axis(fam);
    if (!axis) throw DomainError("sup_oscillation_diagonal: family is not on a product grid");
    const std::size_t g = axis->size();
    const std::size_t k = fam.dim();
    std::vector<std::size_t> diag_pos(g);
    for (std::size_t i = 0; i < g; ++i) diag_pos[i] = *fam.find(IndexPoint(k, (*axis)[i]));
    auto chain = detail::heaviest_chain(g, g - 1, [&](std::size_t u, std::size_t v) {
        return detail::block_sup(fam, fam.index(diag_pos[u]), fam.index(diag_pos[v]), diag_pos[u], r, {},
                                 diag_pos[v]);
    });
    for (auto& node : chain.nodes) node = diag_pos[node];
    return {SeminormKind::oscillation, r, std::pow(chain.value, 1.0 / r), std::move(chain.nodes), true};
}

struct MaximalDomination {
    double maximal = 0.0;       // sup over t in (G \ {max G})^k of |a_t|
    double base = 0.0;          // |a at the minimal diagonal point|
    double oscillation = 0.0;   // sup over diagonal sequences of the r-oscillation
    double slack() const { return base + oscillation - maximal; }
};

/// Sample-level form of "oscillations dominate maximal functions": the
/// maximal function over all but the top grid layer is at most the value at
/// the bottom corner plus the diagonal oscillation supremum.
inline MaximalDomination maximal_domination(const ParamFamily& fam, double r) {
    auto axis = product_grid_axis(fam);
    if (!axis) throw DomainError("maximal_domination: family is not on a product grid");
    const Rational top = axis->back();
    MaximalDomination out;
    for (std::size_t i = 0; i < fam.size(); ++i) {
        const auto& t = fam.index(i);
        if (std::any_of(t.begin(), t.end(), [&](const Rational& c) { return c == top; })) continue;
        out.maximal = std::max(out.maximal, std::abs(fam.value(i)));
    }
    out.base = std::abs(fam.value(*fam.find(IndexPoint(fam.dim(), axis->front()))));
    out.oscillation = fam.dim() == 1 ? sup_oscillation(fam, r).value : sup_oscillation_diagonal(fam, r).value;
    return out;
}

struct ConvergenceCertificate {
    bool found = false;
    Rational threshold{0};        // N: every s, t >= (N,...,N) satisfy |a_s - a_t| <= epsilon
    double tail_diameter = 0.0;   // sup over the tail of |a_s - a_t|
    std::size_t tail_size = 0;
};

/// Cauchy-criterion certificate on the available grid: the smallest diagonal
/// level N whose tail {t >= (N,...,N)} has at least `min_tail` points and
/// diameter <= epsilon. Tails nest, so the answer is monotone in epsilon.
inline ConvergenceCertificate convergence_certificate(const ParamFamily& fam, double epsilon,
                                                      std::size_t min_tail = 2) {
    if (!(epsilon >= 0.0)) throw DomainError("convergence_certificate: epsilon must be >= 0");
    std::vector<Rational> levels;
    for (const auto& p : fam.index_set())
        for (const auto& c : p) levels.push_back(c);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    const std::size_t k = fam.dim();
    std::vector<Scalar> tail;
    for (const auto& level : levels) {
        const IndexPoint corner(k, level);
        tail.clear();
        for (std::size_t i = 0; i < fam.size(); ++i)
            if (below_or_equal(corner, fam.index(i))) tail.push_back(fam.value(i));
        if (tail.size() < std::max<std::size_t>(min_tail, 1)) break;
        double diameter = 0.0;
        const bool real = std::all_of(tail.begin(), tail.end(), [](Scalar z) { return z.imag() == 0.0; });
        if (real) {
            auto [lo, hi] = std::minmax_element(tail.begin(), tail.end(),
                                                [](Scalar a, Scalar b) { return a.real() < b.real(); });
            diameter = hi->real() - lo->real();
        } else {
            for (std::size_t a = 0; a < tail.size(); ++a)
                for (std::size_t b = a + 1; b < tail.size(); ++b)
                    diameter = std::max(diameter, std::abs(tail[a] - tail[b]));
        }
        if (diameter <= epsilon) return {true, level, diameter, tail.size()};
    }
    return {};
}

}  // namespace osclab
