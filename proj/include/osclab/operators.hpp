#pragma once

// Fields on finite model spaces and indexed families of linear operators.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "osclab/errors.hpp"
#include "osclab/summation.hpp"

namespace osclab {

using Field = std::vector<std::complex<double>>;

/// L^p norm with respect to the uniform probability measure; p = inf is the sup norm.
inline double field_norm(const Field& f, double p = 2.0) {
    if (f.empty()) return 0.0;
    if (std::isinf(p)) {
        double m = 0.0;
        for (auto v : f) m = std::max(m, std::abs(v));
        return m;
    }
    CompensatedSum s;
    for (auto v : f) s.add(std::pow(std::abs(v), p));
    return std::pow(s.value() / static_cast<double>(f.size()), 1.0 / p);
}

/// Same for a real field.
inline double field_norm(const std::vector<double>& f, double p = 2.0) {
    if (f.empty()) return 0.0;
    if (std::isinf(p)) {
        double m = 0.0;
        for (auto v : f) m = std::max(m, std::abs(v));
        return m;
    }
    CompensatedSum s;
    for (auto v : f) s.add(std::pow(std::abs(v), p));
    return std::pow(s.value() / static_cast<double>(f.size()), 1.0 / p);
}

inline double max_abs_diff(const Field& a, const Field& b) {
    if (a.size() != b.size()) throw DomainError("field size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline Field operator-(const Field& a, const Field& b) {
    if (a.size() != b.size()) throw DomainError("field size mismatch");
    Field out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

inline Field operator+(const Field& a, const Field& b) {
    if (a.size() != b.size()) throw DomainError("field size mismatch");
    Field out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

inline Field abs_field(const Field& f) {
    Field out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::abs(f[i]);
    return out;
}

/// Family (T_t : t in I) of linear operators on C^n, I a finite set of integers.
class OperatorFamily {
public:
    virtual ~OperatorFamily() = default;

    virtual std::string name() const = 0;
    virtual std::size_t space_size() const = 0;
    /// Strictly increasing.
    virtual const std::vector<std::int64_t>& indices() const = 0;
    virtual Field apply(std::int64_t t, const Field& f) const = 0;

    /// T_t f for every t in indices(), in order.
    virtual std::vector<Field> apply_all(const Field& f) const {
        std::vector<Field> out;
        out.reserve(indices().size());
        for (auto t : indices()) out.push_back(apply(t, f));
        return out;
    }

    /// P_s P_t = P_{min(s,t)} holds by construction.
    virtual bool is_projection_family() const { return false; }
    /// Increments (P_{t'} - P_t) f over disjoint index intervals are orthogonal.
    virtual bool orthogonal_increments() const { return false; }
    /// Positive kernel: |T_t f| <= T_t |f| pointwise.
    virtual bool positive() const { return false; }

    bool has_index(std::int64_t t) const {
        const auto& I = indices();
        return std::binary_search(I.begin(), I.end(), t);
    }

protected:
    void check_input(std::int64_t t, const Field& f) const {
        if (f.size() != space_size()) throw DomainError(name() + ": field size does not match the model space");
        if (!has_index(t)) throw DomainError(name() + ": index " + std::to_string(t) + " is not in the family");
    }
};

}  // namespace osclab
