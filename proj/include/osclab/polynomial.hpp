#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "osclab/errors.hpp"

namespace osclab {

using BigInt = boost::multiprecision::cpp_int;

/// Polynomial in Z[m_1, ..., m_k]. Evaluation at integer points is exact.
class IntPolynomial {
public:
    using Exponents = std::vector<unsigned>;

    IntPolynomial(std::size_t num_vars, std::map<Exponents, std::int64_t> terms, bool zero_at_origin = false)
        : num_vars_(num_vars), zero_at_origin_(zero_at_origin) {
        if (num_vars == 0) throw DomainError("IntPolynomial: need at least one variable");
        for (auto& [e, c] : terms) {
            if (e.size() != num_vars) throw DomainError("IntPolynomial: exponent arity mismatch");
            if (c == 0) continue;
            terms_[e] += c;
        }
        std::erase_if(terms_, [](const auto& kv) { return kv.second == 0; });
        if (zero_at_origin_ && terms_.count(Exponents(num_vars_, 0)))
            throw DomainError("IntPolynomial: nonzero constant term but P(0) = 0 required");
    }

    /// coeff * m_var^power in k variables.
    static IntPolynomial monomial(std::size_t num_vars, std::size_t var, unsigned power, std::int64_t coeff = 1) {
        Exponents e(num_vars, 0);
        e.at(var) = power;
        return IntPolynomial(num_vars, {{e, coeff}}, power > 0);
    }

    std::size_t num_vars() const { return num_vars_; }
    bool zero_at_origin() const { return zero_at_origin_; }
    const std::map<Exponents, std::int64_t>& terms() const { return terms_; }

    unsigned degree() const {
        unsigned d = 0;
        for (const auto& [e, c] : terms_) {
            unsigned s = 0;
            for (auto x : e) s += x;
            d = std::max(d, s);
        }
        return d;
    }

    /// True when only variable `var` appears.
    bool depends_only_on(std::size_t var) const {
        for (const auto& [e, c] : terms_)
            for (std::size_t i = 0; i < e.size(); ++i)
                if (i != var && e[i] != 0) return false;
        return true;
    }

    BigInt evaluate(std::span<const std::int64_t> m) const {
        check_arity(m);
        BigInt total = 0;
        for (const auto& [e, c] : terms_) {
            BigInt term = c;
            for (std::size_t i = 0; i < e.size(); ++i)
                if (e[i]) term *= boost::multiprecision::pow(BigInt(m[i]), e[i]);
            total += term;
        }
        return total;
    }

    /// Exact value; throws if it does not fit in 64 bits.
    std::int64_t evaluate_i64(std::span<const std::int64_t> m) const {
        const BigInt v = evaluate(m);
        if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
            throw DomainError("IntPolynomial: value exceeds the 64-bit range");
        return static_cast<std::int64_t>(v);
    }

    /// P(m) mod n in [0, n).
    std::int64_t evaluate_mod(std::span<const std::int64_t> m, std::int64_t n) const {
        check_arity(m);
        if (n <= 0) throw DomainError("IntPolynomial: modulus must be positive");
        using u128 = unsigned __int128;
        auto reduce = [n](std::int64_t v) {
            std::int64_t r = v % n;
            return static_cast<std::uint64_t>(r < 0 ? r + n : r);
        };
        const auto un = static_cast<std::uint64_t>(n);
        std::uint64_t total = 0;
        for (const auto& [e, c] : terms_) {
            std::uint64_t term = reduce(c);
            for (std::size_t i = 0; i < e.size(); ++i) {
                const std::uint64_t base = reduce(m[i]);
                for (unsigned p = 0; p < e[i]; ++p) term = static_cast<std::uint64_t>(u128(term) * base % un);
            }
            total = static_cast<std::uint64_t>((u128(total) + term) % un);
        }
        return static_cast<std::int64_t>(total);
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (const auto& [e, c] : terms_) {
            if (!s.empty()) s += c < 0 ? " - " : " + ";
            else if (c < 0) s += "-";
            const auto a = c < 0 ? -c : c;
            bool any = false;
            for (auto x : e) any |= x != 0;
            if (a != 1 || !any) s += std::to_string(a);
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (!e[i]) continue;
                s += "m" + std::to_string(i + 1);
                if (e[i] > 1) s += "^" + std::to_string(e[i]);
            }
        }
        return s;
    }

private:
    void check_arity(std::span<const std::int64_t> m) const {
        if (m.size() != num_vars_) throw DomainError("IntPolynomial: wrong number of arguments");
    }

    std::size_t num_vars_;
    bool zero_at_origin_;
    std::map<Exponents, std::int64_t> terms_;
};

}  // namespace osclab
