#pragma once

#include <boost/rational.hpp>

#include <cctype>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "osclab/errors.hpp"

namespace osclab {

/// Exact index coordinate. Strict-increase and box-membership tests are done
/// on these, never on doubles.
using Rational = boost::rational<std::int64_t>;

/// A point of an index set in Q^k.
using IndexPoint = std::vector<Rational>;

inline double to_double(const Rational& q) {
    return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

inline std::string to_string(const Rational& q) {
    if (q.denominator() == 1) return std::to_string(q.numerator());
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

namespace detail {

inline std::int64_t checked_mul10(std::int64_t v, int digit) {
    constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
    if (v > (kMax - digit) / 10) throw FormatError("rational literal overflows 64-bit");
    return v * 10 + digit;
}

inline std::int64_t pow10(int e) {
    std::int64_t p = 1;
    for (int i = 0; i < e; ++i) p = checked_mul10(p, 0);
    return p;
}

}  // namespace detail

/// Parses "7", "-3/4", "0.125", "2.5e-2" exactly.
inline Rational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw FormatError("empty rational literal");

    if (auto slash = s.find('/'); slash != std::string::npos) {
        try {
            std::size_t used_n = 0, used_d = 0;
            const std::string ns = s.substr(0, slash), ds = s.substr(slash + 1);
            const long long n = std::stoll(ns, &used_n);
            const long long d = std::stoll(ds, &used_d);
            if (used_n != ns.size() || used_d != ds.size()) throw FormatError("bad rational '" + text + "'");
            if (d == 0) throw FormatError("zero denominator in '" + text + "'");
            return Rational(n, d);
        } catch (const std::logic_error&) {
            throw FormatError("bad rational '" + text + "'");
        }
    }

    std::size_t pos = 0;
    bool negative = false;
    if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
    std::int64_t mantissa = 0;
    int frac_digits = 0;
    bool seen_digit = false, seen_point = false;
    for (; pos < s.size(); ++pos) {
        const char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            mantissa = detail::checked_mul10(mantissa, c - '0');
            if (seen_point) ++frac_digits;
            seen_digit = true;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit) throw FormatError("bad rational '" + text + "'");
    int exponent = 0;
    if (pos < s.size()) {
        if (s[pos] != 'e' && s[pos] != 'E') throw FormatError("bad rational '" + text + "'");
        try {
            std::size_t used = 0;
            exponent = std::stoi(s.substr(pos + 1), &used);
            if (pos + 1 + used != s.size()) throw FormatError("bad rational '" + text + "'");
        } catch (const std::logic_error&) {
            throw FormatError("bad rational '" + text + "'");
        }
    }
    exponent -= frac_digits;
    Rational q = exponent >= 0 ? Rational(mantissa * detail::pow10(exponent))
                               : Rational(mantissa, detail::pow10(-exponent));
    return negative ? -q : q;
}

/// Coordinatewise strict order: every coordinate of a is below b.
inline bool strictly_below(const IndexPoint& a, const IndexPoint& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i] < b[i])) return false;
    return true;
}

/// Coordinatewise partial order a <= b.
inline bool below_or_equal(const IndexPoint& a, const IndexPoint& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (b[i] < a[i]) return false;
    return true;
}

/// Membership in the half-open box [lo, hi) = [lo_1,hi_1) x ... x [lo_k,hi_k).
inline bool in_box(const IndexPoint& t, const IndexPoint& lo, const IndexPoint& hi) {
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] < lo[i] || !(t[i] < hi[i])) return false;
    return true;
}

inline IndexPoint point(std::initializer_list<std::int64_t> coords) {
    IndexPoint p;
    for (auto c : coords) p.emplace_back(c);
    return p;
}

}  // namespace osclab
