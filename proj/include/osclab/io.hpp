#pragma once

// Text formats: series (CSV / JSON), seminorm values, lattice functions and
// average specifications.

#include <cctype>
#include <complex>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "osclab/errors.hpp"
#include "osclab/lattice.hpp"
#include "osclab/operators.hpp"
#include "osclab/polynomial.hpp"
#include "osclab/rational.hpp"
#include "osclab/seminorms.hpp"

namespace osclab::io {

using nlohmann::json;

namespace detail {

inline std::string trim(std::string s) {
    auto sp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && sp(s.back())) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && sp(s[i])) ++i;
    return s.substr(i);
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw FormatError("");
        return v;
    } catch (const std::exception&) {
        throw FormatError("malformed number '" + s + "' in " + what);
    }
}

inline Rational json_rational(const json& j) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_float()) {
        // Shortest round-trip decimal text keeps the exact intended value.
        return parse_rational(j.dump());
    }
    throw FormatError("index coordinate must be an integer, decimal or rational string");
}

inline Scalar json_scalar(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw FormatError("value must be a number or a [re, im] pair");
}

inline json scalar_json(Scalar v) {
    if (v.imag() == 0.0) return v.real();
    return json::array({v.real(), v.imag()});
}

inline std::string slurp(std::istream& in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace detail

// ---------------------------------------------------------------- series

/// CSV with header t_1,...,t_k,value and an optional trailing imag column.
inline ParamFamily read_series_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("series CSV: missing header");
    const auto header = detail::split_csv(line);
    bool has_imag = !header.empty() && header.back() == "imag";
    const std::size_t value_col = header.size() - (has_imag ? 2 : 1);
    if (header.size() < 2 + (has_imag ? 1 : 0) || header[value_col] != "value")
        throw FormatError("series CSV: header must be t_1,...,t_k,value");
    for (std::size_t i = 0; i < value_col; ++i)
        if (header[i] != "t_" + std::to_string(i + 1)) throw FormatError("series CSV: expected column t_" + std::to_string(i + 1));

    std::vector<IndexPoint> idx;
    std::vector<Scalar> vals;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_csv(line);
        if (cells.size() != header.size())
            throw FormatError("series CSV: row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " cells");
        IndexPoint t;
        for (std::size_t i = 0; i < value_col; ++i) t.push_back(parse_rational(cells[i]));
        const double re = detail::parse_double(cells[value_col], "series CSV");
        const double im = has_imag ? detail::parse_double(cells[value_col + 1], "series CSV") : 0.0;
        idx.push_back(std::move(t));
        vals.emplace_back(re, im);
    }
    return ParamFamily(std::move(idx), std::move(vals));
}

inline void write_series_csv(std::ostream& out, const ParamFamily& fam) {
    bool complex_values = false;
    for (auto v : fam.values()) complex_values |= v.imag() != 0.0;
    for (std::size_t i = 0; i < fam.dim(); ++i) out << "t_" << i + 1 << ',';
    out << "value" << (complex_values ? ",imag" : "") << '\n';
    for (std::size_t n = 0; n < fam.size(); ++n) {
        for (const auto& c : fam.index(n)) out << to_string(c) << ',';
        out << json(fam.value(n).real()).dump();
        if (complex_values) out << ',' << json(fam.value(n).imag()).dump();
        out << '\n';
    }
}

/// JSON array of {"t": [...], "value": x | [re, im]}.
inline ParamFamily series_from_json(const json& j) {
    if (!j.is_array()) throw FormatError("series JSON: expected an array");
    std::vector<IndexPoint> idx;
    std::vector<Scalar> vals;
    for (const auto& e : j) {
        if (!e.is_object() || !e.contains("t") || !e.contains("value"))
            throw FormatError("series JSON: entries need 't' and 'value'");
        IndexPoint t;
        if (e["t"].is_array())
            for (const auto& c : e["t"]) t.push_back(detail::json_rational(c));
        else
            t.push_back(detail::json_rational(e["t"]));
        idx.push_back(std::move(t));
        vals.push_back(detail::json_scalar(e["value"]));
    }
    return ParamFamily(std::move(idx), std::move(vals));
}

inline json series_to_json(const ParamFamily& fam) {
    json out = json::array();
    for (std::size_t n = 0; n < fam.size(); ++n) {
        json t = json::array();
        for (const auto& c : fam.index(n)) {
            if (c.denominator() == 1) t.push_back(static_cast<std::int64_t>(c.numerator()));
            else t.push_back(to_string(c));
        }
        out.push_back({{"t", t}, {"value", detail::scalar_json(fam.value(n))}});
    }
    return out;
}

/// Detects JSON by a leading '[' and falls back to CSV otherwise.
inline ParamFamily read_series(std::istream& in) {
    const std::string text = detail::slurp(in);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
        try {
            return series_from_json(json::parse(text));
        } catch (const json::exception& e) {
            throw FormatError(std::string("series JSON: ") + e.what());
        }
    }
    std::istringstream ss(text);
    return read_series_csv(ss);
}

inline ParamFamily read_series_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    return read_series(in);
}

// ---------------------------------------------------------------- seminorm values

inline json to_json(const SeminormValue& v) {
    return json{{"kind", to_string(v.kind)}, {"parameter", v.parameter}, {"value", v.value},
                {"witness", v.witness}, {"exact", v.exact}};
}

inline SeminormValue seminorm_from_json(const json& j) {
    static const std::map<std::string, SeminormKind> kinds = {
        {"variation", SeminormKind::variation},   {"oscillation", SeminormKind::oscillation},
        {"jump_count", SeminormKind::jump_count}, {"overlap_jump_count", SeminormKind::overlap_jump_count},
        {"sup_norm", SeminormKind::sup_norm}};
    try {
        SeminormValue v;
        const auto it = kinds.find(j.at("kind").get<std::string>());
        if (it == kinds.end()) throw FormatError("unknown seminorm kind");
        v.kind = it->second;
        v.parameter = j.at("parameter").get<double>();
        v.value = j.at("value").get<double>();
        v.witness = j.at("witness").get<std::vector<std::size_t>>();
        v.exact = j.value("exact", true);
        return v;
    } catch (const json::exception& e) {
        throw FormatError(std::string("seminorm JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------- lattice functions

/// {"space": {"kind", "dim", "N"?}, "points": [[c_1..c_d, re, im]]}. Omitted points are zero.
inline LatticeFunction lattice_function_from_json(const json& j) {
    try {
        const auto& sp = j.at("space");
        const std::string kind = sp.at("kind").get<std::string>();
        const auto dim = sp.at("dim").get<std::size_t>();
        if (dim == 0) throw FormatError("lattice function: dim must be positive");
        const auto& pts = j.at("points");
        if (!pts.is_array()) throw FormatError("lattice function: points must be an array");

        std::vector<std::pair<Coord, Scalar>> cells;
        for (const auto& p : pts) {
            if (!p.is_array() || (p.size() != dim + 1 && p.size() != dim + 2))
                throw FormatError("lattice function: each point is [c_1..c_d, re, im]");
            Coord c(dim);
            for (std::size_t i = 0; i < dim; ++i) c[i] = p[i].get<std::int64_t>();
            const double re = p[dim].get<double>();
            const double im = p.size() == dim + 2 ? p[dim + 1].get<double>() : 0.0;
            cells.emplace_back(std::move(c), Scalar(re, im));
        }

        LatticeFunction f;
        if (kind == "cyclic") {
            f = LatticeFunction::cyclic(dim, sp.at("N").get<std::int64_t>());
        } else if (kind == "lattice") {
            Coord lo(dim, 0), hi(dim, 0);
            for (std::size_t n = 0; n < cells.size(); ++n)
                for (std::size_t i = 0; i < dim; ++i) {
                    lo[i] = n == 0 ? cells[n].first[i] : std::min(lo[i], cells[n].first[i]);
                    hi[i] = n == 0 ? cells[n].first[i] : std::max(hi[i], cells[n].first[i]);
                }
            Coord extent(dim);
            for (std::size_t i = 0; i < dim; ++i) extent[i] = hi[i] - lo[i] + 1;
            f = LatticeFunction::lattice(lo, extent);
        } else {
            throw FormatError("lattice function: space kind must be 'lattice' or 'cyclic'");
        }
        for (const auto& [c, v] : cells) f.ref(c) += v;
        return f;
    } catch (const json::exception& e) {
        throw FormatError(std::string("lattice function JSON: ") + e.what());
    } catch (const DomainError& e) {
        throw FormatError(std::string("lattice function JSON: ") + e.what());
    }
}

inline json to_json(const LatticeFunction& f) {
    json space{{"kind", f.space().kind == SpaceKind::cyclic ? "cyclic" : "lattice"}, {"dim", f.dim()}};
    if (f.space().kind == SpaceKind::cyclic) space["N"] = f.space().modulus;
    json pts = json::array();
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Scalar v = f.values()[i];
        if (v == Scalar(0.0)) continue;
        json p = json::array();
        for (auto c : f.coords(i)) p.push_back(c);
        p.push_back(v.real());
        p.push_back(v.imag());
        pts.push_back(std::move(p));
    }
    return json{{"space", space}, {"points", pts}};
}

// ---------------------------------------------------------------- fields

/// A sample vector on a finite space: an array of numbers or [re, im] pairs.
inline Field field_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw FormatError("field: expected a non-empty array of values");
    Field f;
    f.reserve(j.size());
    for (const auto& v : j) f.push_back(detail::json_scalar(v));
    return f;
}

inline json field_to_json(const Field& f) {
    json out = json::array();
    for (auto v : f) out.push_back(detail::scalar_json(v));
    return out;
}

inline json field_to_json(const std::vector<double>& f) { return json(f); }

// ---------------------------------------------------------------- average specs

inline IntPolynomial polynomial_from_json(const json& terms, std::size_t num_vars) {
    std::map<IntPolynomial::Exponents, std::int64_t> m;
    for (const auto& t : terms) {
        if (!t.is_array() || t.size() != 2) throw FormatError("polynomial term must be [[e_1..e_k], coeff]");
        auto e = t[0].get<IntPolynomial::Exponents>();
        if (e.size() != num_vars) throw FormatError("polynomial term arity differs from the variable count");
        m[e] += t[1].get<std::int64_t>();
    }
    return IntPolynomial(num_vars, std::move(m), true);
}

inline json polynomial_to_json(const IntPolynomial& p) {
    json out = json::array();
    for (const auto& [e, c] : p.terms()) out.push_back(json::array({e, c}));
    return out;
}

/// {"polynomials": [[[[e..], c], ...], ...], "shifts": [[..]]?, "M": [..]?}.
/// Shifts default to unit vectors; M defaults to all ones.
inline AverageSpec average_spec_from_json(const json& j) {
    try {
        const auto& polys = j.at("polynomials");
        if (!polys.is_array() || polys.empty()) throw FormatError("average spec: polynomials must be a non-empty array");
        std::size_t k = j.value("variables", std::size_t{0});
        if (k == 0) {
            const auto& first = polys[0];
            if (first.empty()) throw FormatError("average spec: cannot infer the variable count from a zero polynomial");
            k = first[0][0].size();
        }
        std::vector<IntPolynomial> ps;
        for (const auto& p : polys) ps.push_back(polynomial_from_json(p, k));
        AverageSpec spec = AverageSpec::standard(std::move(ps), std::vector<std::int64_t>(k, 1));
        if (j.contains("shifts")) spec.shifts = j["shifts"].get<std::vector<Coord>>();
        if (j.contains("M")) spec.M = j["M"].get<std::vector<std::int64_t>>();
        return spec;
    } catch (const json::exception& e) {
        throw FormatError(std::string("average spec JSON: ") + e.what());
    } catch (const DomainError& e) {
        throw FormatError(std::string("average spec JSON: ") + e.what());
    }
}

inline json to_json(const AverageSpec& s) {
    json polys = json::array();
    for (const auto& p : s.polys) polys.push_back(polynomial_to_json(p));
    return json{{"variables", s.num_vars()}, {"polynomials", polys}, {"shifts", s.shifts}, {"M", s.M}};
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

}  // namespace osclab::io
