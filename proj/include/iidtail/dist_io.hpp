#pragma once

// Distribution spec files:
//   {"dim": d, "atoms": [{"x": ["p/q", ...], "p": "r/s"}, ...]}
// Rationals are "numerator/denominator" strings; plain integers are accepted
// either as strings or JSON integers.

#include "iidtail/dist.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace iidtail {

namespace detail {

inline Rational rational_from_json(const nlohmann::json& v, const std::string& where)
{
    try {
        if (v.is_string()) return parse_rational(v.get<std::string>());
        if (v.is_number_integer()) return from_int(v.get<std::int64_t>());
    } catch (const ParseError& e) {
        throw ParseError(where + ": " + e.what());
    }
    throw ParseError(where + ": expected a rational string such as \"1/3\"");
}

} // namespace detail

inline DiscreteDist parse_dist_json(const std::string& text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("JSON syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) throw ParseError("/: expected an object");
    if (!doc.contains("dim") || !doc["dim"].is_number_integer() || doc["dim"].get<std::int64_t>() < 1)
        throw ParseError("/dim: expected a positive integer");
    const auto dim = static_cast<std::size_t>(doc["dim"].get<std::int64_t>());
    if (!doc.contains("atoms") || !doc["atoms"].is_array() || doc["atoms"].empty())
        throw ParseError("/atoms: expected a nonempty array");

    std::vector<Atom> atoms;
    const auto& arr = doc["atoms"];
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string where = "/atoms/" + std::to_string(i);
        const auto& a = arr[i];
        if (!a.is_object() || !a.contains("x") || !a.contains("p"))
            throw ParseError(where + ": expected {\"x\": [...], \"p\": ...}");
        if (!a["x"].is_array() || a["x"].size() != dim)
            throw ParseError(where + "/x: expected an array of " + std::to_string(dim) + " rationals");
        std::vector<Rational> coords;
        for (std::size_t c = 0; c < dim; ++c)
            coords.push_back(detail::rational_from_json(a["x"][c], where + "/x/" + std::to_string(c)));
        const Rational p = detail::rational_from_json(a["p"], where + "/p");
        if (p <= 0) throw ParseError(where + "/p: probability must be positive, got " + to_string(p));
        atoms.push_back(Atom{Point(std::move(coords)), p});
    }
    try {
        return DiscreteDist::from_atoms(dim, std::move(atoms));
    } catch (const DistError& e) {
        throw ParseError(std::string("/atoms: ") + e.what());
    }
}

inline DiscreteDist load_dist_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_dist_json(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline nlohmann::json dist_to_json(const DiscreteDist& d)
{
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : d.atoms()) {
        nlohmann::json x = nlohmann::json::array();
        for (const auto& c : a.x.coords()) x.push_back(to_string(c));
        atoms.push_back({{"x", x}, {"p", to_string(a.p)}});
    }
    return {{"dim", d.dim()}, {"atoms", atoms}};
}

} // namespace iidtail
