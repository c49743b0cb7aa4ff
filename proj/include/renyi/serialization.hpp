#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"

#include "renyi/errors.hpp"
#include "renyi/piecewise_poly.hpp"
#include "renyi/rational.hpp"

namespace renyi {

using Json = nlohmann::ordered_json;

inline Json to_json(const Polynomial& p)
{
    Json arr = Json::array();
    for (const auto& c : p.coefficients()) arr.push_back(to_string(c));
    return arr;
}

/// {"breakpoints": ["-1/1", "1/1"], "pieces": [["1/1", "0/1", "-1/1"]]}
inline Json to_json(const PiecewisePoly& f)
{
    Json out;
    Json breaks = Json::array();
    for (const auto& b : f.breakpoints()) breaks.push_back(to_string(b));
    Json pieces = Json::array();
    for (const auto& p : f.pieces()) pieces.push_back(to_json(p));
    out["breakpoints"] = std::move(breaks);
    out["pieces"] = std::move(pieces);
    return out;
}

inline PiecewisePoly piecewise_from_json(const Json& j)
{
    try {
        std::vector<Rational> breaks;
        for (const auto& b : j.at("breakpoints")) breaks.push_back(parse_rational(b.get<std::string>()));
        std::vector<Polynomial> pieces;
        for (const auto& piece : j.at("pieces")) {
            std::vector<Rational> coeffs;
            for (const auto& c : piece) coeffs.push_back(parse_rational(c.get<std::string>()));
            pieces.emplace_back(std::move(coeffs));
        }
        return PiecewisePoly(std::move(breaks), std::move(pieces));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid piecewise polynomial JSON: ") + e.what());
    }
}

/// JSON number that round-trips the double exactly. Non-finite values become
/// strings ("inf", "nan") since JSON has no literal for them.
inline Json real_json(double v)
{
    if (!std::isfinite(v)) return Json(std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf"));
    return Json(v);
}

}  // namespace renyi
