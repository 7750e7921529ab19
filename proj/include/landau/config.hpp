#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "landau/capacity.hpp"
#include "landau/operators.hpp"
#include "landau/symbol.hpp"

namespace landau {

using json = nlohmann::json;

/// Malformed or inconsistent experiment configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace cfg {

inline const json& require(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing required key '" + key + "'");
  return j.at(key);
}

inline double number(const json& j, const std::string& key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
  return v.get<double>();
}

inline double number_or(const json& j, const std::string& key, double def, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return def;
  return number(j, key, where);
}

inline int integer_or(const json& j, const std::string& key, int def, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + ": '" + key + "' must be an integer");
  return v.get<int>();
}

inline int integer(const json& j, const std::string& key, const std::string& where) {
  require(j, key, where);
  return integer_or(j, key, 0, where);
}

inline std::vector<double> numbers(const json& j, const std::string& key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_array()) throw ConfigError(where + ": '" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(where + ": '" + key + "' must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

inline std::vector<int> integers(const json& j, const std::string& key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_array()) throw ConfigError(where + ": '" + key + "' must be an array of integers");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) throw ConfigError(where + ": '" + key + "' must be an array of integers");
    out.push_back(e.get<int>());
  }
  return out;
}

inline std::string string_or(const json& j, const std::string& key, const std::string& def, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return def;
  if (!j.at(key).is_string()) throw ConfigError(where + ": '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

inline double positive(double v, const std::string& what) {
  if (!(v > 0)) throw ConfigError(what + " must be positive");
  return v;
}

inline point2 point(const json& j, const std::string& key, const std::string& where) {
  const auto v = numbers(j, key, where);
  if (v.size() != 2) throw ConfigError(where + ": '" + key + "' must be a pair [x, y]");
  return {v[0], v[1]};
}

}  // namespace cfg

/// Profile DSL: {"kind": ..., parameters}. Kinds and parameter names follow
/// the RadialProfile factories.
inline RadialProfile parse_profile(const json& j, const std::string& where = "profile") {
  if (!j.is_object()) throw ConfigError(where + ": must be an object with a 'kind'");
  const std::string kind = cfg::string_or(j, "kind", "", where);
  const double amp = cfg::number_or(j, "amplitude", 1.0, where);
  try {
    if (kind == "gaussian") return RadialProfile::make_gaussian(cfg::number(j, "a", where), amp);
    if (kind == "power") return RadialProfile::make_power(cfg::number(j, "gamma", where), amp);
    if (kind == "disk_indicator" || kind == "disk") {
      if (j.contains("radius")) {
        const double R = cfg::positive(cfg::number(j, "radius", where), where + ".radius");
        return RadialProfile::make_disk(R * R, amp);
      }
      return RadialProfile::make_disk(cfg::number(j, "c", where), amp);
    }
    if (kind == "exp_beta")
      return RadialProfile::make_exp_beta(cfg::number(j, "gamma", where), cfg::number(j, "beta", where), amp);
    if (kind == "laguerre_mix") return RadialProfile::make_laguerre_mix(cfg::numbers(j, "coeffs", where), amp);
    if (kind == "level_kernel") {
      const int q = cfg::integer(j, "q", where);
      if (q < 0) throw ConfigError(where + ": q must be nonnegative");
      return level_kernel_symbol(q, cfg::number_or(j, "scale", 1.0, where)).profile;
    }
    if (kind == "tabulated")
      return RadialProfile::make_tabulated(cfg::numbers(j, "grid", where), cfg::numbers(j, "values", where));
    if (kind == "constant") return RadialProfile::make_constant(cfg::number(j, "value", where));
    if (kind == "poly_gaussian")
      return RadialProfile::make_poly_gaussian(cfg::numbers(j, "poly", where), cfg::number(j, "a", where), amp);
    if (kind == "sum") {
      const auto w = cfg::numbers(j, "weights", where);
      const json& parts = cfg::require(j, "parts", where);
      if (!parts.is_array()) throw ConfigError(where + ": 'parts' must be an array of profiles");
      std::vector<RadialProfile> ps;
      for (std::size_t i = 0; i < parts.size(); ++i)
        ps.push_back(parse_profile(parts[i], where + ".parts[" + std::to_string(i) + "]"));
      return RadialProfile::make_sum(w, ps);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": unknown profile kind '" + kind + "'");
}

inline Sign parse_sign(const json& j, const std::string& where, Sign def = Sign::plus) {
  const std::string s = cfg::string_or(j, "sign", def == Sign::plus ? "plus" : "minus", where);
  if (s == "plus" || s == "+") return Sign::plus;
  if (s == "minus" || s == "-") return Sign::minus;
  throw ConfigError(where + ": sign must be 'plus' or 'minus'");
}

/// Four-dimensional symbol: {"zero": true} or {"terms": [{"coeff", "first",
/// "second"}]} with radial profiles for both factors.
inline Symbol4D parse_symbol4d(const json& j, double b, const std::string& where = "symbol") {
  if (!j.is_object()) throw ConfigError(where + ": must be an object");
  if (j.contains("zero")) return Symbol4D::zero(b);
  const json& terms = cfg::require(j, "terms", where);
  if (!terms.is_array()) throw ConfigError(where + ": 'terms' must be an array");
  std::vector<SeparableTerm> ts;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string w = where + ".terms[" + std::to_string(i) + "]";
    ts.push_back({cfg::number_or(terms[i], "coeff", 1.0, w),
                  Symbol2D::radial(parse_profile(cfg::require(terms[i], "first", w), w + ".first")),
                  Symbol2D::radial(parse_profile(cfg::require(terms[i], "second", w), w + ".second"))});
  }
  return Symbol4D::make_separable(b, ts);
}

inline CompactSet parse_set(const json& j, const std::string& where = "set") {
  if (!j.is_object()) throw ConfigError(where + ": must be an object with a 'kind'");
  const std::string kind = cfg::string_or(j, "kind", "", where);
  try {
    if (kind == "disk")
      return CompactSet::disk(j.contains("center") ? cfg::point(j, "center", where) : point2{},
                              cfg::number(j, "radius", where));
    if (kind == "segment") return CompactSet::segment(cfg::point(j, "a", where), cfg::point(j, "b", where));
    if (kind == "polygon") {
      const json& v = cfg::require(j, "vertices", where);
      if (!v.is_array()) throw ConfigError(where + ": 'vertices' must be an array of pairs");
      std::vector<point2> pts;
      for (const auto& p : v) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
          throw ConfigError(where + ": each vertex must be a pair [x, y]");
        pts.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
      return CompactSet::polygon(pts);
    }
    if (kind == "union") {
      const json& parts = cfg::require(j, "parts", where);
      if (!parts.is_array()) throw ConfigError(where + ": 'parts' must be an array of sets");
      std::vector<CompactSet> ps;
      for (std::size_t i = 0; i < parts.size(); ++i) ps.push_back(parse_set(parts[i], where + ".parts[" + std::to_string(i) + "]"));
      return CompactSet::union_of(ps);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": unknown set kind '" + kind + "'");
}

/// %.17g formatting; non-finite values print as nan / inf / -inf.
inline std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// JSON cannot carry NaN or infinities; they are written as null.
inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace landau
