#pragma once

// Curve configs (JSON) and fixed-format CSV output.

#include <concepts>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "deltacurve/common.hpp"
#include "deltacurve/curve.hpp"

namespace deltacurve {

namespace detail {

inline Vec3 vec3_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(std::string(what) + " entries must be 3-vectors");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace detail

/**
 * {"kind": "circle", "radius": r}
 * {"kind": "fourier", "a0": [x,y,z], "cos": [[..],..], "sin": [[..],..], "period": T}
 * Optional: "id" (string), "target_length" (rescale a Fourier curve about a0).
 */
inline Curve curve_from_json(const nlohmann::json& j, double reparam_tol = 1e-10) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    Curve c;
    if (kind == "circle") {
      c = make_circle(j.at("radius").get<double>());
    } else if (kind == "fourier") {
      const Vec3 a0 = j.contains("a0") ? detail::vec3_from_json(j["a0"], "a0") : Vec3::Zero();
      std::vector<Vec3> cs, ss;
      for (const auto& v : j.at("cos")) cs.push_back(detail::vec3_from_json(v, "cos"));
      for (const auto& v : j.at("sin")) ss.push_back(detail::vec3_from_json(v, "sin"));
      const double period = j.at("period").get<double>();
      c = reparametrize_arclength(Curve::fourier(a0, cs, ss, period), reparam_tol);
      if (j.contains("target_length")) {
        const double target = j["target_length"].get<double>();
        if (!(target > 0.0)) throw ConfigError("target_length must be positive");
        const double k = target / c.length();
        for (auto& v : cs) v *= k;
        for (auto& v : ss) v *= k;
        c = reparametrize_arclength(Curve::fourier(a0, cs, ss, period), reparam_tol);
      }
    } else {
      throw ConfigError("unknown curve kind '" + kind + "'");
    }
    c.id = j.value("id", kind);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad curve config: ") + e.what());
  }
}

inline Curve curve_from_file(const std::string& path, double reparam_tol = 1e-10) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open curve file '" + path + "'");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
  return curve_from_json(j, reparam_tol);
}

/// Number with 15 significant digits.
inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

template <std::integral T>
std::string fmt(T x) {
  return std::to_string(x);
}
inline std::string fmt(const std::string& s) { return s; }
inline std::string fmt(const char* s) { return s; }

class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::initializer_list<const char*> header) : os_(path), path_(path) {
    if (!os_) throw ConfigError("cannot write '" + path + "'");
    bool first = true;
    for (const char* h : header) {
      os_ << (first ? "" : ",") << h;
      first = false;
    }
    os_ << "\n";
  }

  template <class... Ts>
  void row(const Ts&... xs) {
    bool first = true;
    ((os_ << (first ? "" : ",") << fmt(xs), first = false), ...);
    os_ << "\n";
  }

 private:
  std::ofstream os_;
  std::string path_;
};

}  // namespace deltacurve
