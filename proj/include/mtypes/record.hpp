#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtypes/rational.hpp"

namespace mtypes {

/// One measured cell of an experiment. Wall time is diagnostic only and is
/// never serialized, so reruns are byte-identical.
struct ExperimentRecord {
  std::string law;
  std::int64_t n = -1;
  int j = -1;
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  double tau = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> value;
  std::optional<Rational> value_exact;
  std::optional<double> reference;
  bool empty_feasible = false;  // distinguished outcome: Pi_n was empty
  double wall_ms = 0.0;

  std::optional<double> abs_error() const {
    if (!value || !reference) return std::nullopt;
    return std::fabs(*value - *reference);
  }
};

/// Fixed float rendering: 12 significant digits.
inline std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline const char* csv_header() { return "law,n,j,epsilon,tau,value,reference,abs_error"; }

inline std::string to_csv(const std::vector<ExperimentRecord>& records) {
  std::string out = csv_header();
  out += "\n";
  for (const auto& r : records) {
    out += r.law;
    out += ",";
    if (r.n >= 0) out += std::to_string(r.n);
    out += ",";
    if (r.j >= 0) out += std::to_string(r.j);
    out += ",";
    if (!std::isnan(r.epsilon)) out += fmt12(r.epsilon);
    out += ",";
    if (!std::isnan(r.tau)) out += fmt12(r.tau);
    out += ",";
    if (r.value) out += fmt12(*r.value);
    out += ",";
    if (r.reference) out += fmt12(*r.reference);
    out += ",";
    if (auto e = r.abs_error()) out += fmt12(*e);
    out += "\n";
  }
  return out;
}

inline std::string to_json(const std::vector<ExperimentRecord>& records) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json o;
    o["law"] = r.law;
    if (r.n >= 0) o["n"] = r.n;
    if (r.j >= 0) o["j"] = r.j;
    if (!std::isnan(r.epsilon)) o["epsilon"] = fmt12(r.epsilon);
    if (!std::isnan(r.tau)) o["tau"] = fmt12(r.tau);
    if (r.empty_feasible) o["empty_feasible"] = true;
    if (r.value) o["value"] = fmt12(*r.value);
    if (r.value_exact) o["value_exact"] = rational_to_string(*r.value_exact);
    if (r.reference) o["reference"] = fmt12(*r.reference);
    if (auto e = r.abs_error()) o["abs_error"] = fmt12(*e);
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

}  // namespace mtypes
