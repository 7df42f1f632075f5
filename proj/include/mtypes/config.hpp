#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mtypes/alphabet.hpp"
#include "mtypes/constraints.hpp"
#include "mtypes/errors.hpp"

namespace mtypes {

/// Flat key/value experiment description: one experiment per file,
/// `key = value [value ...]`, `#` comments. Unknown keys are rejected.
struct ExperimentConfig {
  std::string law;  // enumerate | project | icet | cwlln | egcp | rates | rcwlln | rational
  std::vector<std::string> alphabet;  // support values (rational tokens)
  std::vector<std::string> q, q2;     // source pmf tokens
  std::string constraint;  // fullsimplex | moment | frequency | genfreq | line | pair
  std::vector<std::string> u;
  std::string a;
  std::vector<std::string> a_list;    // union of moment targets
  double alpha = 0.0;
  std::string b;
  std::vector<double> line_offset, line_direction;
  std::vector<std::string> x_values, y_values;
  std::string pair_sum;
  std::vector<std::int64_t> n_schedule;
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  double tau = std::numeric_limits<double>::quiet_NaN();
  int t = -1;  // prefix length
  std::string mode = "exact";
  std::string format = "csv";
  std::string out;
  std::uint64_t budget = 100000000ULL;
  std::int64_t exact_cap = 400;
  int starts = 0;
  double alpha_entropy = std::numeric_limits<double>::quiet_NaN();
  std::string ball_norm = "euclidean";
  std::vector<std::int64_t> nu, nu_dot;  // rational-concentration types
  int k_max = 20;

  static ExperimentConfig parse(std::string_view text);
  void validate() const;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline double parse_real(const std::string& tok, const char* what) {
  if (auto r = parse_rational(tok)) return to_double(*r);
  throw Error(ErrorCode::InvalidConfig, std::string("bad numeric value for ") + what + ": " + tok);
}

inline std::int64_t parse_int(const std::string& tok, const char* what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (...) {
    throw Error(ErrorCode::InvalidConfig, std::string("bad integer for ") + what + ": " + tok);
  }
}

}  // namespace detail

inline ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig c;
  static const std::set<std::string> known = {
      "law",     "alphabet", "q",          "q2",      "constraint", "u",
      "a",       "a_list",   "alpha",      "b",       "line_offset", "line_direction",
      "x_values", "y_values", "pair_sum",  "n",       "n_schedule", "epsilon",
      "tau",     "t",        "mode",       "format",  "out",        "budget",
      "exact_cap", "starts", "alpha_entropy", "ball_norm", "nu",   "nu_dot",
      "k_max"};

  std::size_t pos = 0;
  int lineno = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                                          : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    const std::string trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::InvalidConfig,
                  "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(std::string_view(trimmed).substr(0, eq));
    const std::string val = detail::trim(std::string_view(trimmed).substr(eq + 1));
    if (!known.count(key))
      throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "'");
    const auto toks = detail::tokens(val);
    auto one = [&]() -> const std::string& {
      if (toks.size() != 1)
        throw Error(ErrorCode::InvalidConfig, "key '" + key + "' takes one value");
      return toks[0];
    };

    if (key == "law") c.law = one();
    else if (key == "alphabet") c.alphabet = toks;
    else if (key == "q") c.q = toks;
    else if (key == "q2") c.q2 = toks;
    else if (key == "constraint") c.constraint = one();
    else if (key == "u") c.u = toks;
    else if (key == "a") c.a = one();
    else if (key == "a_list") c.a_list = toks;
    else if (key == "alpha") c.alpha = detail::parse_real(one(), "alpha");
    else if (key == "b") c.b = one();
    else if (key == "line_offset") {
      c.line_offset.clear();
      for (const auto& tk : toks) c.line_offset.push_back(detail::parse_real(tk, "line_offset"));
    } else if (key == "line_direction") {
      c.line_direction.clear();
      for (const auto& tk : toks) c.line_direction.push_back(detail::parse_real(tk, "line_direction"));
    } else if (key == "x_values") c.x_values = toks;
    else if (key == "y_values") c.y_values = toks;
    else if (key == "pair_sum") c.pair_sum = one();
    else if (key == "n" || key == "n_schedule") {
      c.n_schedule.clear();
      for (const auto& tk : toks) c.n_schedule.push_back(detail::parse_int(tk, "n"));
    } else if (key == "epsilon") c.epsilon = detail::parse_real(one(), "epsilon");
    else if (key == "tau") c.tau = detail::parse_real(one(), "tau");
    else if (key == "t") c.t = static_cast<int>(detail::parse_int(one(), "t"));
    else if (key == "mode") c.mode = one();
    else if (key == "format") c.format = one();
    else if (key == "out") c.out = one();
    else if (key == "budget") c.budget = static_cast<std::uint64_t>(detail::parse_int(one(), "budget"));
    else if (key == "exact_cap") c.exact_cap = detail::parse_int(one(), "exact_cap");
    else if (key == "starts") c.starts = static_cast<int>(detail::parse_int(one(), "starts"));
    else if (key == "alpha_entropy") c.alpha_entropy = detail::parse_real(one(), "alpha_entropy");
    else if (key == "ball_norm") c.ball_norm = one();
    else if (key == "nu") {
      c.nu.clear();
      for (const auto& tk : toks) c.nu.push_back(detail::parse_int(tk, "nu"));
    } else if (key == "nu_dot") {
      c.nu_dot.clear();
      for (const auto& tk : toks) c.nu_dot.push_back(detail::parse_int(tk, "nu_dot"));
    } else if (key == "k_max") c.k_max = static_cast<int>(detail::parse_int(one(), "k_max"));
  }
  c.validate();
  return c;
}

inline void ExperimentConfig::validate() const {
  static const std::set<std::string> laws = {"enumerate", "project", "icet",   "cwlln",
                                             "egcp",      "rates",   "rcwlln", "rational"};
  if (!laws.count(law)) throw Error(ErrorCode::InvalidConfig, "law must be one of the known laws");
  if (mode != "exact" && mode != "float")
    throw Error(ErrorCode::InvalidConfig, "mode must be exact or float");
  if (format != "csv" && format != "json")
    throw Error(ErrorCode::InvalidConfig, "format must be csv or json");
  if (ball_norm != "euclidean" && ball_norm != "max")
    throw Error(ErrorCode::InvalidConfig, "ball_norm must be euclidean or max");
  if (law == "rational") {
    if (nu.empty() || nu.size() != nu_dot.size())
      throw Error(ErrorCode::InvalidConfig, "rational law needs nu and nu_dot of equal size");
  } else if (law == "rcwlln") {
    if (x_values.size() < 2 || y_values.size() < 2 || pair_sum.empty())
      throw Error(ErrorCode::InvalidConfig, "rcwlln needs x_values, y_values and pair_sum");
  } else {
    static const std::set<std::string> kinds = {"fullsimplex", "moment", "frequency",
                                                "genfreq",     "line"};
    if (!kinds.count(constraint))
      throw Error(ErrorCode::InvalidConfig, "constraint must name a known variant");
  }
  if (q.empty() && law != "rcwlln")
    throw Error(ErrorCode::InvalidConfig, "source q is required");
  if ((law == "icet" || law == "cwlln" || law == "rcwlln") && std::isnan(epsilon))
    throw Error(ErrorCode::InvalidConfig, "ball laws need epsilon");
  if (law == "egcp" && t < 0)
    throw Error(ErrorCode::InvalidConfig, "egcp needs a prefix length t");
  if (law != "project" && law != "rational" && n_schedule.empty())
    throw Error(ErrorCode::InvalidConfig, "an n or n_schedule is required");
}

// ---------------------------------------------------------------------------
// Builders from validated configs
// ---------------------------------------------------------------------------

inline Pmf build_pmf(const std::vector<std::string>& toks, const std::string& mode) {
  std::vector<Rational> rs;
  bool all_rational = true;
  for (const auto& tk : toks) {
    if (auto r = parse_rational(tk))
      rs.push_back(*r);
    else {
      all_rational = false;
      break;
    }
  }
  if (all_rational) {
    Rational sum(0);
    for (const auto& r : rs) sum += r;
    if (sum == 1) return Pmf::from_rationals(std::move(rs));
  }
  if (mode == "exact")
    throw Error(ErrorCode::ExactUnavailable, "exact mode needs a rational pmf summing to 1");
  std::vector<double> ds;
  for (const auto& tk : toks) ds.push_back(detail::parse_real(tk, "pmf"));
  return Pmf::from_doubles(std::move(ds));
}

inline std::vector<Param> build_params(const std::vector<std::string>& toks, const char* what) {
  std::vector<Param> ps;
  for (const auto& tk : toks) {
    if (auto r = parse_rational(tk))
      ps.push_back(Param::of(*r));
    else
      ps.push_back(Param::of(detail::parse_real(tk, what)));
  }
  return ps;
}

inline Param build_param(const std::string& tok, const char* what) {
  if (auto r = parse_rational(tok)) return Param::of(*r);
  return Param::of(detail::parse_real(tok, what));
}

inline ConstraintSet build_constraint(const ExperimentConfig& c, std::size_t m) {
  if (c.constraint == "fullsimplex") return ConstraintSet::full_simplex(m);
  if (c.constraint == "moment") {
    auto weights = build_params(c.u.empty() ? c.alphabet : c.u, "u");
    if (weights.size() != m) throw Error(ErrorCode::InvalidConfig, "moment weights size != m");
    if (!c.a_list.empty()) {
      std::vector<ConstraintSet> parts;
      for (const auto& tk : c.a_list)
        parts.push_back(ConstraintSet::moment(weights, build_param(tk, "a_list")));
      return ConstraintSet::union_of(std::move(parts));
    }
    if (c.a.empty()) throw Error(ErrorCode::InvalidConfig, "moment needs a (or a_list)");
    return ConstraintSet::moment(weights, build_param(c.a, "a"));
  }
  if (c.constraint == "frequency") {
    if (c.a.empty()) throw Error(ErrorCode::InvalidConfig, "frequency needs a");
    if (c.alpha == 0) throw Error(ErrorCode::InvalidConfig, "frequency needs alpha");
    return ConstraintSet::frequency(m, c.alpha, build_param(c.a, "a"));
  }
  if (c.constraint == "genfreq") {
    if (c.alphabet.empty()) throw Error(ErrorCode::InvalidConfig, "genfreq needs alphabet values");
    auto x = build_params(c.alphabet, "alphabet");
    if (x.size() != m) throw Error(ErrorCode::InvalidConfig, "genfreq values size != m");
    return ConstraintSet::generalized_frequency(
        std::move(x), c.alpha, c.b.empty() ? Param::of_int(0) : build_param(c.b, "b"));
  }
  if (c.constraint == "line") {
    if (c.line_offset.size() != m || c.line_direction.size() != m)
      throw Error(ErrorCode::InvalidConfig, "line needs offset and direction of size m");
    return ConstraintSet::line(c.line_offset, c.line_direction);
  }
  throw Error(ErrorCode::InvalidConfig, "constraint must name a known variant");
}

inline MembershipMode build_mode(const ExperimentConfig& c) {
  if (c.mode == "exact") return MembershipMode::Exact();
  return MembershipMode::Tolerance(std::isnan(c.tau) ? 0.0 : c.tau);
}

}  // namespace mtypes
