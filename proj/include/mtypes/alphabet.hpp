#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "mtypes/errors.hpp"
#include "mtypes/rational.hpp"

namespace mtypes {

/// Finite support X = {x_1, ..., x_m}: symbol labels plus optional real values.
struct Alphabet {
  std::vector<std::string> symbols;
  std::optional<std::vector<double>> values;

  std::size_t size() const { return symbols.size(); }

  static Alphabet plain(std::size_t m) {
    Alphabet a;
    a.symbols.reserve(m);
    for (std::size_t i = 0; i < m; ++i) a.symbols.push_back("x" + std::to_string(i + 1));
    a.validate();
    return a;
  }

  static Alphabet with_values(std::vector<double> x) {
    Alphabet a = plain(x.size());
    a.values = std::move(x);
    a.validate();
    return a;
  }

  void validate() const {
    if (symbols.size() < 2)
      throw Error(ErrorCode::InvalidConfig, "alphabet needs at least 2 symbols");
    std::unordered_set<std::string> seen(symbols.begin(), symbols.end());
    if (seen.size() != symbols.size())
      throw Error(ErrorCode::InvalidConfig, "alphabet symbols must be distinct");
    if (values && values->size() != symbols.size())
      throw Error(ErrorCode::InvalidConfig, "alphabet values length mismatch");
  }
};

/// Probability mass function on m symbols. Carries exact rational entries when
/// constructed from rationals; float-only otherwise.
struct Pmf {
  std::vector<double> probs;
  std::optional<std::vector<Rational>> exact;

  std::size_t size() const { return probs.size(); }
  bool exact_mode() const { return exact.has_value(); }

  static Pmf from_rationals(std::vector<Rational> r) {
    Pmf p;
    Rational sum(0);
    p.probs.reserve(r.size());
    for (const auto& v : r) {
      if (v < 0) throw Error(ErrorCode::InvalidConfig, "pmf entry < 0");
      sum += v;
      p.probs.push_back(to_double(v));
    }
    if (sum != 1) throw Error(ErrorCode::InvalidConfig, "exact pmf must sum to 1, got " + rational_to_string(sum));
    p.exact = std::move(r);
    return p;
  }

  static Pmf from_doubles(std::vector<double> d) {
    Pmf p;
    double sum = 0;
    for (double v : d) {
      if (v < 0) throw Error(ErrorCode::InvalidConfig, "pmf entry < 0");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
      throw Error(ErrorCode::InvalidConfig, "pmf must sum to 1 within 1e-12");
    p.probs = std::move(d);
    return p;
  }

  static Pmf uniform(std::size_t m) {
    return from_rationals(std::vector<Rational>(m, Rational(1, m)));
  }

  /// Sources must be strictly positive.
  void require_source() const {
    for (double v : probs)
      if (v <= 0.0)
        throw Error(ErrorCode::PreconditionViolated, "source pmf must be strictly positive");
  }

  bool strictly_positive() const {
    for (double v : probs)
      if (v <= 0.0) return false;
    return true;
  }
};

}  // namespace mtypes
