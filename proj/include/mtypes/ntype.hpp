#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "mtypes/errors.hpp"
#include "mtypes/rational.hpp"

namespace mtypes {

/// An n-type: occurrence counts n_i summing to n. The fraction view
/// nu_i = n_i / n is an exact rational pmf.
struct NType {
  std::vector<std::int64_t> counts;
  std::int64_t n = 0;

  NType() = default;

  explicit NType(std::vector<std::int64_t> c) : counts(std::move(c)) {
    n = 0;
    for (auto v : counts) {
      if (v < 0) throw Error(ErrorCode::PreconditionViolated, "negative count");
      n += v;
    }
    if (n <= 0) throw Error(ErrorCode::PreconditionViolated, "type needs n >= 1");
  }

  std::size_t size() const { return counts.size(); }

  double fraction(std::size_t i) const {
    return static_cast<double>(counts[i]) / static_cast<double>(n);
  }

  Rational fraction_exact(std::size_t i) const { return Rational(counts[i], n); }

  std::vector<double> fractions() const {
    std::vector<double> f(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) f[i] = fraction(i);
    return f;
  }

  friend bool operator==(const NType& a, const NType& b) {
    return a.counts == b.counts;
  }
  friend bool operator<(const NType& a, const NType& b) {  // lexicographic count order
    return a.counts < b.counts;
  }
};

}  // namespace mtypes
