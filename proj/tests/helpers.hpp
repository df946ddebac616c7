#pragma once

#include <algorithm>
#include <vector>

#include "oracles.hpp"
#include "qms/models.hpp"
#include "qms/space.hpp"

namespace testing_support {

inline qms::QuasiMetricSpace from_rows(const std::vector<std::vector<double>>& rows) {
  qms::Matrix m(rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  return qms::QuasiMetricSpace(std::move(m));
}

inline oracle::Mat rows_of(const qms::QuasiMetricSpace& s) {
  oracle::Mat out(s.size(), oracle::Vec(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) out[i][j] = s(i, j);
  return out;
}

/// Random asymmetric weights in [lo, hi] closed under shortest paths: always a quasi-metric.
inline qms::QuasiMetricSpace random_space(std::size_t n, qms::models::SplitMix& rng, double lo = 0.5,
                                          double hi = 3.0) {
  oracle::Mat d(n, oracle::Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) d[i][j] = rng.uniform(lo, hi);
  return from_rows(oracle::floyd(d, 1e300));
}

/// Random probability vector; roughly `zero_fraction` of atoms get no mass.
inline std::vector<double> random_measure(std::size_t n, qms::models::SplitMix& rng, double zero_fraction = 0.0) {
  std::vector<double> w(n);
  double s = 0;
  for (auto& x : w) {
    x = rng.uniform() < zero_fraction ? 0.0 : rng.uniform(0.05, 1.0);
    s += x;
  }
  if (s == 0) {
    w[0] = 1;
    s = 1;
  }
  for (auto& x : w) x /= s;
  return w;
}

inline std::vector<double> dirac(std::size_t n, std::size_t at) {
  std::vector<double> w(n, 0.0);
  w[at] = 1.0;
  return w;
}

}  // namespace testing_support
