#pragma once

// Internal LP solvers: the transportation simplex (u-v method on a spanning-tree basis)
// and a dense tableau simplex with Bland's rule.

#include <cstddef>
#include <vector>

#include "qms/matrix.hpp"

namespace qms::detail {

struct TransportationSolution {
  Matrix flow;             // m x k
  std::vector<double> u;   // row potentials
  std::vector<double> v;   // column potentials
  double primal;
  double dual;
  std::size_t pivots;
  bool certified;
};

/// Balanced transportation problem min <C, X> with row sums a and column sums b.
/// Dantzig pricing, switching to Bland's rule after a run of degenerate pivots.
TransportationSolution solve_transportation(const Matrix& cost, const std::vector<double>& a,
                                            const std::vector<double>& b);

struct DenseLpSolution {
  std::vector<double> x;
  double objective;
  std::size_t pivots;
};

/// max c.x subject to A x <= rhs, x >= 0, with rhs >= 0 (the slack basis is feasible).
/// Bland's rule throughout. Throws ComputationError if unbounded.
DenseLpSolution solve_dense_lp(const Matrix& a, const std::vector<double>& rhs, const std::vector<double>& c);

}  // namespace qms::detail
