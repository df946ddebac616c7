#include "lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qms/error.hpp"

namespace qms::detail {

namespace {

constexpr std::size_t kDegenerateRun = 50;

class SpanningBasis {
 public:
  SpanningBasis(std::size_t m, std::size_t k) : m_(m), k_(k), basic_(m * k, 0), adj_(m + k) {}

  [[nodiscard]] bool basic(std::size_t i, std::size_t j) const { return basic_[i * k_ + j] != 0; }

  void add(std::size_t i, std::size_t j) {
    basic_[i * k_ + j] = 1;
    adj_[i].push_back(m_ + j);
    adj_[m_ + j].push_back(i);
  }

  void remove(std::size_t i, std::size_t j) {
    basic_[i * k_ + j] = 0;
    std::erase(adj_[i], m_ + j);
    std::erase(adj_[m_ + j], i);
  }

  /// Tree path of node ids from row i to column j (column nodes are offset by m).
  [[nodiscard]] std::vector<std::size_t> path(std::size_t i, std::size_t j) const {
    const std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> parent(m_ + k_, none);
    std::vector<std::size_t> stack{m_ + j};
    parent[m_ + j] = m_ + j;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      if (u == i) break;
      for (std::size_t w : adj_[u]) {
        if (parent[w] == none) {
          parent[w] = u;
          stack.push_back(w);
        }
      }
    }
    if (parent[i] == none) throw ComputationError("transportation basis is not a spanning tree");
    std::vector<std::size_t> out{i};
    for (std::size_t u = i; u != m_ + j;) {
      u = parent[u];
      out.push_back(u);
    }
    return out;
  }

  void potentials(const Matrix& cost, std::vector<double>& u, std::vector<double>& v) const {
    std::vector<char> seen(m_ + k_, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    u[0] = 0.0;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      for (std::size_t w : adj_[node]) {
        if (seen[w]) continue;
        seen[w] = 1;
        if (node < m_) {
          v[w - m_] = cost(node, w - m_) - u[node];
        } else {
          u[w] = cost(w, node - m_) - v[node - m_];
        }
        stack.push_back(w);
      }
    }
  }

 private:
  std::size_t m_, k_;
  std::vector<char> basic_;
  std::vector<std::vector<std::size_t>> adj_;
};

}  // namespace

TransportationSolution solve_transportation(const Matrix& cost, const std::vector<double>& a,
                                            const std::vector<double>& b) {
  const std::size_t m = a.size(), k = b.size();
  if (m == 0 || k == 0 || cost.rows() != m || cost.cols() != k)
    throw StructureError("transportation problem has inconsistent shapes");

  Matrix x(m, k, 0.0);
  SpanningBasis basis(m, k);

  // northwest corner start; zero-valued basics keep the tree spanning
  {
    std::size_t i = 0, j = 0;
    double ra = a[0], rb = b[0];
    while (true) {
      const double q = std::min(ra, rb);
      x(i, j) = q;
      basis.add(i, j);
      ra -= q;
      rb -= q;
      if (i == m - 1 && j == k - 1) break;
      if (j == k - 1 || (i < m - 1 && ra <= rb)) {
        ++i;
        ra = a[i];
      } else {
        ++j;
        rb = b[j];
      }
    }
  }

  double cmax = 0.0;
  for (double c : cost.data()) cmax = std::max(cmax, std::abs(c));
  const double tol = 1e-12 * std::max(1.0, cmax);

  std::vector<double> u(m), v(k);
  std::size_t pivots = 0, degenerate = 0;
  const std::size_t max_pivots = 100 * (m + k) * (m + k) + 10000;
  while (true) {
    basis.potentials(cost, u, v);
    const bool bland = degenerate >= kDegenerateRun;
    std::size_t ei = m, ej = k;
    double best = -tol;
    for (std::size_t i = 0; i < m && !(bland && ei < m); ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        if (basis.basic(i, j)) continue;
        const double r = cost(i, j) - u[i] - v[j];
        if (r < best) {
          best = r;
          ei = i;
          ej = j;
          if (bland) break;
        }
      }
    }
    if (ei == m) break;
    if (++pivots > max_pivots) throw ComputationError("transportation simplex exceeded its pivot budget");

    const std::vector<std::size_t> nodes = basis.path(ei, ej);
    // edges along the path alternate -, +, -, ... starting at row ei
    double theta = std::numeric_limits<double>::infinity();
    std::size_t li = m, lj = k;
    for (std::size_t e = 0; e + 1 < nodes.size(); e += 2) {
      const std::size_t r = nodes[e], c = nodes[e + 1] - m;
      const double val = x(r, c);
      if (val < theta || (val == theta && r * k + c < li * k + lj)) {
        theta = val;
        li = r;
        lj = c;
      }
    }
    for (std::size_t e = 0; e + 1 < nodes.size(); ++e) {
      const bool minus = e % 2 == 0;
      const std::size_t r = minus ? nodes[e] : nodes[e + 1];
      const std::size_t c = (minus ? nodes[e + 1] : nodes[e]) - m;
      x(r, c) += minus ? -theta : theta;
    }
    x(ei, ej) = theta;
    x(li, lj) = 0.0;
    basis.add(ei, ej);
    basis.remove(li, lj);
    degenerate = theta == 0.0 ? degenerate + 1 : 0;
  }

  basis.potentials(cost, u, v);
  TransportationSolution sol{x, u, v, 0.0, 0.0, pivots, true};
  const double cert = 1e-9 * std::max(1.0, cmax);
  for (std::size_t i = 0; i < m; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      sol.primal += x(i, j) * cost(i, j);
      row += x(i, j);
      if (x(i, j) < -1e-12) sol.certified = false;
      if (cost(i, j) - u[i] - v[j] < -cert) sol.certified = false;
      if (x(i, j) > 0.0 && !basis.basic(i, j)) sol.certified = false;
    }
    if (std::abs(row - a[i]) > 1e-9) sol.certified = false;
    sol.dual += u[i] * a[i];
  }
  for (std::size_t j = 0; j < k; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < m; ++i) col += x(i, j);
    if (std::abs(col - b[j]) > 1e-9) sol.certified = false;
    sol.dual += v[j] * b[j];
  }
  return sol;
}

DenseLpSolution solve_dense_lp(const Matrix& a, const std::vector<double>& rhs, const std::vector<double>& c) {
  const std::size_t rows = a.rows(), vars = a.cols();
  if (rhs.size() != rows || c.size() != vars) throw StructureError("dense LP has inconsistent shapes");
  const std::size_t cols = vars + rows;  // structural then slack columns; rhs kept apart
  Matrix t(rows, cols, 0.0);
  std::vector<double> b = rhs;
  std::vector<std::size_t> basic(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    if (b[r] < 0.0) throw DomainError("dense LP needs a nonnegative right-hand side");
    for (std::size_t j = 0; j < vars; ++j) t(r, j) = a(r, j);
    t(r, vars + r) = 1.0;
    basic[r] = vars + r;
  }
  std::vector<double> obj(cols, 0.0);  // reduced profits c_j - z_j
  for (std::size_t j = 0; j < vars; ++j) obj[j] = c[j];

  double scale = 1.0;
  for (double cj : c) scale = std::max(scale, std::abs(cj));
  const double tol = 1e-12 * scale;
  const double piv_tol = 1e-12;

  std::size_t pivots = 0;
  while (true) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j < cols; ++j) {
      if (obj[j] > tol) {
        enter = j;
        break;
      }
    }
    if (enter == cols) break;
    std::size_t leave = rows;
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows; ++r) {
      if (t(r, enter) <= piv_tol) continue;
      const double q = b[r] / t(r, enter);
      if (q < ratio || (q == ratio && leave < rows && basic[r] < basic[leave])) {
        ratio = q;
        leave = r;
      }
    }
    if (leave == rows) throw ComputationError("dense LP is unbounded");
    ++pivots;

    const double p = t(leave, enter);
    for (std::size_t j = 0; j < cols; ++j) t(leave, j) /= p;
    b[leave] /= p;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == leave) continue;
      const double f = t(r, enter);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) t(r, j) -= f * t(leave, j);
      b[r] = std::max(0.0, b[r] - f * b[leave]);
    }
    const double f = obj[enter];
    for (std::size_t j = 0; j < cols; ++j) obj[j] -= f * t(leave, j);
    basic[leave] = enter;
  }

  DenseLpSolution sol{std::vector<double>(vars, 0.0), 0.0, pivots};
  for (std::size_t r = 0; r < rows; ++r)
    if (basic[r] < vars) sol.x[basic[r]] = b[r];
  for (std::size_t j = 0; j < vars; ++j) sol.objective += c[j] * sol.x[j];
  return sol;
}

}  // namespace qms::detail
