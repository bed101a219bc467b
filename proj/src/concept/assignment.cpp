#include "ecl/concept/assignment.hpp"

#include <limits>

#include "ecl/common/error.hpp"

namespace ecl {

int Assignment::num_matched() const {
  int n = 0;
  for (int c : row_to_col) n += c >= 0;
  return n;
}

Eigen::MatrixXi Assignment::matrix() const {
  Eigen::MatrixXi x = Eigen::MatrixXi::Zero(rows, cols);
  for (int i = 0; i < rows; ++i)
    if (row_to_col[static_cast<size_t>(i)] >= 0) x(i, row_to_col[static_cast<size_t>(i)]) = 1;
  return x;
}

namespace {

// Requires a.rows() <= a.cols(). Returns the column matched to each row.
std::vector<int> hungarian_rows_le_cols(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; p[j] is the row matched to column j (0 = none).
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<size_t>(n), -1);
  for (int j = 1; j <= m; ++j)
    if (p[j] != 0) row_to_col[static_cast<size_t>(p[j] - 1)] = j - 1;
  return row_to_col;
}

}  // namespace

Assignment solve_assignment(const Eigen::MatrixXd& costs) {
  if (!costs.allFinite()) throw InputError("assignment cost matrix has non-finite entries");
  Assignment out;
  out.rows = static_cast<int>(costs.rows());
  out.cols = static_cast<int>(costs.cols());
  out.row_to_col.assign(static_cast<size_t>(out.rows), -1);
  if (out.rows == 0 || out.cols == 0) return out;
  if (out.rows <= out.cols) {
    out.row_to_col = hungarian_rows_le_cols(costs);
  } else {
    const Eigen::MatrixXd t = costs.transpose();
    const auto col_to_row = hungarian_rows_le_cols(t);
    for (int j = 0; j < out.cols; ++j)
      out.row_to_col[static_cast<size_t>(col_to_row[static_cast<size_t>(j)])] = j;
  }
  for (int i = 0; i < out.rows; ++i)
    if (out.row_to_col[static_cast<size_t>(i)] >= 0)
      out.total_cost += costs(i, out.row_to_col[static_cast<size_t>(i)]);
  return out;
}

}  // namespace ecl
