#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ecl {

// 0/1 matching between k rows (proposals) and l columns (class words).
// The smaller side is fully matched; each element of the larger side is
// used at most once, so exactly min(k, l) pairs are selected.
struct Assignment {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_to_col;  // -1 when the row is unmatched
  double total_cost = 0.0;

  bool matched(int i, int j) const { return row_to_col[static_cast<size_t>(i)] == j; }
  int num_matched() const;
  // Dense k x l indicator matrix.
  Eigen::MatrixXi matrix() const;
};

// Minimum-cost rectangular assignment (Kuhn-Munkres with potentials,
// O(n^2 m)). Throws InputError on non-finite costs.
Assignment solve_assignment(const Eigen::MatrixXd& costs);

}  // namespace ecl
