#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ecl/common/grid.hpp"

namespace ecl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Traversal cost per cell: 1 where free, infinite on obstacles and on cells
// within the inflation radius (Euclidean, in cells) of an obstacle.
class CostField {
 public:
  CostField() = default;
  CostField(const Grid<uint8_t>& obstacles, int inflation_radius = 1);

  int width() const { return cost_.width(); }
  int height() const { return cost_.height(); }
  bool in_bounds(Cell c) const { return cost_.in_bounds(c); }
  int inflation_radius() const { return inflation_radius_; }
  double cost(Cell c) const { return cost_[c]; }
  bool passable(Cell c) const { return in_bounds(c) && cost_[c] < kInf; }
  const Grid<double>& grid() const { return cost_; }

  void set_cost(Cell c, double v) { cost_.at(c) = v; }
  // Makes c traversable, e.g. the agent's own cell.
  void clear(Cell c) { cost_.at(c) = 1.0; }

 private:
  Grid<double> cost_;
  int inflation_radius_ = 0;
};

struct ArrivalField {
  Grid<double> time;  // infinite on unreachable cells
  Cell source;
  std::vector<Cell> finalize_order;

  bool reachable(Cell c) const { return time.in_bounds(c) && time[c] < kInf; }
  // Plain-text dump: header, then one row per line, "inf" for unreachable.
  std::string dump() const;
};

// First-order upwind Fast Marching solution of |grad T| = cost from source.
// Throws InputError when the source cell is out of bounds or impassable.
ArrivalField solve_eikonal(const CostField& field, Cell source);

// Greedy 8-neighbour descent on T from goal back to the source (diagonal
// steps only when both orthogonal cells are finite), returned start-first.
// Throws UnreachableError when T(goal) is infinite.
std::vector<Cell> extract_path(const ArrivalField& arrival, Cell goal);

// Euclidean length of a cell path (1 per orthogonal step, sqrt 2 per diagonal).
double path_length(const std::vector<Cell>& path);

}  // namespace ecl
