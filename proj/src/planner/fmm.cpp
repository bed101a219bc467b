#include "ecl/planner/fmm.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "ecl/common/error.hpp"
#include "ecl/common/io.hpp"

namespace ecl {

CostField::CostField(const Grid<uint8_t>& obstacles, int inflation_radius)
    : cost_(obstacles.width(), obstacles.height(), 1.0), inflation_radius_(inflation_radius) {
  if (inflation_radius < 0) throw ConfigError("inflation radius must be non-negative");
  const int r = inflation_radius;
  for (size_t i = 0; i < obstacles.size(); ++i) {
    if (!obstacles.data()[i]) continue;
    const Cell o = obstacles.cell(i);
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        const Cell c{o.x + dx, o.y + dy};
        if (dx * dx + dy * dy <= r * r && cost_.in_bounds(c)) cost_[c] = kInf;
      }
  }
}

namespace {

double solve_local(const Grid<double>& t, const CostField& field, Cell c) {
  auto get = [&](Cell n) { return t.in_bounds(n) ? t[n] : kInf; };
  const double a = std::min(get({c.x - 1, c.y}), get({c.x + 1, c.y}));
  const double b = std::min(get({c.x, c.y - 1}), get({c.x, c.y + 1}));
  const double f = field.cost(c);
  if (a == kInf && b == kInf) return kInf;
  if (a == kInf || b == kInf || std::abs(a - b) >= f) return std::min(a, b) + f;
  return 0.5 * (a + b + std::sqrt(2.0 * f * f - (a - b) * (a - b)));
}

}  // namespace

ArrivalField solve_eikonal(const CostField& field, Cell source) {
  if (!field.in_bounds(source)) throw InputError("eikonal source out of bounds");
  if (!field.passable(source)) throw InputError("eikonal source has infinite cost");
  ArrivalField out;
  out.source = source;
  out.time = Grid<double>(field.width(), field.height(), kInf);
  Grid<uint8_t> frozen(field.width(), field.height(), 0);
  using Entry = std::pair<double, size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  out.time[source] = 0.0;
  heap.push({0.0, out.time.index(source)});
  while (!heap.empty()) {
    const auto [t, idx] = heap.top();
    heap.pop();
    const Cell c = out.time.cell(idx);
    if (frozen[c] || t > out.time[c]) continue;
    frozen[c] = 1;
    out.finalize_order.push_back(c);
    for (Cell d : kNeighbors4) {
      const Cell n{c.x + d.x, c.y + d.y};
      if (!field.passable(n) || frozen[n]) continue;
      const double cand = solve_local(out.time, field, n);
      if (cand < out.time[n]) {
        out.time[n] = cand;
        heap.push({cand, out.time.index(n)});
      }
    }
  }
  return out;
}

std::vector<Cell> extract_path(const ArrivalField& arrival, Cell goal) {
  if (!arrival.reachable(goal)) throw UnreachableError("goal cell is unreachable");
  const auto& t = arrival.time;
  std::vector<Cell> path{goal};
  Cell cur = goal;
  const size_t limit = t.size();
  while (cur != arrival.source) {
    if (path.size() > limit) throw Error("path extraction did not terminate");
    Cell best = cur;
    double best_t = t[cur];
    for (Cell d : kNeighbors8) {
      const Cell n{cur.x + d.x, cur.y + d.y};
      if (!arrival.reachable(n)) continue;
      if (d.x != 0 && d.y != 0 &&
          (!arrival.reachable({cur.x + d.x, cur.y}) || !arrival.reachable({cur.x, cur.y + d.y})))
        continue;
      if (t[n] < best_t) {
        best_t = t[n];
        best = n;
      }
    }
    if (best == cur) throw Error("no descent direction on the arrival field");
    cur = best;
    path.push_back(cur);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

double path_length(const std::vector<Cell>& path) {
  double len = 0.0;
  for (size_t i = 1; i < path.size(); ++i) {
    const int dx = std::abs(path[i].x - path[i - 1].x), dy = std::abs(path[i].y - path[i - 1].y);
    len += (dx && dy) ? std::sqrt(2.0) : 1.0;
  }
  return len;
}

std::string ArrivalField::dump() const {
  std::ostringstream out;
  out << "# ecl-arrival v1\nsize " << time.width() << ' ' << time.height() << "\nsource " << source.x << ' '
      << source.y << '\n';
  for (int y = 0; y < time.height(); ++y) {
    for (int x = 0; x < time.width(); ++x) {
      if (x) out << ' ';
      const double v = time[{x, y}];
      out << (v < kInf ? format_double(v) : std::string("inf"));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace ecl
