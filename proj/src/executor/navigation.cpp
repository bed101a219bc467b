#include "ecl/executor/navigation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ecl {

std::vector<Action> turn_actions(Heading from, Heading to) {
  const int diff = (static_cast<int>(to) - static_cast<int>(from) + 4) % 4;
  if (diff == 0) return {};
  if (diff == 1) return {Action::rotate_right()};
  if (diff == 3) return {Action::rotate_left()};
  return {Action::rotate_right(), Action::rotate_right()};
}

std::optional<Heading> facing_heading(Cell from, Cell target) {
  const int dx = target.x - from.x, dy = target.y - from.y;
  if (dx == 0 && dy == 0) return std::nullopt;
  if (std::abs(dx) >= std::abs(dy)) return dx > 0 ? Heading::E : Heading::W;
  return dy > 0 ? Heading::S : Heading::N;
}

std::vector<Cell> arrival_region(const CostField& field, const std::vector<Cell>& targets, double reach) {
  const int r = static_cast<int>(std::floor(reach));
  std::set<Cell> cells;
  for (Cell t : targets)
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        const Cell c{t.x + dx, t.y + dy};
        if (field.passable(c)) cells.insert(c);
      }
  return {cells.begin(), cells.end()};
}

NavStep plan_step(const CostField& field, const AgentPose& pose, const std::vector<Cell>& region) {
  NavStep out;
  if (std::find(region.begin(), region.end(), pose.cell) != region.end()) {
    out.arrived = out.reachable = true;
    out.goal_cell = pose.cell;
    return out;
  }
  CostField f = field;
  f.clear(pose.cell);
  const ArrivalField arrival = solve_eikonal(f, pose.cell);
  double best = kInf;
  for (Cell c : region) {
    const double t = arrival.time[c];
    if (t < best || (t == best && t < kInf && arrival.time.index(c) < arrival.time.index(out.goal_cell))) {
      best = t;
      out.goal_cell = c;
    }
  }
  if (best == kInf) return out;
  out.reachable = true;
  out.path = extract_path(arrival, out.goal_cell);
  const Cell next = out.path[1];
  Cell move{next.x - pose.cell.x, next.y - pose.cell.y};
  if (move.x != 0 && move.y != 0) {
    const Cell h = heading_vector(pose.heading);
    move = (h.y == move.y && h.x == 0) ? Cell{0, move.y} : Cell{move.x, 0};
  }
  const Heading want = *facing_heading({0, 0}, move);
  out.actions = turn_actions(pose.heading, want);
  out.actions.push_back(Action::move_ahead());
  return out;
}

}  // namespace ecl
