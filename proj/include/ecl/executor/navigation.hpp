#pragma once

#include <optional>
#include <vector>

#include "ecl/planner/fmm.hpp"
#include "ecl/world/world.hpp"

namespace ecl {

// Rotations (fewest first) that turn `from` into `to`.
std::vector<Action> turn_actions(Heading from, Heading to);

// Heading that puts `target` straight ahead or inside the frontal quadrant.
std::optional<Heading> facing_heading(Cell from, Cell target);

// Passable cells within Chebyshev distance `reach` of any target cell.
std::vector<Cell> arrival_region(const CostField& field, const std::vector<Cell>& targets, double reach);

struct NavStep {
  bool arrived = false;
  bool reachable = false;
  Cell goal_cell{-1, -1};   // region cell the plan heads for
  std::vector<Action> actions;  // rotations then one MoveAhead, empty on arrival
  std::vector<Cell> path;
};

// One planning round: solve the arrival field from the agent, pick the
// region cell with the smallest arrival time (lowest index on ties), extract
// the path and return the actions for its first 4-connected move. Diagonal
// steps are split into two moves, taking the one along the current heading
// first when possible.
NavStep plan_step(const CostField& field, const AgentPose& pose, const std::vector<Cell>& region);

}  // namespace ecl
