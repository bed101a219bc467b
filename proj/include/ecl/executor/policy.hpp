#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ecl/common/grid.hpp"
#include "ecl/common/rng.hpp"
#include "ecl/map/semantic_map.hpp"
#include "ecl/planner/fmm.hpp"

namespace ecl {

// Per-class prior over goal cells in the shared scene frame.
struct SemanticPolicy {
  std::vector<Grid<double>> grids;  // indexed by class id, each sums to 1

  int num_classes() const { return static_cast<int>(grids.size()); }
  int width() const { return grids.empty() ? 0 : grids.front().width(); }
  int height() const { return grids.empty() ? 0 : grids.front().height(); }

  std::string to_json() const;
  static SemanticPolicy from_json(const std::string& text);
};

// Mean linear class probability over the maps that observed each cell;
// cells no map observed get `epsilon`. Each class grid is then normalized.
SemanticPolicy build_semantic_policy(const std::vector<SemanticMap>& demo_maps, double epsilon = 1e-6);

SemanticPolicy uniform_policy(int width, int height, int num_classes);

enum class GoalSource { Map, Policy };

struct GoalChoice {
  Cell cell{-1, -1};
  GoalSource source = GoalSource::Policy;
};

struct GoalQuery {
  ClassId cls = -1;
  double reach = 1.5;
  int resamples = 8;
  std::set<Cell> excluded;  // visited and failed during this subtask
  bool ignore_map = false;  // uniform-goal baseline: never consult the map
};

// Highest-probability map cell of the class whose arrival region is
// reachable (ties: earlier arrival, then lower index), if any.
std::optional<Cell> best_map_goal(const SemanticMap& map, const CostField& field, const ArrivalField& arrival,
                                  const GoalQuery& query);

// Policy sample whose arrival region is reachable, skipping excluded cells.
// Throws UnreachableError when K consecutive samples are unreachable or no
// mass is left.
Cell sample_policy_goal(const SemanticPolicy& policy, const CostField& field, const ArrivalField& arrival,
                        const GoalQuery& query, Rng& rng);

// Highest-probability map cell of the class whose arrival region is
// reachable (ties: earlier arrival, then lower index). Without one, samples
// the policy grid, skipping excluded cells; throws UnreachableError when K
// consecutive samples have unreachable arrival regions or no mass is left.
GoalChoice select_goal(const SemanticMap& map, const SemanticPolicy& policy, const CostField& field,
                       const ArrivalField& arrival, const GoalQuery& query, Rng& rng);

}  // namespace ecl
