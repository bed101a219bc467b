#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ecl/concept/feature_model.hpp"
#include "ecl/concept/projection.hpp"
#include "ecl/executor/goals.hpp"
#include "ecl/executor/policy.hpp"
#include "ecl/instruct/embedding.hpp"
#include "ecl/map/semantic_map.hpp"
#include "ecl/world/sensor.hpp"

namespace ecl {

enum class ErrorMode { GroundingOrTargetNotFound, InteractionFailure, Collision, BlockingOrNotAccessible, Other };

inline constexpr ErrorMode kAllErrorModes[] = {ErrorMode::GroundingOrTargetNotFound, ErrorMode::InteractionFailure,
                                               ErrorMode::Collision, ErrorMode::BlockingOrNotAccessible,
                                               ErrorMode::Other};

const char* error_mode_name(ErrorMode m);
ErrorMode parse_error_mode(const std::string& name);

enum class FusionMode { Bayes, Max };
const char* fusion_mode_name(FusionMode m);
FusionMode parse_fusion_mode(const std::string& name);

enum class GoalPolicyMode { Semantic, Uniform };

struct ExecutorConfig {
  int budget = 400;
  bool initial_scan = true;
  int max_interaction_failures = 3;
  int goal_resamples = 8;
  int inflation_radius = 0;
  int collision_limit = 10;  // collisions per episode before giving up
  bool oracle_semantics = false;
  FusionMode fusion = FusionMode::Bayes;
  // Uniform: exploration goals drawn uniformly over the grid, the map is
  // never consulted for goals (baseline).
  GoalPolicyMode goal_policy = GoalPolicyMode::Semantic;
  // Per-step probability that a frame arrives with confident wrong labels
  // and depth variances inflated by corruption_variance_scale.
  double corruption_prob = 0.0;
  double corruption_variance_scale = 100.0;
  double temperature = 0.1;
  uint64_t seed = 0;
  MapConfig map;
  SensorConfig sensor;
};

// What the agent perceives with: the simulator's feature model, and the
// learned projection plus word embeddings unless semantics are oracle.
struct Perception {
  const FeatureModel* features = nullptr;
  const Projection* projection = nullptr;
  const EmbeddingSet* embeddings = nullptr;
};

struct SubtaskRecord {
  std::string subtask;
  bool completed = false;
  int step = 0;  // step count when it completed
};

struct EpisodeRun {
  bool success = false;
  GoalConditions goals;
  int path_length = 0;  // MoveAhead plus interaction actions
  int steps = 0;        // every action, rotations included
  std::optional<ErrorMode> error;
  std::string error_detail;
  std::vector<SubtaskRecord> subtasks;
  std::vector<Action> actions;
  std::vector<AgentPose> poses;  // pose after each action, poses[0] the start
  SemanticMap map;
  GridWorld final_world;
};

// Observe, label, fuse; head for the current subtask's goal or interact
// when there. Terminates on completion, budget exhaustion or an
// unrecoverable failure, which is classified as:
//   planner finds no reachable goal        BlockingOrNotAccessible
//   interaction failures reach the limit   InteractionFailure
//   collision limit reached                Collision
//   budget spent, target never on the map  GroundingOrTargetNotFound
//   anything else                          Other
EpisodeRun run_episode(const GridWorld& world, const Program& program, const Perception& perception,
                       const SemanticPolicy& policy, const ExecutorConfig& config);

// Frontier exploration with 360-degree scans at each frontier, for
// reasoning queries. Stops when no reachable frontier is left or the budget
// is spent.
SemanticMap explore_scene(const GridWorld& world, const Perception& perception, const ExecutorConfig& config);

// Labels for the proposals of one observation (oracle or learned).
std::vector<SoftLabel> label_observation(const Observation& obs, const GridWorld& world,
                                         const Perception& perception, const ExecutorConfig& config);

}  // namespace ecl
