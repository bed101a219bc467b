#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ecl/concept/frames.hpp"
#include "ecl/instruct/program.hpp"
#include "ecl/world/sensor.hpp"

namespace ecl {

struct DemoStep {
  Action action;
  StepOutcome outcome = StepOutcome::Ok;
  std::string digest;  // observation digest after the action
};

// Recorded expert trajectory with the annotations the learner may use.
struct Demonstration {
  std::string scene;
  std::string instruction;
  std::string initial_digest;
  std::vector<DemoStep> steps;
  std::vector<DemoTrace::Completion> completions;
  std::vector<DemoTrace::HeldInterval> held;

  std::string serialize(const Catalog& catalog) const;
  static Demonstration parse(std::string_view text, const Catalog& catalog);
};

// Object words a subtask mentions: the target, plus the held object for a
// Put and the cutter for a Slice.
std::vector<ClassId> mentioned_classes(const Subtask& subtask, ClassId held_class, const Catalog& catalog);

struct ExpertPlan {
  std::vector<Action> actions;
  std::vector<DemoTrace::Completion> completions;
  std::vector<DemoTrace::HeldInterval> held;
  GridWorld final_world;
  // MoveAhead plus interaction actions; rotations are free.
  int path_length = 0;
};

// Privileged planner: ground-truth obstacles and object locations, FMM
// navigation to the nearest suitable instance, facing the target before
// each interaction. Throws UnreachableError when the program cannot be
// carried out in this world.
ExpertPlan plan_expert(const GridWorld& world, const Program& program);

Demonstration record_demonstration(const GridWorld& world, const ExpertPlan& plan, const FeatureModel& features,
                                   const SensorConfig& sensor, std::string scene, std::string instruction);

// Re-runs the actions in the simulator, checks every outcome and digest and
// returns the observation stream. Throws FormatError on divergence.
DemoTrace replay(const GridWorld& world, const Demonstration& demo, const FeatureModel& features,
                 const SensorConfig& sensor, GridWorld* final_world = nullptr);

}  // namespace ecl
