#pragma once

#include <optional>
#include <string>

#include "ecl/common/rng.hpp"
#include "ecl/instruct/grammar.hpp"
#include "ecl/world/world.hpp"

namespace ecl {

struct TaskInstance {
  std::string instruction;
  Program program;
};

// Draws an instruction of the given type whose classes are present in the
// scene in the numbers the task needs (two instances for PickTwo, the
// appliance for Clean/Heat/Cool, a knife and a countertop when sliced).
// Returns nullopt when the scene supports no such instruction.
std::optional<TaskInstance> sample_task(const GridWorld& world, const Grammar& grammar, TaskType type,
                                        bool allow_sliced, Rng& rng);

}  // namespace ecl
