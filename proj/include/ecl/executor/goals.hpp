#pragma once

#include "ecl/instruct/program.hpp"
#include "ecl/world/world.hpp"

namespace ecl {

struct GoalConditions {
  int met = 0;
  int total = 0;
  bool satisfied() const { return met == total; }
};

// Goal conditions of a task type, checked on a final world state:
//   Examine          holding obj, a light toggled on
//   PickAndPlace     obj on recep
//   StackAndPlace    obj in parent, parent on recep
//   Clean/Heat/Cool  obj cleaned/heated/cooled, obj on recep
//   PickTwoAndPlace  two distinct obj instances on recep
// A sliced task adds "obj sliced". Conditions about obj are scored on the
// single instance that meets the most of them.
GoalConditions evaluate_goal_conditions(const GridWorld& world, const Program& program);

}  // namespace ecl
