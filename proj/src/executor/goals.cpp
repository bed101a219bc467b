#include "ecl/executor/goals.hpp"

#include <algorithm>

namespace ecl {

namespace {

bool on_class(const GridWorld& w, const ObjectInstance& o, ClassId recep) {
  return o.placed() && o.parent >= 0 && w.object(o.parent).class_id == recep;
}

}  // namespace

GoalConditions evaluate_goal_conditions(const GridWorld& world, const Program& program) {
  const auto& a = program.args;
  GoalConditions g;
  int best = 0;
  auto score = [&](auto&& per_object) {
    for (const auto& o : world.objects())
      if (o.class_id == a.obj) best = std::max(best, per_object(o) + (a.sliced && o.flags.sliced ? 1 : 0));
  };
  switch (program.task_type) {
    case TaskType::Examine: {
      g.total = 2;
      bool lamp_on = false;
      for (const auto& o : world.objects())
        if (world.catalog()[o.class_id].effect == ApplianceEffect::Light && o.flags.toggled_on) lamp_on = true;
      score([&](const ObjectInstance& o) { return o.held_by_agent ? 1 : 0; });
      best += lamp_on ? 1 : 0;
      break;
    }
    case TaskType::PickAndPlace:
      g.total = 1;
      score([&](const ObjectInstance& o) { return on_class(world, o, a.recep) ? 1 : 0; });
      break;
    case TaskType::StackAndPlace:
      g.total = 2;
      score([&](const ObjectInstance& o) {
        if (!o.contained || o.parent < 0 || !a.parent) return 0;
        const auto& p = world.object(o.parent);
        if (p.class_id != *a.parent) return 0;
        return 1 + (on_class(world, p, a.recep) ? 1 : 0);
      });
      break;
    case TaskType::CleanAndPlace:
    case TaskType::HeatAndPlace:
    case TaskType::CoolAndPlace:
      g.total = 2;
      score([&](const ObjectInstance& o) {
        const bool state = program.task_type == TaskType::CleanAndPlace  ? o.flags.clean
                           : program.task_type == TaskType::HeatAndPlace ? o.flags.heated
                                                                         : o.flags.cooled;
        return (state ? 1 : 0) + (on_class(world, o, a.recep) ? 1 : 0);
      });
      break;
    case TaskType::PickTwoAndPlace: {
      g.total = 2;
      int on = 0, sliced = 0;
      for (const auto& o : world.objects()) {
        if (o.class_id != a.obj || !on_class(world, o, a.recep)) continue;
        ++on;
        if (o.flags.sliced) ++sliced;
      }
      best = std::min(on, 2);
      if (a.sliced) best += sliced > 0 ? 1 : 0;
      break;
    }
  }
  if (a.sliced) ++g.total;
  g.met = std::min(best, g.total);
  return g;
}

}  // namespace ecl
