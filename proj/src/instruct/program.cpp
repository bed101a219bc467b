#include "ecl/instruct/program.hpp"

#include <algorithm>

#include "ecl/common/error.hpp"

namespace ecl {

namespace {
constexpr const char* kTaskNames[] = {"Examine",      "PickAndPlace", "StackAndPlace",
                                      "CleanAndPlace", "CoolAndPlace", "HeatAndPlace",
                                      "PickTwoAndPlace"};
}

const char* task_type_name(TaskType t) { return kTaskNames[static_cast<int>(t)]; }

TaskType parse_task_type(const std::string& name) {
  for (TaskType t : kAllTaskTypes)
    if (name == task_type_name(t)) return t;
  throw FormatError("unknown task type '" + name + "'");
}

const char* subtask_action_name(SubtaskAction a) {
  switch (a) {
    case SubtaskAction::GotoLocation: return "GotoLocation";
    case SubtaskAction::PickupObject: return "PickupObject";
    case SubtaskAction::PutObject: return "PutObject";
    case SubtaskAction::SliceObject: return "SliceObject";
    case SubtaskAction::ToggleObject: return "ToggleObject";
  }
  return "?";
}

std::string Subtask::to_string(const Catalog& catalog) const {
  std::string s = "(";
  s += subtask_action_name(action);
  if (action == SubtaskAction::ToggleObject) s += toggle_on ? "On" : "Off";
  s += ", " + catalog[target_class].name + ")";
  return s;
}

void validate_program(const Program& program, const Catalog& catalog) {
  auto fail = [](const std::string& why) { throw InputError("illegal program: " + why); };
  if (!catalog.valid(program.args.obj) || !catalog.valid(program.args.recep))
    fail("obj/recep are not catalog classes");
  if (program.args.parent && !catalog.valid(*program.args.parent)) fail("parent is not a catalog class");
  if (program.subtasks.empty()) fail("no subtasks");
  std::vector<ClassId> visited;
  ClassId holding = -1;
  for (const auto& st : program.subtasks) {
    if (!catalog.valid(st.target_class) || st.target_class == catalog.background())
      fail("subtask targets an invalid class");
    const auto& name = catalog[st.target_class].name;
    switch (st.action) {
      case SubtaskAction::GotoLocation:
        visited.push_back(st.target_class);
        break;
      case SubtaskAction::PickupObject:
        if (std::find(visited.begin(), visited.end(), st.target_class) == visited.end())
          fail("pickup of " + name + " without a preceding goto");
        if (holding >= 0) fail("pickup of " + name + " while holding");
        holding = st.target_class;
        break;
      case SubtaskAction::PutObject:
        if (holding < 0) fail("put on " + name + " with empty hands");
        holding = -1;
        break;
      case SubtaskAction::SliceObject:
        if (holding < 0 || !catalog[holding].cutter) fail("slice without holding a cutter");
        break;
      case SubtaskAction::ToggleObject:
        break;
    }
  }
  const auto last = program.subtasks.back().action;
  if (last != SubtaskAction::PutObject && last != SubtaskAction::ToggleObject)
    fail("program does not end in a place or examine terminal");
}

}  // namespace ecl
