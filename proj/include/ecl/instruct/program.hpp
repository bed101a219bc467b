#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ecl/world/catalog.hpp"

namespace ecl {

enum class TaskType {
  Examine,
  PickAndPlace,
  StackAndPlace,
  CleanAndPlace,
  CoolAndPlace,
  HeatAndPlace,
  PickTwoAndPlace,
};

inline constexpr TaskType kAllTaskTypes[] = {
    TaskType::Examine,      TaskType::PickAndPlace, TaskType::StackAndPlace,
    TaskType::CleanAndPlace, TaskType::CoolAndPlace, TaskType::HeatAndPlace,
    TaskType::PickTwoAndPlace};

const char* task_type_name(TaskType t);
TaskType parse_task_type(const std::string& name);

enum class SubtaskAction {
  GotoLocation,
  PickupObject,
  PutObject,
  SliceObject,
  ToggleObject,
};

const char* subtask_action_name(SubtaskAction a);

struct Subtask {
  SubtaskAction action = SubtaskAction::GotoLocation;
  ClassId target_class = -1;
  bool toggle_on = true;  // ToggleObject only

  std::string to_string(const Catalog& catalog) const;

  friend bool operator==(const Subtask&, const Subtask&) = default;
};

struct ProgramArgs {
  ClassId obj = -1;
  ClassId recep = -1;
  bool sliced = false;
  std::optional<ClassId> parent;

  friend bool operator==(const ProgramArgs&, const ProgramArgs&) = default;
};

struct Program {
  TaskType task_type = TaskType::PickAndPlace;
  ProgramArgs args;
  std::vector<Subtask> subtasks;

  friend bool operator==(const Program&, const Program&) = default;
};

// Checks that the subtask sequence is executable in principle: every pickup
// follows a goto of its class, puts and slices happen while holding the
// right thing, and the sequence ends in a place or examine terminal.
// Throws InputError describing the first violation.
void validate_program(const Program& program, const Catalog& catalog);

}  // namespace ecl
