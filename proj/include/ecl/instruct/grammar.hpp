#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecl/instruct/program.hpp"

namespace ecl {

struct Instruction {
  std::string text;
  std::optional<TaskType> task_type;  // when set, must agree with the parse
};

// One surface template, e.g. "put a clean {obj} on the {recep}".
struct Production {
  TaskType task_type = TaskType::PickAndPlace;
  bool sliced = false;
  std::vector<std::string> tokens;  // literals or "{obj}", "{recep}", "{parent}"
  std::string text() const;
};

// Canonical subtask step before slot substitution; the target is either a
// slot name ("obj", "recep", "parent") or a catalog class name.
struct ExpansionStep {
  SubtaskAction action = SubtaskAction::GotoLocation;
  bool toggle_on = true;
  std::string target;
};

// Versioned production-rule file: surface templates, fixed slot bindings,
// canonical expansions per task type and the slicing prefix.
class Grammar {
 public:
  static Grammar parse(std::string_view text);
  static Grammar load(const std::filesystem::path& path);

  const std::vector<Production>& productions() const { return productions_; }
  const std::vector<ExpansionStep>& expansion(TaskType t) const;
  const std::vector<ExpansionStep>& sliced_prefix() const { return sliced_prefix_; }
  // Slot values fixed by the task type (e.g. Examine binds recep=FloorLamp).
  std::map<std::string, std::string> fixed_slots(TaskType t) const;

  // Classes admissible in a slot for a production.
  std::vector<ClassId> slot_domain(const Production& p, const std::string& slot,
                                   const Catalog& catalog) const;

 private:
  std::vector<Production> productions_;
  std::map<TaskType, std::vector<ExpansionStep>> expansions_;
  std::map<TaskType, std::map<std::string, std::string>> fixed_;
  std::vector<ExpansionStep> sliced_prefix_;
};

// Compiles a templated goal into its canonical program. Throws
// UnknownConceptError for a class word missing from the catalog,
// AmbiguityError when several productions accept the text, and InputError
// when none does.
Program parse(const Instruction& instruction, const Grammar& grammar, const Catalog& catalog);

// Canonical surface text of a program; parse(render(p)) == p.
std::string render(const Program& program, const Grammar& grammar, const Catalog& catalog);

// Every instruction the grammar can produce over the catalog.
std::vector<std::string> enumerate_instructions(const Grammar& grammar, const Catalog& catalog);

}  // namespace ecl
