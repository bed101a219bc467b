#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecl/executor/executor.hpp"
#include "ecl/instruct/program.hpp"

namespace ecl {

enum class Split { Seen, Unseen };
const char* split_name(Split s);
Split parse_split(const std::string& name);

struct EpisodeResult {
  std::string id;
  std::string scene;
  std::string instruction;
  TaskType task_type = TaskType::PickAndPlace;
  Split split = Split::Seen;
  bool success = false;
  int goal_conditions_met = 0;
  int goal_conditions_total = 0;
  int agent_path_length = 0;
  int expert_path_length = 0;
  std::optional<ErrorMode> error;

  // Throws InputError when met > total, a length is negative, or a success
  // leaves conditions unmet.
  void validate() const;

  friend bool operator==(const EpisodeResult&, const EpisodeResult&) = default;
};

// One JSON object per line, fixed key order.
std::string results_to_jsonl(const std::vector<EpisodeResult>& results);
std::vector<EpisodeResult> results_from_jsonl(std::string_view text);

// Path-length weight expert / max(expert, agent).
double path_weight(int expert, int agent);

struct MetricsRow {
  int episodes = 0;
  double sr = 0.0;
  double gc = 0.0;
  double plwsr = 0.0;
  double plwgc = 0.0;
};

struct MetricsReport {
  MetricsRow overall;
  std::map<std::string, MetricsRow> by_split;      // "seen" / "unseen", present splits only
  std::map<std::string, MetricsRow> by_task_type;  // present task types only
  int failures = 0;
  std::map<std::string, int> error_counts;       // every mode, zero included
  std::map<std::string, double> error_percent;   // share of failures, 0 when none failed
  int excluded_zero_expert = 0;

  std::string to_json() const;
  std::string to_table() const;
};

// Episodes with zero expert length are left out and counted. Throws
// InputError when nothing is left to aggregate.
MetricsReport aggregate(const std::vector<EpisodeResult>& results);

}  // namespace ecl
