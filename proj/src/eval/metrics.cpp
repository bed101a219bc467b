#include "ecl/eval/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ecl/common/error.hpp"

namespace ecl {

using nlohmann::ordered_json;

const char* split_name(Split s) { return s == Split::Seen ? "seen" : "unseen"; }

Split parse_split(const std::string& name) {
  if (name == "seen") return Split::Seen;
  if (name == "unseen") return Split::Unseen;
  throw ConfigError("unknown split '" + name + "' (expected seen|unseen)");
}

void EpisodeResult::validate() const {
  if (goal_conditions_met < 0 || goal_conditions_total < 0 || goal_conditions_met > goal_conditions_total)
    throw InputError("episode " + id + ": goal conditions " + std::to_string(goal_conditions_met) + "/" +
                     std::to_string(goal_conditions_total));
  if (agent_path_length < 0 || expert_path_length < 0) throw InputError("episode " + id + ": negative path length");
  if (success && goal_conditions_met != goal_conditions_total)
    throw InputError("episode " + id + ": success with unmet goal conditions");
  if (success && error) throw InputError("episode " + id + ": success with an error mode");
}

std::string results_to_jsonl(const std::vector<EpisodeResult>& results) {
  std::string out;
  for (const auto& r : results) {
    ordered_json j;
    j["id"] = r.id;
    j["scene"] = r.scene;
    j["instruction"] = r.instruction;
    j["task_type"] = task_type_name(r.task_type);
    j["split"] = split_name(r.split);
    j["success"] = r.success;
    j["gc_met"] = r.goal_conditions_met;
    j["gc_total"] = r.goal_conditions_total;
    j["agent_path_length"] = r.agent_path_length;
    j["expert_path_length"] = r.expert_path_length;
    j["error"] = r.error ? ordered_json(error_mode_name(*r.error)) : ordered_json(nullptr);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<EpisodeResult> results_from_jsonl(std::string_view text) {
  std::vector<EpisodeResult> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      EpisodeResult r;
      r.id = j.at("id").get<std::string>();
      r.scene = j.at("scene").get<std::string>();
      r.instruction = j.at("instruction").get<std::string>();
      r.task_type = parse_task_type(j.at("task_type").get<std::string>());
      r.split = parse_split(j.at("split").get<std::string>());
      r.success = j.at("success").get<bool>();
      r.goal_conditions_met = j.at("gc_met").get<int>();
      r.goal_conditions_total = j.at("gc_total").get<int>();
      r.agent_path_length = j.at("agent_path_length").get<int>();
      r.expert_path_length = j.at("expert_path_length").get<int>();
      if (!j.at("error").is_null()) r.error = parse_error_mode(j.at("error").get<std::string>());
      r.validate();
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("results line " + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      throw FormatError("results line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

double path_weight(int expert, int agent) {
  const int denom = std::max(expert, agent);
  return denom > 0 ? static_cast<double>(expert) / denom : 0.0;
}

namespace {

struct Accumulator {
  int n = 0;
  double success = 0, ratio = 0, wsuccess = 0, wratio = 0;

  void add(const EpisodeResult& r) {
    const double s = r.success ? 1.0 : 0.0;
    const double g =
        r.goal_conditions_total > 0 ? static_cast<double>(r.goal_conditions_met) / r.goal_conditions_total : s;
    const double w = path_weight(r.expert_path_length, r.agent_path_length);
    ++n;
    success += s;
    ratio += g;
    wsuccess += s * w;
    wratio += g * w;
  }

  MetricsRow row() const {
    MetricsRow m;
    m.episodes = n;
    if (n == 0) return m;
    m.sr = success / n;
    m.gc = ratio / n;
    m.plwsr = wsuccess / n;
    m.plwgc = wratio / n;
    return m;
  }
};

ordered_json row_json(const MetricsRow& r) {
  ordered_json j;
  j["episodes"] = r.episodes;
  j["sr"] = r.sr;
  j["gc"] = r.gc;
  j["plwsr"] = r.plwsr;
  j["plwgc"] = r.plwgc;
  return j;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

std::string pad(const std::string& s, size_t width, bool left = false) {
  if (s.size() >= width) return s;
  return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

void table_row(std::ostringstream& out, const std::string& name, const MetricsRow& r) {
  out << pad(name, 18, true) << pad(std::to_string(r.episodes), 9) << pad(pct(r.sr), 9) << pad(pct(r.gc), 9)
      << pad(pct(r.plwsr), 9) << pad(pct(r.plwgc), 9) << '\n';
}

}  // namespace

MetricsReport aggregate(const std::vector<EpisodeResult>& results) {
  MetricsReport report;
  Accumulator all;
  std::map<std::string, Accumulator> splits, types;
  for (ErrorMode m : kAllErrorModes) report.error_counts[error_mode_name(m)] = 0;
  for (const auto& r : results) {
    r.validate();
    if (r.expert_path_length == 0) {
      ++report.excluded_zero_expert;
      continue;
    }
    all.add(r);
    splits[split_name(r.split)].add(r);
    types[task_type_name(r.task_type)].add(r);
    if (!r.success) {
      ++report.failures;
      report.error_counts[error_mode_name(r.error.value_or(ErrorMode::Other))]++;
    }
  }
  if (all.n == 0) throw InputError("no episodes to aggregate");
  report.overall = all.row();
  for (const auto& [k, a] : splits) report.by_split[k] = a.row();
  for (const auto& [k, a] : types) report.by_task_type[k] = a.row();
  for (const auto& [k, c] : report.error_counts)
    report.error_percent[k] = report.failures > 0 ? 100.0 * c / report.failures : 0.0;
  return report;
}

std::string MetricsReport::to_json() const {
  ordered_json j;
  j["format"] = "ecl-metrics v1";
  j["overall"] = row_json(overall);
  ordered_json s = ordered_json::object();
  for (const auto& [k, r] : by_split) s[k] = row_json(r);
  j["by_split"] = s;
  ordered_json t = ordered_json::object();
  for (TaskType type : kAllTaskTypes)
    if (auto it = by_task_type.find(task_type_name(type)); it != by_task_type.end()) t[it->first] = row_json(it->second);
  j["by_task_type"] = t;
  ordered_json e;
  e["failures"] = failures;
  ordered_json counts, shares;
  for (ErrorMode m : kAllErrorModes) {
    counts[error_mode_name(m)] = error_counts.at(error_mode_name(m));
    shares[error_mode_name(m)] = error_percent.at(error_mode_name(m));
  }
  e["counts"] = counts;
  e["percent"] = shares;
  j["errors"] = e;
  j["excluded_zero_expert"] = excluded_zero_expert;
  return j.dump(2) + "\n";
}

std::string MetricsReport::to_table() const {
  std::ostringstream out;
  const std::string header = pad("", 18, true) + pad("episodes", 9) + pad("SR", 9) + pad("GC", 9) +
                             pad("PLWSR", 9) + pad("PLWGC", 9) + '\n';
  out << header;
  for (const auto& [k, r] : by_split) table_row(out, k, r);
  table_row(out, "all", overall);
  out << '\n' << header;
  for (TaskType type : kAllTaskTypes)
    if (auto it = by_task_type.find(task_type_name(type)); it != by_task_type.end())
      table_row(out, it->first, it->second);
  out << '\n' << pad("error mode", 28, true) << pad("count", 7) << pad("%", 9) << '\n';
  for (ErrorMode m : kAllErrorModes) {
    const std::string name = error_mode_name(m);
    out << pad(name, 28, true) << pad(std::to_string(error_counts.at(name)), 7)
        << pad(pct(error_percent.at(name) / 100.0), 9) << '\n';
  }
  out << pad("failures", 28, true) << pad(std::to_string(failures), 7) << '\n';
  if (excluded_zero_expert > 0) out << "excluded (zero expert length): " << excluded_zero_expert << '\n';
  return out.str();
}

}  // namespace ecl
