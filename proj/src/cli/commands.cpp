#include "ecl/cli/commands.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "ecl/common/error.hpp"
#include "ecl/common/io.hpp"
#include "ecl/common/rng.hpp"
#include "ecl/eval/expert_length.hpp"
#include "ecl/executor/expert.hpp"
#include "ecl/executor/tasks.hpp"

namespace ecl {

namespace fs = std::filesystem;

std::string Warnings::to_json(const std::string& command) const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["warnings"] = count();
  j["messages"] = messages;
  return j.dump(2) + "\n";
}

void Model::save(const fs::path& dir, const Catalog& catalog, uint64_t config_hash) const {
  write_file_atomic(dir / "projection.json", projection.to_json(hex64(config_hash)));
  write_file_atomic(dir / "embeddings.json", embeddings.to_json(catalog));
  write_file_atomic(dir / "policy.json", policy.to_json());
}

Model Model::load(const fs::path& dir, const Catalog& catalog) {
  Model m;
  m.projection = Projection::from_json(read_file(dir / "projection.json"));
  m.embeddings = EmbeddingSet::from_json(read_file(dir / "embeddings.json"), catalog);
  m.policy = SemanticPolicy::from_json(read_file(dir / "policy.json"));
  return m;
}

fs::path scene_file_name(Split split, int index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03d.world", split_name(split), index);
  return buf;
}

std::vector<fs::path> list_files(const fs::path& dir, const std::string& extension) {
  if (!fs::is_directory(dir)) throw InputError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == extension) out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

GridWorld make_scene(const Pipeline& p, Split split, int index, Warnings& warnings) {
  const uint64_t base = derive_seed(p.config.seed, std::string("scene-") + split_name(split), index);
  const std::string name = scene_file_name(split, index).stem().string();
  std::string last;
  for (int attempt = 0; attempt < p.config.placement_attempts; ++attempt) {
    const uint64_t seed = attempt == 0 ? base : derive_seed(base, "attempt", static_cast<uint64_t>(attempt));
    try {
      GridWorld w = generate_scene(p.scene_spec, seed);
      if (attempt > 0)
        warnings.add(name + ": reseeded " + std::to_string(attempt) + "x after placement failure (" + last + ")");
      return w;
    } catch (const PlacementError& e) {
      last = e.class_name();
    }
  }
  throw PlacementError(last, name + ": no placement after " + std::to_string(p.config.placement_attempts) +
                                 " attempts (last failing class " + last + ")");
}

std::vector<fs::path> cmd_gen_scenes(const Pipeline& p, const fs::path& out_dir, std::optional<Split> split,
                                     std::optional<int> count, Warnings& warnings) {
  std::vector<fs::path> written;
  std::map<uint64_t, std::string> hashes;
  for (Split s : {Split::Seen, Split::Unseen}) {
    if (split && *split != s) continue;
    const int n = count.value_or(p.config.scene_count(s));
    for (int i = 0; i < n; ++i) {
      const GridWorld w = make_scene(p, s, i, warnings);
      std::string text = serialize_world(w);
      const fs::path name = scene_file_name(s, i);
      // Scene contents never repeat, across splits included.
      const auto [it, fresh] = hashes.emplace(fnv1a(text), name.string());
      if (!fresh) throw PlacementError("", name.string() + " duplicates " + it->second);
      write_file_atomic(out_dir / name, text);
      written.push_back(out_dir / name);
    }
  }
  return written;
}

namespace {

GridWorld load_scene(const Pipeline& p, const fs::path& path) {
  GridWorld w = parse_world(read_file(path));
  if (w.catalog() != *p.catalog) throw ConfigError(path.string() + " was generated with a different catalog");
  return w;
}

Perception perception_for(const Pipeline& p, const Model* model, const ExecutorConfig& cfg) {
  Perception per{&p.features, nullptr, nullptr};
  if (!cfg.oracle_semantics) {
    if (!model) throw ConfigError("learned semantics need a trained model (--model)");
    per.projection = &model->projection;
    per.embeddings = &model->embeddings;
  }
  return per;
}

}  // namespace

std::vector<fs::path> cmd_gen_demos(const Pipeline& p, const std::vector<fs::path>& scenes, const fs::path& out_dir,
                                    Warnings& warnings) {
  std::vector<fs::path> written;
  if (!scenes.empty()) fs::create_directories(out_dir);
  for (const auto& path : scenes) {
    const GridWorld world = load_scene(p, path);
    const std::string stem = path.stem().string();
    Rng rng(derive_seed(p.config.seed, "demo-tasks:" + stem));
    for (TaskType t : kAllTaskTypes) {
      const auto task = sample_task(world, p.grammar, t, p.config.allow_sliced, rng);
      if (!task) continue;
      ExpertPlan plan;
      try {
        plan = plan_expert(world, task->program);
      } catch (const UnreachableError& e) {
        warnings.add(stem + ": skipped '" + task->instruction + "': " + e.what());
        continue;
      }
      const Demonstration demo =
          record_demonstration(world, plan, p.features, p.demo_sensor(), stem, task->instruction);
      const fs::path out = out_dir / (stem + "_" + task_type_name(t) + ".demo");
      write_file_atomic(out, demo.serialize(*p.catalog));
      written.push_back(out);
    }
  }
  return written;
}

TrainOutput cmd_train(const Pipeline& p, const std::vector<fs::path>& demo_files, const fs::path& scene_dir,
                      const fs::path& out_dir, Warnings& warnings) {
  if (p.embeddings.dim() != p.config.embedding_dim) throw ConfigError("embedding dimension mismatch");
  struct Loaded {
    GridWorld world;
    Demonstration demo;
    DemoTrace trace;
  };
  std::vector<Loaded> loaded;
  std::map<std::string, GridWorld> worlds;
  std::vector<fs::path> sorted = demo_files;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& path : sorted) {
    Demonstration demo = Demonstration::parse(read_file(path), *p.catalog);
    auto it = worlds.find(demo.scene);
    if (it == worlds.end()) it = worlds.emplace(demo.scene, load_scene(p, scene_dir / (demo.scene + ".world"))).first;
    DemoTrace trace = replay(it->second, demo, p.features, p.demo_sensor());
    loaded.push_back({it->second, std::move(demo), std::move(trace)});
  }
  if (loaded.empty()) throw InputError("no demonstrations to train on");

  std::vector<DemoTrace> traces;
  ValidationSet validation;
  for (const auto& l : loaded) {
    traces.push_back(l.trace);
    // The first frame of every demo doubles as a report-only validation set.
    for (const auto& prop : l.trace.frames.front().proposals) {
      validation.features.push_back(prop.feature);
      validation.truth.push_back(l.world.object(prop.object_id).class_id);
    }
  }
  const FrameCollection frames = collect_training_frames(traces, derive_seed(p.config.seed, "frames"));
  if (frames.skipped_demos > 0)
    warnings.add(std::to_string(frames.skipped_demos) + " demonstrations carry no subgoal completions");
  TrainResult trained = train(frames.samples, p.embeddings, p.config.visual_dim, p.config.train, &validation);

  TrainOutput out;
  out.samples = static_cast<int>(frames.samples.size());
  out.trace = trained.trace;
  out.model.projection = std::move(trained.projection);
  out.model.embeddings = p.embeddings;

  // Semantic policy: maps of the demonstrations as the learned labels see them.
  const ExecutorConfig cfg = p.executor_config();
  ExecutorConfig learned = cfg;
  learned.oracle_semantics = false;
  const Perception per{&p.features, &out.model.projection, &out.model.embeddings};
  std::vector<SemanticMap> maps;
  for (const auto& l : loaded) {
    if (l.world.width() != p.config.width || l.world.height() != p.config.height)
      throw ConfigError("demo scene " + l.demo.scene + " does not share the configured frame");
    GridWorld w = l.world;
    SemanticMap map(w.width(), w.height(), p.catalog->size(), p.catalog->background(), cfg.map);
    for (size_t i = 0; i < l.trace.frames.size(); ++i) {
      if (i > 0) apply_action(w, l.demo.steps[i - 1].action);
      const Observation& obs = l.trace.frames[i];
      const auto labels = label_observation(obs, w, per, learned);
      fuse(map, project_observation(obs, w.agent(), labels, map));
    }
    maps.push_back(std::move(map));
  }
  out.model.policy = build_semantic_policy(maps);

  out.model.save(out_dir, *p.catalog, p.config.hash());
  write_file_atomic(out_dir / "loss_trace.txt", loss_trace_text(out.trace));
  return out;
}

std::vector<EpisodeSpec> parse_episode_list(const std::string& text) {
  std::vector<EpisodeSpec> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
      throw FormatError("episode list line " + std::to_string(lineno) + ": expected scene<TAB>instruction");
    out.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  return out;
}

namespace {

std::string trajectory_text(const EpisodeResult& r, const EpisodeRun& run, const Catalog& catalog) {
  std::ostringstream out;
  out << "# ecl-trajectory v1\n";
  out << "id " << r.id << "\n";
  out << "instruction " << r.instruction << "\n";
  out << "steps " << run.actions.size() << "\n";
  for (size_t i = 0; i < run.actions.size(); ++i) {
    const AgentPose& pose = run.poses[i + 1];
    out << run.actions[i].to_string() << ' ' << pose.cell.x << ' ' << pose.cell.y << ' '
        << heading_char(pose.heading) << "\n";
  }
  out << "subtasks " << run.subtasks.size() << "\n";
  for (const auto& s : run.subtasks) out << s.subtask << ' ' << (s.completed ? s.step : -1) << "\n";
  out << "map\n" << run.map.bev_digest(catalog);
  return out.str();
}

}  // namespace

std::vector<EpisodeResult> cmd_run(const Pipeline& p, const std::vector<fs::path>& scenes,
                                   const std::optional<std::vector<EpisodeSpec>>& episodes, const Model* model,
                                   Split split, const fs::path& out_file, Warnings& warnings,
                                   const fs::path& trajectory_dir) {
  const ExecutorConfig base = p.executor_config();
  const Perception per = perception_for(p, model, base);
  SemanticPolicy fallback;
  const SemanticPolicy* policy = model ? &model->policy : nullptr;
  if (!policy) {
    fallback = uniform_policy(p.config.width, p.config.height, p.catalog->size());
    policy = &fallback;
    if (base.goal_policy == GoalPolicyMode::Semantic) warnings.add("no model given: exploring with a uniform prior");
  }

  std::set<std::string> known;
  for (const auto& s : scenes) known.insert(s.stem().string());
  if (episodes)
    for (const auto& e : *episodes)
      if (!known.count(e.scene)) warnings.add("episode names unknown scene '" + e.scene + "'");

  std::vector<EpisodeResult> results;
  for (const auto& path : scenes) {
    const std::string stem = path.stem().string();
    std::vector<std::pair<std::string, std::optional<Program>>> tasks;
    if (episodes) {
      for (const auto& e : *episodes)
        if (e.scene == stem) tasks.push_back({e.instruction, std::nullopt});
      if (tasks.empty()) continue;
    }
    const GridWorld world = load_scene(p, path);
    if (!episodes) {
      Rng rng(derive_seed(p.config.seed, "run-tasks:" + stem));
      for (TaskType t : kAllTaskTypes)
        if (auto task = sample_task(world, p.grammar, t, p.config.allow_sliced, rng))
          tasks.push_back({task->instruction, task->program});
    }
    for (size_t k = 0; k < tasks.size(); ++k) {
      const std::string id = stem + "#" + std::to_string(k);
      const std::string& text = tasks[k].first;
      Program program;
      try {
        program = tasks[k].second ? *tasks[k].second : parse(Instruction{text, std::nullopt}, p.grammar, *p.catalog);
      } catch (const Error& e) {
        warnings.add(id + ": skipped '" + text + "': " + e.what());
        continue;
      }
      int expert = 0;
      try {
        expert = expert_path_length(world, program);
      } catch (const UnreachableError& e) {
        warnings.add(id + ": skipped '" + text + "': expert cannot complete it: " + e.what());
        continue;
      }
      ExecutorConfig cfg = base;
      cfg.seed = derive_seed(p.config.seed, "executor:" + stem, k);
      const EpisodeRun run = run_episode(world, program, per, *policy, cfg);
      EpisodeResult r;
      r.id = id;
      r.scene = stem;
      r.instruction = text;
      r.task_type = program.task_type;
      r.split = split;
      r.success = run.success;
      r.goal_conditions_met = run.goals.met;
      r.goal_conditions_total = run.goals.total;
      r.agent_path_length = run.path_length;
      r.expert_path_length = expert;
      r.error = run.error;
      r.validate();
      if (!trajectory_dir.empty())
        write_file_atomic(trajectory_dir / (stem + "_" + std::to_string(k) + ".traj"),
                          trajectory_text(r, run, *p.catalog));
      results.push_back(std::move(r));
    }
  }
  write_file_atomic(out_file, results_to_jsonl(results));
  return results;
}

MetricsReport cmd_eval(const std::vector<fs::path>& result_files, const fs::path& out_dir, Warnings& warnings) {
  std::vector<EpisodeResult> all;
  for (const auto& f : result_files) {
    auto part = results_from_jsonl(read_file(f));
    all.insert(all.end(), part.begin(), part.end());
  }
  const MetricsReport report = aggregate(all);
  if (report.excluded_zero_expert > 0)
    warnings.add(std::to_string(report.excluded_zero_expert) + " episodes excluded for zero expert path length");
  write_file_atomic(out_dir / "metrics.json", report.to_json());
  write_file_atomic(out_dir / "metrics.txt", report.to_table());
  return report;
}

std::vector<ReasoningRecord> cmd_reason(const Pipeline& p, const std::vector<fs::path>& scenes, const Model* model,
                                        const std::optional<std::vector<ReasoningQuery>>& queries,
                                        const fs::path& out_dir, Warnings& warnings) {
  ExecutorConfig cfg = p.executor_config();
  cfg.budget = p.config.explore_budget;
  const Perception per = perception_for(p, model, cfg);
  std::vector<ClassId> pool;
  for (ClassId c : p.catalog->object_classes())
    if ((*p.catalog)[c].pickupable) pool.push_back(c);

  std::set<std::string> known;
  for (const auto& s : scenes) known.insert(s.stem().string());
  if (queries)
    for (const auto& q : *queries)
      if (!known.count(q.scene)) warnings.add("query names unknown scene '" + q.scene + "'");

  std::vector<ReasoningRecord> records;
  std::vector<ReasoningQuery> asked;
  for (const auto& path : scenes) {
    const std::string stem = path.stem().string();
    std::vector<ReasoningQuery> mine;
    const GridWorld world = load_scene(p, path);
    if (queries) {
      for (const auto& q : *queries)
        if (q.scene == stem) mine.push_back(q);
    } else {
      Rng rng(derive_seed(p.config.seed, "queries:" + stem));
      mine = sample_queries(world, stem, pool, p.config.exist_queries, p.config.count_queries, p.config.max_count,
                            rng);
    }
    if (mine.empty()) continue;
    ExecutorConfig scene_cfg = cfg;
    scene_cfg.seed = derive_seed(p.config.seed, "explore:" + stem);
    const SemanticMap map = explore_scene(world, per, scene_cfg);
    for (const auto& q : mine) {
      records.push_back({q, reason(map, q, p.config.min_component)});
      asked.push_back(q);
    }
  }
  write_file_atomic(out_dir / "queries.jsonl", queries_to_jsonl(asked, *p.catalog));
  write_file_atomic(out_dir / "reasoning.jsonl", reasoning_to_jsonl(records, *p.catalog));
  write_file_atomic(out_dir / "reasoning_summary.json", summarize(records).to_json());
  return records;
}

}  // namespace ecl
