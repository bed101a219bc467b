// ecl: scene/demo generation, concept training, episode execution,
// evaluation and concept reasoning.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "ecl/cli/commands.hpp"
#include "ecl/common/error.hpp"
#include "ecl/common/io.hpp"

namespace fs = std::filesystem;
using namespace ecl;

namespace {

struct Options {
  std::string config;
  std::optional<uint64_t> seed;
  std::string out = ".";
  std::string split;
  bool oracle_semantics = false;
  bool oracle_depth = false;
  std::string fusion;
  std::string embedding;

  std::string scenes;
  std::string demos;
  std::string model;
  std::string episodes;
  std::string queries;
  std::string trajectories;
  std::optional<int> count;
  std::vector<std::string> results;
};

RunConfig load_config(const Options& o) {
  std::string path = o.config;
  if (path.empty())
    if (const char* env = std::getenv(kConfigEnv)) path = env;
  if (path.empty()) path = ECL_DEFAULT_CONFIG;
  RunConfig c = RunConfig::load(path);
  if (o.seed) c.reseed(*o.seed);
  if (o.oracle_semantics) c.executor.oracle_semantics = true;
  if (o.oracle_depth) c.oracle_depth = true;
  if (!o.fusion.empty()) c.executor.fusion = parse_fusion_mode(o.fusion);
  if (!o.embedding.empty()) c.embedding = parse_embedding_structure(o.embedding);
  return c;
}

std::vector<fs::path> scenes_of(const Options& o, std::optional<Split> split) {
  if (o.scenes.empty()) throw ConfigError("--scenes is required");
  auto all = list_files(o.scenes, ".world");
  if (!split) return all;
  const std::string prefix = std::string(split_name(*split)) + "_";
  std::erase_if(all, [&](const fs::path& p) { return !p.filename().string().starts_with(prefix); });
  return all;
}

std::optional<Split> split_of(const Options& o) {
  if (o.split.empty()) return std::nullopt;
  return parse_split(o.split);
}

void finish(const std::string& command, const Options& o, const Warnings& w) {
  write_file_atomic(fs::path(o.out) / ("warnings_" + command + ".json"), w.to_json(command));
  for (const auto& m : w.messages) std::cerr << "warning: " << m << "\n";
  std::cerr << command << ": " << w.count() << " warning(s)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Embodied concept learner pipeline on a grid-world simulator"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, std::string("Config file (default: $") + kConfigEnv + " or the bundled one)");
  app.add_option("--seed", o.seed, "Root seed, overrides the config");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--split", o.split, "seen|unseen")->check(CLI::IsMember({"seen", "unseen"}));
  app.add_flag("--oracle-semantics", o.oracle_semantics, "Label proposals with their true classes");
  app.add_flag("--oracle-depth", o.oracle_depth, "Noise-free depth at run time");
  app.add_option("--fusion", o.fusion, "bayes|max")->check(CLI::IsMember({"bayes", "max"}));
  app.add_option("--embedding", o.embedding, "hierarchical|random")->check(CLI::IsMember({"hierarchical", "random"}));

  auto* gen_scenes = app.add_subcommand("gen-scenes", "Generate scene files for the seen and unseen splits");
  gen_scenes->add_option("--count", o.count, "Scenes per split (default from the config)");
  auto* gen_demos = app.add_subcommand("gen-demos", "Record expert demonstrations in the given scenes");
  gen_demos->add_option("--scenes", o.scenes, "Scene directory")->required();
  auto* train = app.add_subcommand("train", "Learn the concept projection and the semantic policy");
  train->add_option("--scenes", o.scenes, "Scene directory")->required();
  train->add_option("--demos", o.demos, "Demonstration directory")->required();
  auto* run = app.add_subcommand("run", "Execute episodes and write results.jsonl");
  run->add_option("--scenes", o.scenes, "Scene directory")->required();
  run->add_option("--model", o.model, "Directory written by train");
  run->add_option("--episodes", o.episodes, "scene<TAB>instruction list (default: one task per type per scene)");
  run->add_option("--trajectories", o.trajectories, "Directory for per-episode trajectory dumps");
  auto* eval = app.add_subcommand("eval", "Aggregate results into metrics.json and metrics.txt");
  eval->add_option("results", o.results, "results.jsonl files")->required();
  auto* reason_cmd = app.add_subcommand("reason", "Answer exist/count queries from explored maps");
  reason_cmd->add_option("--scenes", o.scenes, "Scene directory")->required();
  reason_cmd->add_option("--model", o.model, "Directory written by train");
  reason_cmd->add_option("--queries", o.queries, "Query file (default: sampled per scene)");
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    Warnings warnings;
    if (eval->parsed()) {
      std::vector<fs::path> files(o.results.begin(), o.results.end());
      const MetricsReport report = cmd_eval(files, o.out, warnings);
      std::cout << report.to_table();
      finish("eval", o, warnings);
      return 0;
    }
    const Pipeline p(load_config(o));
    if (gen_scenes->parsed()) {
      const auto written = cmd_gen_scenes(p, o.out, split_of(o), o.count, warnings);
      std::cout << "wrote " << written.size() << " scenes to " << o.out << "\n";
      finish("gen-scenes", o, warnings);
    } else if (gen_demos->parsed()) {
      const auto written = cmd_gen_demos(p, scenes_of(o, split_of(o).value_or(Split::Seen)), o.out, warnings);
      std::cout << "wrote " << written.size() << " demonstrations to " << o.out << "\n";
      finish("gen-demos", o, warnings);
    } else if (train->parsed()) {
      const auto result = cmd_train(p, list_files(o.demos, ".demo"), o.scenes, o.out, warnings);
      const auto& last = result.trace.back();
      std::cout << "trained on " << result.samples << " frames, final matched mse " << last.mean_matched_mse
                << ", validation accuracy " << last.validation_accuracy << "\n";
      finish("train", o, warnings);
    } else if (run->parsed()) {
      const Split split = split_of(o).value_or(Split::Unseen);
      std::optional<Model> model;
      if (!o.model.empty()) model = Model::load(o.model, *p.catalog);
      std::optional<std::vector<EpisodeSpec>> episodes;
      if (!o.episodes.empty()) episodes = parse_episode_list(read_file(o.episodes));
      const auto results = cmd_run(p, scenes_of(o, split), episodes, model ? &*model : nullptr, split,
                                   fs::path(o.out) / "results.jsonl", warnings, o.trajectories);
      int ok = 0;
      for (const auto& r : results) ok += r.success;
      std::cout << ok << "/" << results.size() << " episodes succeeded\n";
      finish("run", o, warnings);
    } else if (reason_cmd->parsed()) {
      const Split split = split_of(o).value_or(Split::Unseen);
      std::optional<Model> model;
      if (!o.model.empty()) model = Model::load(o.model, *p.catalog);
      std::optional<std::vector<ReasoningQuery>> queries;
      if (!o.queries.empty()) queries = queries_from_jsonl(read_file(o.queries), *p.catalog);
      const auto records = cmd_reason(p, scenes_of(o, split), model ? &*model : nullptr, queries, o.out, warnings);
      std::cout << summarize(records).to_json();
      finish("reason", o, warnings);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
