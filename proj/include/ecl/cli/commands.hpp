#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ecl/cli/config.hpp"
#include "ecl/eval/metrics.hpp"
#include "ecl/eval/reasoning.hpp"
#include "ecl/executor/policy.hpp"

namespace ecl {

// Non-fatal problems a command ran into (skipped instructions, scene
// reseeds, excluded episodes).
struct Warnings {
  std::vector<std::string> messages;
  void add(std::string m) { messages.push_back(std::move(m)); }
  int count() const { return static_cast<int>(messages.size()); }
  std::string to_json(const std::string& command) const;
};

// Learned artefacts written by cmd_train.
struct Model {
  Projection projection;
  EmbeddingSet embeddings;
  SemanticPolicy policy;

  void save(const std::filesystem::path& dir, const Catalog& catalog, uint64_t config_hash) const;
  static Model load(const std::filesystem::path& dir, const Catalog& catalog);
};

// Scene files are named <split>_<index>.world, e.g. seen_003.world.
std::filesystem::path scene_file_name(Split split, int index);

// Sorted .world files directly inside dir.
std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir, const std::string& extension);

// Scene generation with reseeding on placement failure.
GridWorld make_scene(const Pipeline& p, Split split, int index, Warnings& warnings);

// Writes `count` scenes per requested split (the config's counts when
// nullopt). Returns the written paths.
std::vector<std::filesystem::path> cmd_gen_scenes(const Pipeline& p, const std::filesystem::path& out_dir,
                                                  std::optional<Split> split, std::optional<int> count,
                                                  Warnings& warnings);

// One expert demonstration per (scene, task type) the scene supports.
std::vector<std::filesystem::path> cmd_gen_demos(const Pipeline& p, const std::vector<std::filesystem::path>& scenes,
                                                 const std::filesystem::path& out_dir, Warnings& warnings);

struct TrainOutput {
  Model model;
  std::vector<EpochStats> trace;
  int samples = 0;
};

// Replays the demos in their scenes (found in scene_dir by name), trains the
// projection and builds the semantic policy from maps of the demos labelled
// with it. Writes the model and loss trace into out_dir.
TrainOutput cmd_train(const Pipeline& p, const std::vector<std::filesystem::path>& demos,
                      const std::filesystem::path& scene_dir, const std::filesystem::path& out_dir,
                      Warnings& warnings);

struct EpisodeSpec {
  std::string scene;  // scene file stem
  std::string instruction;
};

// "scene<TAB>instruction" per line.
std::vector<EpisodeSpec> parse_episode_list(const std::string& text);

// Runs the given episodes, or when `episodes` is nullopt one sampled task per
// task type for every scene. Episodes whose instruction does not parse or
// whose expert plan fails are skipped with a warning.
std::vector<EpisodeResult> cmd_run(const Pipeline& p, const std::vector<std::filesystem::path>& scenes,
                                   const std::optional<std::vector<EpisodeSpec>>& episodes, const Model* model,
                                   Split split, const std::filesystem::path& out_file, Warnings& warnings,
                                   const std::filesystem::path& trajectory_dir = {});

MetricsReport cmd_eval(const std::vector<std::filesystem::path>& result_files, const std::filesystem::path& out_dir,
                       Warnings& warnings);

// Explores each scene and answers the queries (sampled per scene when none
// are given).
std::vector<ReasoningRecord> cmd_reason(const Pipeline& p, const std::vector<std::filesystem::path>& scenes,
                                        const Model* model, const std::optional<std::vector<ReasoningQuery>>& queries,
                                        const std::filesystem::path& out_dir, Warnings& warnings);

}  // namespace ecl
