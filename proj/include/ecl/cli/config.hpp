#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <utility>

#include "ecl/concept/feature_model.hpp"
#include "ecl/concept/trainer.hpp"
#include "ecl/eval/metrics.hpp"
#include "ecl/executor/executor.hpp"
#include "ecl/instruct/embedding.hpp"
#include "ecl/instruct/grammar.hpp"
#include "ecl/world/scene.hpp"

namespace ecl {

// Everything a pipeline run depends on. Loaded from one JSON file; paths in
// it are relative to the file.
struct RunConfig {
  uint64_t seed = 1;
  std::filesystem::path catalog_path;
  std::filesystem::path grammar_path;

  int visual_dim = 48;     // Dv
  int hidden_dim = 48;     // Dh
  int embedding_dim = 32;  // De
  double noise_sigma = 0.5;
  double group_correlation = 0.5;
  EmbeddingStructure embedding = EmbeddingStructure::Hierarchical;

  int width = 16;
  int height = 16;
  double wall_density = 0.02;
  double interaction_range = 1.5;
  int placement_attempts = 20;  // reseeded tries per scene
  std::map<std::string, std::pair<int, int>> counts;

  int seen_scenes = 40;
  int unseen_scenes = 50;
  bool allow_sliced = true;

  TrainConfig train;
  ExecutorConfig executor;
  bool oracle_depth = false;

  int exist_queries = 2;  // per scene
  int count_queries = 2;
  int max_count = 3;
  int min_component = 1;
  int explore_budget = 400;

  static RunConfig load(const std::filesystem::path& path);
  static RunConfig parse(const std::string& text, const std::filesystem::path& base_dir);
  // Canonical JSON with absolute paths.
  std::string to_json() const;
  uint64_t hash() const;
  // Sets the root seed and every seed derived from it.
  void reseed(uint64_t root);

  // Throws ConfigError on a bad value or a missing file.
  void validate() const;
  int scene_count(Split split) const { return split == Split::Seen ? seen_scenes : unseen_scenes; }
};

// Environment variable naming the config used when --config is absent.
inline constexpr const char* kConfigEnv = "ECL_CONFIG";

// Catalog, grammar, feature model and embeddings a config implies.
struct Pipeline {
  RunConfig config;
  std::shared_ptr<const Catalog> catalog;
  Grammar grammar;
  FeatureModel features;
  EmbeddingSet embeddings;
  SceneSpec scene_spec;

  explicit Pipeline(RunConfig cfg);

  // Executor settings with the oracle-depth switch applied.
  ExecutorConfig executor_config() const;
  // Sensor that records and replays demonstrations (never oracle).
  const SensorConfig& demo_sensor() const { return config.executor.sensor; }
};

}  // namespace ecl
