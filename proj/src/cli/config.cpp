#include "ecl/cli/config.hpp"

#include <nlohmann/json.hpp>
#include <set>

#include "ecl/common/error.hpp"
#include "ecl/common/io.hpp"
#include "ecl/common/rng.hpp"

namespace ecl {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Reads the keys of one config section, rejecting any it does not know.
class Section {
 public:
  Section(const json& parent, const std::string& name) : name_(name) {
    if (!parent.contains(name)) return;
    node_ = &parent.at(name);
    if (!node_->is_object()) throw ConfigError("config section '" + name + "' must be an object");
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    known_.insert(key);
    if (!node_ || !node_->contains(key)) return;
    try {
      out = node_->at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("config " + name_ + "." + key + ": " + e.what());
    }
  }

  const json* raw(const std::string& key) {
    known_.insert(key);
    return node_ && node_->contains(key) ? &node_->at(key) : nullptr;
  }

  void finish() const {
    if (!node_) return;
    for (const auto& [k, v] : node_->items())
      if (!known_.count(k)) throw ConfigError("unknown config key " + name_ + "." + k);
  }

 private:
  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> known_;
};

const char* goal_policy_name(GoalPolicyMode m) { return m == GoalPolicyMode::Semantic ? "semantic" : "uniform"; }

GoalPolicyMode parse_goal_policy(const std::string& s) {
  if (s == "semantic") return GoalPolicyMode::Semantic;
  if (s == "uniform") return GoalPolicyMode::Uniform;
  throw ConfigError("unknown goal policy '" + s + "' (expected semantic|uniform)");
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& path) {
  return parse(read_file(path), std::filesystem::absolute(path).parent_path());
}

RunConfig RunConfig::parse(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  const std::set<std::string> sections = {"format", "seed",  "catalog", "grammar",  "dims",     "features", "sensor",
                                          "scenes", "demos", "train",   "executor", "map",      "reasoning"};
  for (const auto& [k, v] : root.items())
    if (!sections.count(k)) throw ConfigError("unknown config key " + k);
  if (root.value("format", std::string()) != "ecl-config v1") throw ConfigError("config format must be 'ecl-config v1'");
  try {
    c.seed = root.value("seed", c.seed);
    c.catalog_path = base_dir / root.at("catalog").get<std::string>();
    c.grammar_path = base_dir / root.at("grammar").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.catalog_path = c.catalog_path.lexically_normal();
  c.grammar_path = c.grammar_path.lexically_normal();

  Section dims(root, "dims");
  dims.get("visual", c.visual_dim);
  dims.get("hidden", c.hidden_dim);
  dims.get("embedding", c.embedding_dim);
  dims.finish();

  Section feat(root, "features");
  feat.get("noise_sigma", c.noise_sigma);
  feat.get("group_correlation", c.group_correlation);
  std::string structure = embedding_structure_name(c.embedding);
  feat.get("embedding", structure);
  try {
    c.embedding = parse_embedding_structure(structure);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  feat.finish();

  Section sensor(root, "sensor");
  sensor.get("noise_a", c.executor.sensor.noise_a);
  sensor.get("noise_b", c.executor.sensor.noise_b);
  sensor.get("num_rays", c.executor.sensor.num_rays);
  sensor.get("fov_deg", c.executor.sensor.fov_deg);
  sensor.get("max_range", c.executor.sensor.max_range);
  sensor.get("oracle_depth", c.oracle_depth);
  sensor.finish();

  Section scenes(root, "scenes");
  scenes.get("width", c.width);
  scenes.get("height", c.height);
  scenes.get("wall_density", c.wall_density);
  scenes.get("interaction_range", c.interaction_range);
  scenes.get("placement_attempts", c.placement_attempts);
  scenes.get("seen", c.seen_scenes);
  scenes.get("unseen", c.unseen_scenes);
  if (const json* counts = scenes.raw("counts")) {
    if (!counts->is_object()) throw ConfigError("scenes.counts must map class names to [min, max]");
    for (const auto& [name, range] : counts->items()) {
      if (!range.is_array() || range.size() != 2 || !range[0].is_number_integer() || !range[1].is_number_integer())
        throw ConfigError("scenes.counts." + name + " must be [min, max]");
      c.counts[name] = {range[0].get<int>(), range[1].get<int>()};
    }
  }
  scenes.finish();

  Section demos(root, "demos");
  demos.get("allow_sliced", c.allow_sliced);
  demos.finish();

  Section train(root, "train");
  train.get("epochs", c.train.epochs);
  train.get("learning_rate", c.train.learning_rate);
  train.get("batch_size", c.train.batch_size);
  train.get("init_scale", c.train.init_scale);
  train.get("temperature", c.train.temperature);
  train.finish();

  Section ex(root, "executor");
  ExecutorConfig& e = c.executor;
  ex.get("budget", e.budget);
  ex.get("initial_scan", e.initial_scan);
  ex.get("max_interaction_failures", e.max_interaction_failures);
  ex.get("goal_resamples", e.goal_resamples);
  ex.get("inflation_radius", e.inflation_radius);
  ex.get("collision_limit", e.collision_limit);
  ex.get("oracle_semantics", e.oracle_semantics);
  std::string fusion = fusion_mode_name(e.fusion);
  ex.get("fusion", fusion);
  e.fusion = parse_fusion_mode(fusion);
  std::string goal_policy = goal_policy_name(e.goal_policy);
  ex.get("goal_policy", goal_policy);
  e.goal_policy = parse_goal_policy(goal_policy);
  ex.get("corruption_prob", e.corruption_prob);
  ex.get("corruption_variance_scale", e.corruption_variance_scale);
  ex.finish();

  Section map(root, "map");
  map.get("sigma_scale", e.map.sigma_scale);
  map.get("sigma_floor", e.map.sigma_floor);
  map.get("prob_floor", e.map.prob_floor);
  map.get("linear_domain", e.map.linear_domain);
  map.get("logodds_free", e.map.logodds_free);
  map.get("logodds_hit", e.map.logodds_hit);
  map.get("logodds_clamp", e.map.logodds_clamp);
  map.finish();

  Section reasoning(root, "reasoning");
  reasoning.get("exist_queries", c.exist_queries);
  reasoning.get("count_queries", c.count_queries);
  reasoning.get("max_count", c.max_count);
  reasoning.get("min_component", c.min_component);
  reasoning.get("explore_budget", c.explore_budget);
  reasoning.finish();

  c.train.hidden_dim = c.hidden_dim;
  c.reseed(c.seed);
  e.temperature = c.train.temperature;
  e.map.max_range = e.sensor.max_range;
  c.validate();
  return c;
}

void RunConfig::validate() const {
  if (visual_dim < 1 || hidden_dim < 1 || embedding_dim < 1) throw ConfigError("dimensions must be positive");
  if (!(noise_sigma >= 0)) throw ConfigError("features.noise_sigma must be >= 0");
  if (!(group_correlation >= 0 && group_correlation < 1)) throw ConfigError("features.group_correlation must be in [0, 1)");
  if (!(executor.sensor.noise_a >= 0 && executor.sensor.noise_b >= 0)) throw ConfigError("sensor noise must be >= 0");
  if (width < 3 || height < 3) throw ConfigError("scenes must be at least 3x3");
  if (seen_scenes < 0 || unseen_scenes < 0) throw ConfigError("scene counts must be >= 0");
  if (placement_attempts < 1) throw ConfigError("scenes.placement_attempts must be >= 1");
  for (const auto& [name, r] : counts)
    if (r.first < 0 || r.second < r.first) throw ConfigError("scenes.counts." + name + " must satisfy 0 <= min <= max");
  if (executor.budget < 0) throw ConfigError("executor.budget must be >= 0");
  if (!(executor.corruption_prob >= 0 && executor.corruption_prob <= 1))
    throw ConfigError("executor.corruption_prob must be in [0, 1]");
  if (min_component < 1) throw ConfigError("reasoning.min_component must be >= 1");
  if (!std::filesystem::is_regular_file(catalog_path)) throw ConfigError("catalog not found: " + catalog_path.string());
  if (!std::filesystem::is_regular_file(grammar_path)) throw ConfigError("grammar not found: " + grammar_path.string());
}

std::string RunConfig::to_json() const {
  ordered_json j;
  j["format"] = "ecl-config v1";
  j["seed"] = seed;
  j["catalog"] = catalog_path.string();
  j["grammar"] = grammar_path.string();
  j["dims"] = {{"visual", visual_dim}, {"hidden", hidden_dim}, {"embedding", embedding_dim}};
  j["features"] = {{"noise_sigma", noise_sigma},
                   {"group_correlation", group_correlation},
                   {"embedding", embedding_structure_name(embedding)}};
  const auto& s = executor.sensor;
  j["sensor"] = {{"noise_a", s.noise_a},   {"noise_b", s.noise_b},       {"num_rays", s.num_rays},
                 {"fov_deg", s.fov_deg},   {"max_range", s.max_range},   {"oracle_depth", oracle_depth}};
  ordered_json counts_json = ordered_json::object();
  for (const auto& [name, r] : counts) counts_json[name] = {r.first, r.second};
  j["scenes"] = {{"width", width},
                 {"height", height},
                 {"wall_density", wall_density},
                 {"interaction_range", interaction_range},
                 {"placement_attempts", placement_attempts},
                 {"seen", seen_scenes},
                 {"unseen", unseen_scenes},
                 {"counts", counts_json}};
  j["demos"] = {{"allow_sliced", allow_sliced}};
  j["train"] = {{"epochs", train.epochs},
                {"learning_rate", train.learning_rate},
                {"batch_size", train.batch_size},
                {"init_scale", train.init_scale},
                {"temperature", train.temperature}};
  const auto& e = executor;
  j["executor"] = {{"budget", e.budget},
                   {"initial_scan", e.initial_scan},
                   {"max_interaction_failures", e.max_interaction_failures},
                   {"goal_resamples", e.goal_resamples},
                   {"inflation_radius", e.inflation_radius},
                   {"collision_limit", e.collision_limit},
                   {"oracle_semantics", e.oracle_semantics},
                   {"fusion", fusion_mode_name(e.fusion)},
                   {"goal_policy", goal_policy_name(e.goal_policy)},
                   {"corruption_prob", e.corruption_prob},
                   {"corruption_variance_scale", e.corruption_variance_scale}};
  j["map"] = {{"sigma_scale", e.map.sigma_scale},       {"sigma_floor", e.map.sigma_floor},
              {"prob_floor", e.map.prob_floor},         {"linear_domain", e.map.linear_domain},
              {"logodds_free", e.map.logodds_free},     {"logodds_hit", e.map.logodds_hit},
              {"logodds_clamp", e.map.logodds_clamp}};
  j["reasoning"] = {{"exist_queries", exist_queries},
                    {"count_queries", count_queries},
                    {"max_count", max_count},
                    {"min_component", min_component},
                    {"explore_budget", explore_budget}};
  return j.dump(2) + "\n";
}

uint64_t RunConfig::hash() const { return fnv1a(to_json()); }

void RunConfig::reseed(uint64_t root) {
  seed = root;
  train.seed = derive_seed(root, "train");
}

Pipeline::Pipeline(RunConfig cfg) : config(std::move(cfg)) {
  catalog = std::make_shared<const Catalog>(Catalog::load(config.catalog_path));
  grammar = Grammar::load(config.grammar_path);
  features = FeatureModel(*catalog, config.visual_dim, config.noise_sigma, derive_seed(config.seed, "features"),
                          config.group_correlation);
  embeddings = embed_classes(*catalog, derive_seed(config.seed, "embedding"), config.embedding, config.embedding_dim);
  scene_spec.catalog = catalog;
  scene_spec.width = config.width;
  scene_spec.height = config.height;
  scene_spec.wall_density = config.wall_density;
  scene_spec.interaction_range = config.interaction_range;
  for (const auto& [name, r] : config.counts) {
    const auto id = catalog->find(name);
    if (!id) throw ConfigError("scenes.counts names unknown class '" + name + "'");
    scene_spec.counts.push_back({*id, r.first, r.second});
  }
}

ExecutorConfig Pipeline::executor_config() const {
  ExecutorConfig e = config.executor;
  if (config.oracle_depth) {
    e.sensor.noise_a = 0.0;
    e.sensor.noise_b = 0.0;
  }
  return e;
}

}  // namespace ecl
