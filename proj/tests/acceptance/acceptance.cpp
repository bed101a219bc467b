// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. Optional argv[1]: scratch directory (default: a fresh
// directory under the system temp dir, removed afterwards). Optional argv[2]:
// run only criteria whose name starts with it.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "ecl/cli/commands.hpp"
#include "ecl/common/io.hpp"
#include "ecl/concept/assignment.hpp"
#include "ecl/concept/labeling.hpp"
#include "ecl/executor/expert.hpp"
#include "ecl/map/semantic_map.hpp"
#include "ecl/planner/fmm.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace ecl;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path g_root;

RunConfig default_config() { return RunConfig::load(fs::path(ECL_DATA_DIR) / "default_config.json"); }

std::vector<fs::path> split_files(const fs::path& dir, Split s) {
  auto all = list_files(dir, ".world");
  const std::string prefix = std::string(split_name(s)) + "_";
  std::erase_if(all, [&](const fs::path& p) { return !p.filename().string().starts_with(prefix); });
  return all;
}

// Scenes, demos and a trained model under the default config, built once.
struct Trained {
  fs::path dir;
  std::vector<fs::path> unseen;
  Model model;
};

const Trained& trained() {
  static std::optional<Trained> t;
  if (t) return *t;
  const Pipeline p(default_config());
  Warnings w;
  Trained out;
  out.dir = g_root / "default";
  cmd_gen_scenes(p, out.dir / "scenes", std::nullopt, std::nullopt, w);
  const auto demos = cmd_gen_demos(p, split_files(out.dir / "scenes", Split::Seen), out.dir / "demos", w);
  out.model = cmd_train(p, demos, out.dir / "scenes", out.dir / "model", w).model;
  out.unseen = split_files(out.dir / "scenes", Split::Unseen);
  t = std::move(out);
  return *t;
}

// Episodes of the first scenes, truncated to n, under a config variant.
std::vector<EpisodeResult> run_suite(const std::function<void(RunConfig&)>& tweak, const std::string& tag,
                                     size_t n) {
  const Trained& t = trained();
  RunConfig cfg = default_config();
  tweak(cfg);
  const Pipeline p(cfg);
  Warnings w;
  std::vector<fs::path> scenes(t.unseen.begin(), t.unseen.begin() + std::min<size_t>(35, t.unseen.size()));
  auto results = cmd_run(p, scenes, std::nullopt, &t.model, Split::Unseen, g_root / "suites" / (tag + ".jsonl"), w);
  if (results.size() > n) results.resize(n);
  return results;
}

std::map<std::string, std::vector<EpisodeResult>> g_batches;

const std::vector<EpisodeResult>& suite(const std::string& tag) {
  auto it = g_batches.find(tag);
  if (it != g_batches.end()) return it->second;
  std::function<void(RunConfig&)> tweak = [](RunConfig&) {};
  if (tag == "oracle")
    tweak = [](RunConfig& c) {
      c.executor.oracle_semantics = true;
      c.oracle_depth = true;
    };
  else if (tag == "uniform")
    tweak = [](RunConfig& c) { c.executor.goal_policy = GoalPolicyMode::Uniform; };
  else if (tag == "corrupt-bayes")
    tweak = [](RunConfig& c) { c.executor.corruption_prob = 0.2; };
  else if (tag == "corrupt-max")
    tweak = [](RunConfig& c) {
      c.executor.corruption_prob = 0.2;
      c.executor.fusion = FusionMode::Max;
    };
  return g_batches[tag] = run_suite(tweak, tag, 200);
}

// ----- 1 -----
Outcome assignment_optimality() {
  const auto t0 = Clock::now();
  Rng rng(derive_seed(11, "acceptance-assignment"));
  std::uniform_int_distribution<int> dim(1, 6), cost(0, 99);
  int mismatches = 0;
  for (int n = 0; n < 500; ++n) {
    Eigen::MatrixXd c(dim(rng), dim(rng));
    for (int i = 0; i < c.rows(); ++i)
      for (int j = 0; j < c.cols(); ++j) c(i, j) = cost(rng);  // integer costs: sums are exact
    if (solve_assignment(c).total_cost != oracle::brute_force_assignment(c)) ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 5.0,
          std::to_string(mismatches) + " mismatches over 500 matrices, " + fmt("%.2f s", secs)};
}

// ----- 2 -----
Outcome fusion_algebra() {
  Rng rng(derive_seed(12, "acceptance-fusion"));
  std::uniform_real_distribution<double> unit(0.0, 1.0), sig(0.1, 2.0);
  double worst_equal = 0;
  for (int n = 0; n < 1000; ++n) {
    const double pm = unit(rng), ps = unit(rng), s = sig(rng);
    const auto [p, sigma] = fuse_scalar(pm, s, ps, s);
    worst_equal = std::max({worst_equal, std::abs(p - (pm + ps) / 2), std::abs(sigma - s / std::sqrt(2.0))});
  }
  // Five single-cell frames fused in every order.
  const int classes = 4;
  std::vector<FramePoint> points;
  for (int i = 0; i < 5; ++i) {
    Eigen::VectorXd p(classes);
    for (int c = 0; c < classes; ++c) p[c] = std::log(0.05 + unit(rng));
    points.push_back({{1, 1}, p, sig(rng)});
  }
  std::vector<int> order{0, 1, 2, 3, 4};
  Eigen::VectorXd ref_p;
  double ref_sigma = 0, worst_perm = 0;
  bool decreasing = true;
  do {
    SemanticMap map(3, 3, classes, 0);
    double prev = std::numeric_limits<double>::infinity();
    for (int i : order) {
      PointCloudFrame f;
      f.pose_used = {{1, 1}, Heading::E};
      f.points.push_back(points[static_cast<size_t>(i)]);
      fuse(map, f);
      const double s = map.cell({1, 1}).sigma;
      if (std::isfinite(prev) && !(s < prev)) decreasing = false;
      prev = s;
    }
    const auto& cell = map.cell({1, 1});
    if (ref_p.size() == 0) {
      ref_p = cell.p;
      ref_sigma = cell.sigma;
    }
    worst_perm = std::max({worst_perm, (cell.p - ref_p).cwiseAbs().maxCoeff(), std::abs(cell.sigma - ref_sigma)});
  } while (std::next_permutation(order.begin(), order.end()));
  const bool pass = worst_equal <= 1e-12 && worst_perm <= 1e-9 && decreasing;
  return {pass, "equal-variance error " + fmt("%.1e", worst_equal) + ", permutation spread " +
                    fmt("%.1e", worst_perm) + ", sigma strictly decreasing: " + (decreasing ? "yes" : "no")};
}

// ----- 3 -----
Outcome planner_oracle() {
  const auto t0 = Clock::now();
  Rng rng(derive_seed(13, "acceptance-planner"));
  int reach_mismatch = 0, ratio_violations = 0, lower_violations = 0;
  double worst_ratio = 0;
  std::uniform_real_distribution<double> density(0.05, 0.35);
  for (int m = 0; m < 100; ++m) {
    Grid<uint8_t> g = oracle::random_field(64, 64, density(rng), rng);
    const Cell src{static_cast<int>(rng() % 64), static_cast<int>(rng() % 64)};
    g[src] = 0;
    const ArrivalField a = solve_eikonal(CostField(g, 0), src);
    const Grid<double> d = oracle::dijkstra(g, src);
    std::vector<Cell> reachable;
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x) {
        const bool fr = a.reachable({x, y}), dr = std::isfinite(d[{x, y}]);
        if (fr != dr) ++reach_mismatch;
        if (fr && dr) reachable.push_back({x, y});
      }
    for (int k = 0; k < 40 && !reachable.empty(); ++k) {
      const Cell goal = reachable[rng() % reachable.size()];
      const auto path = extract_path(a, goal);
      const double len = path_length(path);
      const double opt = d[goal];
      const double euclid = std::hypot(goal.x - src.x, goal.y - src.y);
      if (opt > 0) worst_ratio = std::max(worst_ratio, len / opt);
      if (len > 1.08 * opt + 1e-9) ++ratio_violations;
      if (len < euclid - 1e-9) ++lower_violations;
    }
  }
  const double secs = seconds_since(t0);
  const bool pass = reach_mismatch == 0 && ratio_violations == 0 && lower_violations == 0 && secs < 10.0;
  return {pass, std::to_string(reach_mismatch) + " reachability mismatches, worst length ratio " +
                    fmt("%.4f", worst_ratio) + ", " + std::to_string(ratio_violations + lower_violations) +
                    " bound violations, " + fmt("%.2f s", secs)};
}

// ----- 4 -----
double synthetic_accuracy(double noise, uint64_t seed, const Catalog& catalog) {
  std::vector<ClassId> classes;
  for (ClassId c : catalog.object_classes())
    if (catalog[c].pickupable) classes.push_back(c);
  FeatureModel fm(catalog, 48, noise, derive_seed(seed, "features"), 0.5);
  const EmbeddingSet emb = embed_classes(catalog, derive_seed(seed, "embedding"), EmbeddingStructure::Hierarchical);
  Rng rng(derive_seed(seed, "frames"));
  const auto frames = oracle::synthetic_frames(fm, classes, 500, rng);
  const ValidationSet held = oracle::synthetic_validation(fm, classes, 50, rng);
  TrainConfig tc;
  tc.seed = derive_seed(seed, "train");
  return train(frames, emb, fm.dim(), tc, &held).trace.back().validation_accuracy;
}

Outcome grounding_desk_scale() {
  const Catalog catalog = Catalog::load(fs::path(ECL_DATA_DIR) / "catalog.txt");
  const double noises[] = {0.0, 0.2, 0.5, 1.0};
  std::vector<double> means;
  double worst_clean = 1.0;
  for (double noise : noises) {
    double sum = 0;
    for (uint64_t seed = 1; seed <= 10; ++seed) {
      const double acc = synthetic_accuracy(noise, seed, catalog);
      sum += acc;
      if (noise == 0.0) worst_clean = std::min(worst_clean, acc);
    }
    means.push_back(sum / 10);
  }
  bool monotone = true;
  for (size_t i = 1; i < means.size(); ++i) monotone = monotone && means[i] <= means[i - 1];
  std::ostringstream d;
  d << "noise 0 worst seed " << fmt("%.4f", worst_clean) << "; mean accuracy by noise {0,0.2,0.5,1.0}:";
  for (double m : means) d << ' ' << fmt("%.4f", m);
  return {worst_clean >= 0.99 && monotone, d.str()};
}

// ----- 5a -----
Outcome fusion_ablation() {
  const auto& bayes = suite("corrupt-bayes");
  const auto& max = suite("corrupt-max");
  const double sb = aggregate(bayes).overall.sr, sm = aggregate(max).overall.sr;
  return {bayes.size() >= 20 && max.size() >= 20 && sb >= sm,
          std::to_string(bayes.size()) + " episodes at corruption 0.2: bayes SR " + fmt("%.3f", sb) + ", max SR " +
              fmt("%.3f", sm)};
}

// ----- 5b -----
Outcome embedding_ablation() {
  double sum[2] = {0, 0};
  int wins = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    RunConfig cfg = default_config();
    cfg.reseed(seed);
    const Pipeline p(cfg);
    Warnings w;
    const fs::path dir = g_root / ("embedding-" + std::to_string(seed));
    const auto scenes = cmd_gen_scenes(p, dir, Split::Seen, std::nullopt, w);
    std::vector<DemoTrace> traces;
    for (const auto& path : cmd_gen_demos(p, scenes, dir / "demos", w)) {
      const Demonstration demo = Demonstration::parse(read_file(path), *p.catalog);
      const GridWorld world = parse_world(read_file(dir / (demo.scene + ".world")));
      traces.push_back(replay(world, demo, p.features, p.demo_sensor()));
    }
    const auto frames = collect_training_frames(traces, derive_seed(seed, "frames"));
    // Held out: first-frame proposals in scenes of the other split.
    ValidationSet held;
    for (int i = 0; i < 20; ++i) {
      const GridWorld world = make_scene(p, Split::Unseen, i, w);
      for (const auto& prop : observe(world, p.features, p.demo_sensor()).proposals) {
        held.features.push_back(prop.feature);
        held.truth.push_back(world.object(prop.object_id).class_id);
      }
    }
    double acc[2];
    for (int k = 0; k < 2; ++k) {
      const auto structure = k == 0 ? EmbeddingStructure::Hierarchical : EmbeddingStructure::Random;
      const EmbeddingSet emb =
          embed_classes(*p.catalog, derive_seed(seed, "embedding"), structure, cfg.embedding_dim);
      const Projection proj = train(frames.samples, emb, cfg.visual_dim, cfg.train).projection;
      const auto labels = label(held.features, proj, emb.object_embeddings(*p.catalog), p.catalog->size());
      acc[k] = grounding_accuracy(labels, held.truth).overall();
      sum[k] += acc[k];
    }
    wins += acc[0] >= acc[1];
  }
  const double h = sum[0] / 10, r = sum[1] / 10;
  return {h >= r, "mean grounding accuracy over 10 seeds: hierarchical " + fmt("%.4f", h) + ", random " +
                      fmt("%.4f", r) + " (hierarchical >= random in " + std::to_string(wins) + "/10)"};
}

// ----- 6 -----
Outcome end_to_end_ordering() {
  const auto& o = suite("oracle");
  const auto& l = suite("learned");
  const auto& u = suite("uniform");
  const double so = aggregate(o).overall.sr, sl = aggregate(l).overall.sr, su = aggregate(u).overall.sr;
  const MetricsReport ro = aggregate(o);
  const double pick = ro.by_task_type.count("PickAndPlace") ? ro.by_task_type.at("PickAndPlace").sr : 0.0;
  const bool pass = o.size() == 200 && l.size() == 200 && u.size() == 200 && so >= sl && sl >= su && pick >= 0.9;
  return {pass, "SR oracle " + fmt("%.3f", so) + " >= learned " + fmt("%.3f", sl) + " >= uniform " +
                    fmt("%.3f", su) + "; oracle Pick&Place " + fmt("%.3f", pick) + " over " +
                    std::to_string(o.size()) + " episodes"};
}

// ----- 7 -----
Outcome reasoning() {
  const Trained& t = trained();
  const Pipeline p(default_config());
  Warnings w;
  const auto records = cmd_reason(p, t.unseen, &t.model, std::nullopt, g_root / "reason", w);
  const ReasoningSummary s = summarize(records);
  return {t.unseen.size() >= 50 && s.exist_accuracy() >= 0.75 && s.count_accuracy() >= 0.40,
          std::to_string(t.unseen.size()) + " unseen scenes: exist " + fmt("%.3f", s.exist_accuracy()) + " (" +
              std::to_string(s.exist_total) + " queries), count " + fmt("%.3f", s.count_accuracy()) + " (" +
              std::to_string(s.count_total) + " queries)"};
}

// ----- 8 -----
bool identities_hold(const MetricsReport& r) {
  auto ok = [](const MetricsRow& m) { return m.plwsr <= m.sr + 1e-12 && m.plwgc <= m.gc + 1e-12; };
  bool good = ok(r.overall);
  for (const auto& [k, m] : r.by_split) good = good && ok(m);
  for (const auto& [k, m] : r.by_task_type) good = good && ok(m);
  double total = 0;
  for (const auto& [k, v] : r.error_percent) total += v;
  if (r.failures > 0) good = good && std::abs(total - 100.0) < 1e-9;
  return good;
}

Outcome metrics_identities() {
  auto ep = [](std::string id, Split s, TaskType t, bool ok, int met, int total, int agent, int expert,
               std::optional<ErrorMode> e) {
    EpisodeResult r;
    r.id = std::move(id);
    r.split = s;
    r.task_type = t;
    r.success = ok;
    r.goal_conditions_met = met;
    r.goal_conditions_total = total;
    r.agent_path_length = agent;
    r.expert_path_length = expert;
    r.error = e;
    return r;
  };
  const std::vector<EpisodeResult> fixture = {
      ep("a", Split::Seen, TaskType::PickAndPlace, true, 1, 1, 20, 10, std::nullopt),
      ep("b", Split::Seen, TaskType::CleanAndPlace, false, 1, 2, 20, 10, ErrorMode::InteractionFailure),
      ep("c", Split::Unseen, TaskType::PickAndPlace, true, 1, 1, 8, 12, std::nullopt),
      ep("d", Split::Unseen, TaskType::Examine, false, 0, 2, 30, 15, ErrorMode::Other)};
  const MetricsReport f = aggregate(fixture);
  auto eq = [](double a, double b) { return std::abs(a - b) < 1e-12; };
  bool fixture_ok = eq(f.overall.sr, 0.5) && eq(f.overall.gc, 0.625) && eq(f.overall.plwsr, 0.375) &&
                    eq(f.overall.plwgc, 0.4375) && eq(f.by_split.at("seen").plwgc, 0.375) &&
                    eq(f.by_split.at("unseen").gc, 0.5) && eq(f.error_percent.at("InteractionFailure"), 50.0) &&
                    eq(f.error_percent.at("Other"), 50.0);
  int batches = 1;
  bool all_ok = identities_hold(f);
  for (const auto& [tag, results] : g_batches) {
    all_ok = all_ok && identities_hold(aggregate(results));
    ++batches;
  }
  return {fixture_ok && all_ok, "hand fixture " + std::string(fixture_ok ? "exact" : "MISMATCH") + "; identities hold on " +
                                    std::to_string(batches) + " batches: " + (all_ok ? "yes" : "no")};
}

// ----- 9 -----
Outcome determinism() {
  std::string bytes[2][3];
  for (int run = 0; run < 2; ++run) {
    RunConfig cfg = default_config();
    cfg.seen_scenes = 6;
    cfg.unseen_scenes = 4;
    const Pipeline p(cfg);
    Warnings w;
    const fs::path dir = g_root / ("determinism-" + std::to_string(run));
    cmd_gen_scenes(p, dir / "scenes", std::nullopt, std::nullopt, w);
    const auto demos = cmd_gen_demos(p, split_files(dir / "scenes", Split::Seen), dir / "demos", w);
    const Model model = cmd_train(p, demos, dir / "scenes", dir / "model", w).model;
    cmd_run(p, split_files(dir / "scenes", Split::Unseen), std::nullopt, &model, Split::Unseen,
            dir / "results.jsonl", w);
    cmd_eval({dir / "results.jsonl"}, dir / "eval", w);
    bytes[run][0] = read_file(dir / "results.jsonl");
    bytes[run][1] = read_file(dir / "eval" / "metrics.json");
    bytes[run][2] = read_file(dir / "eval" / "metrics.txt");
  }
  const bool same = bytes[0][0] == bytes[1][0] && bytes[0][1] == bytes[1][1] && bytes[0][2] == bytes[1][2];
  return {same && !bytes[0][0].empty(), std::string("results.jsonl, metrics.json, metrics.txt ") +
                                            (same ? "byte-identical" : "DIFFER") + " across two runs"};
}

}  // namespace

int main(int argc, char** argv) {
  g_root = argc > 1 ? fs::path(argv[1])
                    : fs::temp_directory_path() / ("ecl-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(g_root);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 assignment optimality", assignment_optimality},
      {"2 fusion algebra", fusion_algebra},
      {"3 planner oracle", planner_oracle},
      {"4 grounding at desk scale", grounding_desk_scale},
      {"5a fusion ablation direction", fusion_ablation},
      {"5b embedding ablation direction", embedding_ablation},
      {"6 end-to-end ordering", end_to_end_ordering},
      {"7 reasoning beats random", reasoning},
      {"8 metrics identities", metrics_identities},
      {"9 determinism", determinism},
  };
  int failed = 0;
  const std::string only = argc > 2 ? argv[2] : "";
  for (const auto& [name, fn] : criteria) {
    if (!name.starts_with(only)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << fmt("%.1f s", seconds_since(t0))
              << "]" << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  if (argc <= 1) fs::remove_all(g_root);
  return failed == 0 ? 0 : 1;
}
