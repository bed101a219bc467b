#include <gtest/gtest.h>

#include <cmath>
#include <deque>

#include "ecl/common/error.hpp"
#include "ecl/executor/executor.hpp"
#include "ecl/executor/expert.hpp"
#include "ecl/executor/goals.hpp"
#include "ecl/executor/navigation.hpp"
#include "ecl/executor/policy.hpp"
#include "ecl/executor/tasks.hpp"
#include "ecl/world/scene.hpp"
#include "support/fixtures.hpp"

using namespace ecl;
namespace fx = ecl::fixture;

namespace {

Program program(const std::string& text) { return parse({text, std::nullopt}, fx::grammar(), *fx::catalog()); }

const FeatureModel& features() {
  static const FeatureModel fm(*fx::catalog(), 16, 0.2, 5);
  return fm;
}

ExecutorConfig oracle_config() {
  ExecutorConfig c;
  c.oracle_semantics = true;
  c.sensor.noise_a = c.sensor.noise_b = 0;
  c.seed = 3;
  return c;
}

EpisodeRun run(const GridWorld& w, const std::string& text, const ExecutorConfig& cfg,
               const SemanticPolicy* policy = nullptr) {
  static Perception perception{&features(), nullptr, nullptr};
  const SemanticPolicy uniform = uniform_policy(w.width(), w.height(), fx::catalog()->size());
  return run_episode(w, program(text), perception, policy ? *policy : uniform, cfg);
}

// Fewest MoveAhead steps from `from` to any free cell within Chebyshev `reach`
// of the footprint (breadth-first search over ground truth).
int moves_to_reach(const GridWorld& w, Cell from, const std::vector<Cell>& footprint, double reach) {
  Grid<int> dist(w.width(), w.height(), -1);
  std::deque<Cell> q{from};
  dist[from] = 0;
  while (!q.empty()) {
    const Cell c = q.front();
    q.pop_front();
    for (Cell f : footprint)
      if (chebyshev(c, f) <= reach) return dist[c];
    for (Cell d : {Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) {
      const Cell n{c.x + d.x, c.y + d.y};
      if (w.blocked(n) || dist[n] >= 0) continue;
      dist[n] = dist[c] + 1;
      q.push_back(n);
    }
  }
  return -1;
}

SemanticMap one_class_map(int w, int h, int nc, const std::vector<std::pair<Cell, ClassId>>& marks) {
  SemanticMap m(w, h, nc, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      ClassId cls = 0;
      for (auto [c, k] : marks)
        if (c == Cell{x, y}) cls = k;
      PointCloudFrame f;
      Eigen::VectorXd p = Eigen::VectorXd::Constant(nc, std::log(1e-9));
      p[cls] = 0.0;
      f.points.push_back({{x, y}, p, 1.0});
      fuse(m, f);
    }
  return m;
}

}  // namespace

TEST(RunEpisode, ZeroBudgetFailsImmediately) {
  GridWorld w = fx::room(8, 6, {{1, 1}, Heading::E});
  w.add_object(fx::cls("Tomato"), {{2, 1}});
  w.add_object(fx::cls("DiningTable"), {{4, 3}, {5, 3}, {4, 4}, {5, 4}});
  ExecutorConfig cfg = oracle_config();
  cfg.budget = 0;
  const EpisodeRun r = run(w, "put a tomato on the diningtable", cfg);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.error, ErrorMode::Other);
  EXPECT_EQ(r.path_length, 0);
  EXPECT_EQ(r.steps, 0);
}

TEST(RunEpisode, WalledOffTargetIsBlocking) {
  GridWorld w = fx::layout({"##########", "#.....#..#", "#.....#..#", "#.....####", "#........#", "##########"},
                           {{1, 4}, Heading::E});
  const Cell hidden{7, 1};
  w.add_object(fx::cls("Tomato"), {hidden});
  w.add_object(fx::cls("DiningTable"), {{2, 1}, {3, 1}, {2, 2}, {3, 2}});
  // The prior puts every tomato in the sealed room.
  SemanticPolicy prior = uniform_policy(w.width(), w.height(), fx::catalog()->size());
  auto& g = prior.grids[static_cast<size_t>(fx::cls("Tomato"))];
  for (auto& v : g.data()) v = 0;
  g[hidden] = 1;
  ExecutorConfig cfg = oracle_config();
  cfg.budget = 200;
  const EpisodeRun r = run(w, "put a tomato on the diningtable", cfg, &prior);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.error, ErrorMode::BlockingOrNotAccessible);
}

TEST(RunEpisode, AdjacentPickAndPlaceNearOptimal) {
  GridWorld w = fx::room(9, 7, {{2, 2}, Heading::E});
  w.add_object(fx::cls("Tomato"), {{3, 2}});
  const std::vector<Cell> table{{5, 3}, {6, 3}, {5, 4}, {6, 4}};
  w.add_object(fx::cls("DiningTable"), table);
  GridWorld after = w;
  apply_action(after, Action::interact(ActionType::Pickup, 0));
  const int optimal = 1 + moves_to_reach(after, after.agent().cell, table, w.interaction_range()) + 1;
  const EpisodeRun r = run(w, "put a tomato on the diningtable", oracle_config());
  ASSERT_TRUE(r.success) << r.error_detail;
  EXPECT_LE(r.path_length, 2 * optimal);
  EXPECT_EQ(evaluate_goal_conditions(r.final_world, program("put a tomato on the diningtable")).met, 1);
}

TEST(RunEpisode, DeterministicAndMonotoneOnGeneratedScenes) {
  SceneSpec spec;
  spec.catalog = fx::catalog();
  spec.width = spec.height = 14;
  for (const char* n : {"Tomato", "Apple", "Mug", "DiningTable", "CounterTop", "SinkBasin", "Faucet", "Knife",
                        "FloorLamp"})
    spec.counts.push_back({fx::cls(n), 1, 1});
  int successes = 0, episodes = 0;
  for (uint64_t seed = 1; seed <= 8; ++seed) {
    const GridWorld w = generate_scene(spec, seed);
    Rng rng(seed);
    for (TaskType t : {TaskType::PickAndPlace, TaskType::CleanAndPlace, TaskType::Examine}) {
      const auto task = sample_task(w, fx::grammar(), t, true, rng);
      if (!task) continue;
      ExecutorConfig cfg = oracle_config();
      cfg.seed = seed;
      const EpisodeRun a = run(w, task->instruction, cfg);
      const EpisodeRun b = run(w, task->instruction, cfg);
      EXPECT_EQ(a.actions, b.actions);
      EXPECT_EQ(a.success, b.success);
      EXPECT_LE(a.steps, cfg.budget);
      EXPECT_EQ(a.poses.size(), a.actions.size() + 1);
      EXPECT_EQ(a.success, !a.error.has_value());
      // Completed subtasks form a prefix, completed in step order.
      bool open = false;
      int last = 0;
      for (const auto& s : a.subtasks) {
        if (!s.completed) {
          open = true;
          continue;
        }
        EXPECT_FALSE(open);
        EXPECT_GE(s.step, last);
        last = s.step;
      }
      if (a.success) {
        EXPECT_TRUE(a.goals.satisfied());
        EXPECT_LE(plan_expert(w, task->program).path_length, a.path_length);
      }
      ++episodes;
      successes += a.success;
      // With noiseless depth the only bumps come from objects dropped next to a
      // receptacle while the agent faces elsewhere.
      int bumps = 0, puts = 0;
      for (size_t i = 0; i < a.actions.size(); ++i) {
        bumps += a.actions[i].type == ActionType::MoveAhead && a.poses[i].cell == a.poses[i + 1].cell;
        puts += a.actions[i].type == ActionType::Put;
      }
      EXPECT_LE(bumps, puts);
    }
  }
  EXPECT_GE(successes, episodes * 3 / 4);
}

TEST(RunEpisode, DimensionMismatchRejectedBeforeStepping) {
  GridWorld w = fx::room(6, 6, {{1, 1}, Heading::E});
  w.add_object(fx::cls("Tomato"), {{2, 1}});
  w.add_object(fx::cls("Shelf"), {{4, 4}, {4, 3}});
  const Projection proj(7, 8, 32, 1);  // features have 16 dims
  const EmbeddingSet emb = embed_classes(*fx::catalog(), 1, EmbeddingStructure::Random);
  const Perception perception{&features(), &proj, &emb};
  EXPECT_THROW(run_episode(w, program("put a tomato on the shelf"), perception,
                           uniform_policy(6, 6, fx::catalog()->size()), ExecutorConfig{}),
               ConfigError);
}

TEST(SemanticPolicy, SingleMapIsItsNormalizedChannels) {
  const SemanticMap m = one_class_map(5, 4, 3, {{{1, 1}, 1}, {{3, 2}, 2}});
  const SemanticPolicy p = build_semantic_policy({m});
  for (int k = 0; k < 3; ++k) {
    double total = 0;
    for (size_t i = 0; i < m.cells().size(); ++i) total += m.class_probabilities(m.cells().cell(i))[k];
    for (size_t i = 0; i < m.cells().size(); ++i)
      EXPECT_NEAR(p.grids[static_cast<size_t>(k)].data()[i], m.class_probabilities(m.cells().cell(i))[k] / total,
                  1e-12);
  }
}

TEST(SemanticPolicy, TwoDisjointMapsAreBimodal) {
  const SemanticPolicy p =
      build_semantic_policy({one_class_map(6, 6, 2, {{{1, 1}, 1}}), one_class_map(6, 6, 2, {{{4, 4}, 1}})});
  EXPECT_NEAR(p.grids[1][(Cell{1, 1})], p.grids[1][(Cell{4, 4})], 1e-9);
  EXPECT_GT(p.grids[1][(Cell{1, 1})], 0.49);
  double sum = 0;
  for (double v : p.grids[1].data()) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(SemanticPolicy, ConcentratesWhereDemosPutTheClass) {
  Rng rng(4);
  std::vector<SemanticMap> maps;
  for (int d = 0; d < 20; ++d) {
    const Cell east{12 + static_cast<int>(rng() % 3), static_cast<int>(rng() % 15)};
    maps.push_back(one_class_map(15, 15, 3, {{east, 1}}));
  }
  const SemanticPolicy p = build_semantic_policy(maps);
  double east_mass = 0;
  for (int y = 0; y < 15; ++y)
    for (int x = 10; x < 15; ++x) east_mass += p.grids[1][Cell{x, y}];
  EXPECT_GE(east_mass, 0.8);
}

TEST(SemanticPolicy, EmptyInputThrowsAndJsonRoundTrips) {
  EXPECT_THROW(build_semantic_policy({}), InputError);
  const SemanticPolicy p = build_semantic_policy({one_class_map(4, 3, 2, {{{1, 1}, 1}})});
  const SemanticPolicy back = SemanticPolicy::from_json(p.to_json());
  ASSERT_EQ(back.num_classes(), 2);
  for (int k = 0; k < 2; ++k) EXPECT_EQ(back.grids[static_cast<size_t>(k)], p.grids[static_cast<size_t>(k)]);
}

TEST(SelectGoal, PrefersTheMapThenThePolicy) {
  const CostField field(Grid<uint8_t>(10, 10, 0), 0);
  const ArrivalField arrival = solve_eikonal(field, {0, 0});
  Rng rng(1);
  GoalQuery q;
  q.cls = 2;
  const SemanticMap seen = one_class_map(10, 10, 3, {{{6, 7}, 2}});
  SemanticPolicy delta = uniform_policy(10, 10, 3);
  for (auto& v : delta.grids[2].data()) v = 0;
  delta.grids[2][Cell{3, 8}] = 1;
  const GoalChoice a = select_goal(seen, delta, field, arrival, q, rng);
  EXPECT_EQ(a.cell, (Cell{6, 7}));
  EXPECT_EQ(a.source, GoalSource::Map);
  const GoalChoice b = select_goal(SemanticMap(10, 10, 3, 0), delta, field, arrival, q, rng);
  EXPECT_EQ(b.cell, (Cell{3, 8}));
  EXPECT_EQ(b.source, GoalSource::Policy);
  q.excluded.insert({3, 8});
  EXPECT_THROW(select_goal(SemanticMap(10, 10, 3, 0), delta, field, arrival, q, rng), UnreachableError);
}

TEST(SelectGoal, UniformPolicySampleFrequencies) {
  const CostField field(Grid<uint8_t>(10, 10, 0), 0);
  const ArrivalField arrival = solve_eikonal(field, {0, 0});
  const SemanticPolicy p = uniform_policy(10, 10, 2);
  GoalQuery q;
  q.cls = 1;
  Rng rng(12);
  Grid<int> counts(10, 10, 0);
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++counts[sample_policy_goal(p, field, arrival, q, rng)];
  // Chi-square with 99 degrees of freedom; 148.2 is the 0.1% tail.
  double chi2 = 0;
  for (int c : counts.data()) chi2 += (c - n * 0.01) * (c - n * 0.01) / (n * 0.01);
  EXPECT_LT(chi2, 148.2);
}

TEST(Navigation, TurnsAndFacing) {
  EXPECT_TRUE(turn_actions(Heading::N, Heading::N).empty());
  EXPECT_EQ(turn_actions(Heading::N, Heading::E), (std::vector<Action>{Action::rotate_right()}));
  EXPECT_EQ(turn_actions(Heading::N, Heading::S).size(), 2u);
  EXPECT_EQ(facing_heading({2, 2}, {5, 2}), Heading::E);
  EXPECT_EQ(facing_heading({2, 2}, {2, 0}), Heading::N);
}

TEST(GoalConditions, FixtureTable) {
  GridWorld w = fx::room(9, 7, {{2, 2}, Heading::E});
  const int tomato = w.add_object(fx::cls("Tomato"), {{3, 2}});
  w.add_object(fx::cls("Tomato"), {{1, 5}});
  const int table = w.add_object(fx::cls("DiningTable"), {{4, 3}, {5, 3}, {4, 4}, {5, 4}});
  const int lamp = w.add_object(fx::cls("FloorLamp"), {{2, 1}});

  const Program place = program("put a tomato on the diningtable");
  const Program clean = program("put a clean tomato on the diningtable");
  const Program two = program("put two tomato on the diningtable");
  const Program examine = program("examine a tomato under the floorlamp");
  auto gc = [](const GridWorld& s, const Program& p) {
    const auto g = evaluate_goal_conditions(s, p);
    return std::pair{g.met, g.total};
  };
  EXPECT_EQ(gc(w, place), std::pair(0, 1));
  EXPECT_EQ(gc(w, clean), std::pair(0, 2));
  EXPECT_EQ(gc(w, examine), std::pair(0, 2));

  ASSERT_EQ(apply_action(w, Action::interact(ActionType::Pickup, tomato)), StepOutcome::Ok);
  EXPECT_EQ(gc(w, examine), std::pair(1, 2));
  GridWorld lit = w;
  ASSERT_EQ(apply_action(lit, Action::interact(ActionType::ToggleOn, lamp)), StepOutcome::Ok);
  EXPECT_EQ(gc(lit, examine), std::pair(2, 2));

  ASSERT_EQ(apply_action(w, Action::move_ahead()), StepOutcome::Ok);
  ASSERT_EQ(apply_action(w, Action::interact(ActionType::Put, table)), StepOutcome::Ok);
  EXPECT_EQ(gc(w, place), std::pair(1, 1));
  EXPECT_EQ(gc(w, clean), std::pair(1, 2));
  EXPECT_EQ(gc(w, two), std::pair(1, 2));
}
