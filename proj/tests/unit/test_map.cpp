#include <gtest/gtest.h>

#include <cmath>

#include "ecl/common/error.hpp"
#include "ecl/executor/executor.hpp"
#include "ecl/map/semantic_map.hpp"
#include "ecl/world/scene.hpp"
#include "support/fixtures.hpp"

using namespace ecl;
namespace fx = ecl::fixture;

namespace {

constexpr int kClasses = 4;

Eigen::VectorXd log_probs(std::vector<double> p) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(p.size()));
  for (size_t i = 0; i < p.size(); ++i) v[static_cast<Eigen::Index>(i)] = std::log(p[i]);
  return v;
}

PointCloudFrame single(Cell c, Eigen::VectorXd p, double sigma) {
  PointCloudFrame f;
  f.pose_used = {{0, 0}, Heading::E};
  f.points.push_back({c, std::move(p), sigma});
  return f;
}

Ray ray(double bearing, double depth, double variance = 0.01) { return {bearing, depth, variance}; }

SoftLabel label_of(std::vector<double> p) {
  SoftLabel s;
  s.probabilities = std::move(p);
  s.hard_label = static_cast<ClassId>(std::max_element(s.probabilities.begin(), s.probabilities.end()) -
                                      s.probabilities.begin());
  return s;
}

}  // namespace

TEST(FuseScalar, EqualPrecisionAverages) {
  const auto [p, s] = fuse_scalar(0.0, 1.0, 2.0, 1.0);
  EXPECT_DOUBLE_EQ(p, 1.0);
  EXPECT_NEAR(s, 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(FuseScalar, VacuousObservationChangesNothing) {
  const auto [p, s] = fuse_scalar(0.3, 0.5, -7.0, 1e6);
  EXPECT_NEAR(p, 0.3, 1e-6);
  EXPECT_NEAR(s, 0.5, 1e-9);
}

TEST(FuseScalar, VarianceShrinksBelowBoth) {
  Rng rng(4);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double sm = u(rng), ss = u(rng);
    const double out = fuse_scalar(0.0, sm, 1.0, ss).second;
    EXPECT_LT(out, std::min(sm, ss));
  }
}

TEST(Fuse, FirstObservationIsCopied) {
  SemanticMap m(6, 6, kClasses, 0);
  const Eigen::VectorXd p = log_probs({0.1, 0.6, 0.2, 0.1});
  fuse(m, single({2, 3}, p, 0.7));
  EXPECT_TRUE(m.cell({2, 3}).observed);
  EXPECT_EQ(m.cell({2, 3}).p, p);
  EXPECT_EQ(m.cell({2, 3}).sigma, 0.7);
  EXPECT_FALSE(m.cell({3, 3}).observed);
}

TEST(Fuse, IdenticalVectorsStayPut) {
  SemanticMap m(6, 6, kClasses, 0);
  const Eigen::VectorXd p = log_probs({0.1, 0.6, 0.2, 0.1});
  fuse(m, single({1, 1}, p, 0.3));
  fuse(m, single({1, 1}, p, 2.0));
  EXPECT_TRUE(m.cell({1, 1}).p.isApprox(p, 1e-15));  // weights sum to one
}

TEST(Fuse, OrderOfTwoFramesDoesNotMatter) {
  const auto a = single({2, 2}, log_probs({0.7, 0.1, 0.1, 0.1}), 0.4);
  const auto b = single({2, 2}, log_probs({0.1, 0.1, 0.1, 0.7}), 1.3);
  SemanticMap ab(5, 5, kClasses, 0), ba(5, 5, kClasses, 0);
  fuse(ab, a);
  fuse(ab, b);
  fuse(ba, b);
  fuse(ba, a);
  EXPECT_LE((ab.cell({2, 2}).p - ba.cell({2, 2}).p).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(ab.cell({2, 2}).sigma, ba.cell({2, 2}).sigma, 1e-9);
}

TEST(Fuse, VacuousFrameLeavesMapAlone) {
  SemanticMap m(5, 5, kClasses, 0);
  fuse(m, single({2, 2}, log_probs({0.7, 0.1, 0.1, 0.1}), 0.4));
  const Eigen::VectorXd before = m.cell({2, 2}).p;
  fuse(m, single({2, 2}, log_probs({0.01, 0.01, 0.01, 0.97}), 1e6));
  EXPECT_LE((m.cell({2, 2}).p - before).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Fuse, OutOfBoundsPointThrows) {
  SemanticMap m(5, 5, kClasses, 0);
  EXPECT_THROW(fuse(m, single({7, 1}, log_probs({0.25, 0.25, 0.25, 0.25}), 1.0)), InputError);
}

TEST(FuseMax, ReplacesOnlyWhenMoreConfident) {
  SemanticMap m(5, 5, kClasses, 0);
  fuse_max(m, single({1, 1}, log_probs({0.6, 0.2, 0.1, 0.1}), 1.0));
  fuse_max(m, single({1, 1}, log_probs({0.05, 0.9, 0.03, 0.02}), 1.0));
  EXPECT_EQ(m.argmax_class({1, 1}), 1);
  SemanticMap k(5, 5, kClasses, 0);
  fuse_max(k, single({1, 1}, log_probs({0.6, 0.2, 0.1, 0.1}), 1.0));
  fuse_max(k, single({1, 1}, log_probs({0.2, 0.4, 0.2, 0.2}), 0.01));
  EXPECT_EQ(k.argmax_class({1, 1}), 0);
}

// One confident wrong frame with a large sigma, then five consistent but
// less confident frames.
TEST(FuseMax, BayesRecoversFromCorruptionAtLeastAsOften) {
  double diff = 0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    SemanticMap bayes(8, 8, kClasses, 0), max(8, 8, kClasses, 0);
    std::vector<int> truth;
    for (int i = 0; i < 64; ++i) {
      const int t = static_cast<int>(rng() % kClasses);
      const int wrong = (t + 1 + static_cast<int>(rng() % (kClasses - 1))) % kClasses;
      truth.push_back(t);
      const Cell c{i % 8, i / 8};
      std::vector<double> bad(kClasses, 0.02);
      bad[static_cast<size_t>(wrong)] = 0.94;
      const auto corrupt = single(c, log_probs(bad), 10.0);
      fuse(bayes, corrupt);
      fuse_max(max, corrupt);
      std::uniform_real_distribution<double> conf(0.4, 0.7);
      for (int k = 0; k < 5; ++k) {
        const double q = conf(rng);
        std::vector<double> good(kClasses, (1 - q) / (kClasses - 1));
        good[static_cast<size_t>(t)] = q;
        const auto ok = single(c, log_probs(good), 1.0);
        fuse(bayes, ok);
        fuse_max(max, ok);
      }
    }
    int hb = 0, hm = 0;
    for (int i = 0; i < 64; ++i) {
      hb += bayes.argmax_class({i % 8, i / 8}) == truth[static_cast<size_t>(i)];
      hm += max.argmax_class({i % 8, i / 8}) == truth[static_cast<size_t>(i)];
    }
    EXPECT_EQ(hb, 64);
    diff += (hb - hm) / 64.0;
  }
  EXPECT_GE(diff / 20, 0.0);
}

TEST(ProjectObservation, AxisAlignedRayLandsOnCell) {
  const SemanticMap m(10, 10, kClasses, 0);
  Observation obs;
  obs.rays = {ray(0.0, 3.0)};
  const auto f = project_observation(obs, {{0, 0}, Heading::E}, {}, m);
  ASSERT_EQ(f.points.size(), 1u);
  EXPECT_EQ(f.points[0].cell, (Cell{3, 0}));
  EXPECT_NEAR(f.points[0].sigma, 0.1, 1e-12);
  ASSERT_EQ(f.rays.size(), 1u);
  EXPECT_EQ(f.rays[0].free_cells, (std::vector<Cell>{{0, 0}, {1, 0}, {2, 0}}));
}

TEST(ProjectObservation, EgoMotionTransformIsFrameInvariant) {
  const SemanticMap m(12, 12, kClasses, 0);
  Observation east, north;
  east.rays = {ray(M_PI / 2, 4.0), ray(0.3, 2.5)};
  north.rays = {ray(0.0, 4.0), ray(0.3 - M_PI / 2, 2.5)};
  const auto a = project_observation(east, {{5, 6}, Heading::E}, {}, m);
  const auto b = project_observation(north, {{5, 6}, Heading::N}, {}, m);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i].cell, b.points[i].cell);
}

TEST(ProjectObservation, ProposalLabelAndWithinFrameVoxelization) {
  const SemanticMap m(10, 10, kClasses, 0);
  Observation obs;
  obs.rays = {ray(0.0, 3.0, 1.0), ray(0.05, 3.0, 1.0), ray(-0.5, 2.0, 0.04)};
  Proposal p;
  p.visible_cells = {{3, 0}};
  obs.proposals.push_back(p);
  const auto f = project_observation(obs, {{0, 0}, Heading::E}, {label_of({0.1, 0.2, 0.6, 0.1})}, m);
  const FramePoint* hit = nullptr;
  for (const auto& pt : f.points)
    if (pt.cell == Cell{3, 0}) hit = &pt;
  ASSERT_NE(hit, nullptr);
  EXPECT_NEAR(hit->sigma, 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_TRUE(hit->p.isApprox(log_probs({0.1, 0.2, 0.6, 0.1}), 1e-12));
  for (const auto& pt : f.points)
    if (pt.cell != Cell{3, 0}) EXPECT_EQ(pt.p[0], 0.0);  // background one-hot in log domain
}

TEST(ProjectObservation, PoseOutsideMapDropsFrame) {
  SemanticMap m(5, 5, kClasses, 0);
  Observation obs;
  obs.rays = {ray(0.0, 1.0)};
  const auto f = project_observation(obs, {{9, 9}, Heading::E}, {}, m);
  EXPECT_FALSE(f.transform_error.empty());
  fuse(m, f);
  EXPECT_EQ(m.dropped_frames(), 1);
}

TEST(ProjectObservation, MisalignedLabelsThrow) {
  const SemanticMap m(5, 5, kClasses, 0);
  Observation obs;
  obs.proposals.resize(2);
  EXPECT_THROW(project_observation(obs, {{1, 1}, Heading::E}, {label_of({1, 0, 0, 0})}, m), InputError);
}

TEST(ObstacleChannel, RaysCarveFreeAndMarkHits) {
  SemanticMap m(10, 3, kClasses, 0);
  Observation obs;
  obs.rays = {ray(0.0, 5.0)};
  fuse(m, project_observation(obs, {{0, 1}, Heading::E}, {}, m));
  for (int x = 1; x < 5; ++x) EXPECT_LT(m.occupancy({x, 1}), 0.0);
  EXPECT_TRUE(m.likely_occupied({5, 1}));
  EXPECT_FALSE(m.known({7, 1}));
}

TEST(QueryClassCells, EmptyMapAndSingleEvidence) {
  SemanticMap m(10, 10, kClasses, 0);
  EXPECT_TRUE(query_class_cells(m, 2).empty());
  fuse(m, single({5, 5}, log_probs({0.1, 0.1, 0.7, 0.1}), 0.5));
  const auto q = query_class_cells(m, 2);
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(q[0].first, (Cell{5, 5}));
  EXPECT_GT(q[0].second, 1.0 / kClasses);
}

TEST(QueryClassCells, LinearDomainSwitch) {
  MapConfig cfg;
  cfg.linear_domain = true;
  SemanticMap m(4, 4, kClasses, 0, cfg);
  Eigen::VectorXd p(kClasses);
  p << 0.1, 0.6, 0.2, 0.1;
  fuse(m, single({1, 1}, p, 1.0));
  EXPECT_NEAR(m.class_probabilities({1, 1})[1], 0.6, 1e-12);
  EXPECT_EQ(query_class_cells(m, 1).size(), 1u);
}

TEST(Snapshot, RoundTripAndDigest) {
  SemanticMap m(6, 4, kClasses, 0);
  fuse(m, single({2, 1}, log_probs({0.1, 0.7, 0.1, 0.1}), 0.5));
  Observation obs;
  obs.rays = {ray(0.0, 3.0)};
  fuse(m, project_observation(obs, {{0, 2}, Heading::E}, {}, m));
  m.mark_traversed({0, 2});
  m.note_dropped_frame();
  const SemanticMap back = SemanticMap::from_snapshot(m.snapshot());
  EXPECT_TRUE(back == m);
  EXPECT_EQ(back.snapshot(), m.snapshot());
  EXPECT_THROW(SemanticMap::from_snapshot("garbage"), FormatError);
  const std::string digest = m.bev_digest(*fx::catalog());
  EXPECT_EQ(std::count(digest.begin(), digest.end(), '\n'), 4);
}

// Noiseless oracle sweep of generated scenes: labelled cells cover the
// footprints of the objects the sweep could see.
TEST(QueryClassCells, OracleSweepCoversFootprints) {
  SceneSpec spec;
  spec.catalog = fx::catalog();
  spec.width = spec.height = 14;
  for (const char* n : {"Tomato", "Apple", "Mug", "Book", "DiningTable", "CounterTop", "Shelf"})
    spec.counts.push_back({fx::cls(n), 1, 2});
  const FeatureModel fm(*fx::catalog(), 8, 0.1, 1);
  ExecutorConfig cfg;
  cfg.oracle_semantics = true;
  cfg.sensor.noise_a = cfg.sensor.noise_b = 0;
  cfg.budget = 600;
  int covered = 0, total = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const GridWorld w = generate_scene(spec, seed);
    const SemanticMap map = explore_scene(w, {&fm, nullptr, nullptr}, cfg);
    for (const auto& o : w.objects()) {
      const auto cells = query_class_cells(map, o.class_id);
      for (Cell c : o.footprint) {
        ++total;
        covered += std::any_of(cells.begin(), cells.end(), [&](const auto& q) { return q.first == c; });
      }
    }
  }
  EXPECT_GE(static_cast<double>(covered) / total, 0.95);
}
