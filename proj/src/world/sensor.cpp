#include "ecl/world/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "ecl/common/io.hpp"
#include "ecl/common/rng.hpp"

namespace ecl {

Eigen::Vector2d ray_direction(Heading heading, double bearing) {
  const Cell h = heading_vector(heading);
  const double c = std::cos(bearing), s = std::sin(bearing);
  // y grows southward, so a left turn is a clockwise rotation in (x, y).
  return {h.x * c + h.y * s, h.y * c - h.x * s};
}

RayHit cast_ray(const GridWorld& world, Cell from, const Eigen::Vector2d& dir, double max_range) {
  const double ox = from.x + 0.5, oy = from.y + 0.5;
  Cell cur = from;
  const int step_x = dir.x() > 0 ? 1 : (dir.x() < 0 ? -1 : 0);
  const int step_y = dir.y() > 0 ? 1 : (dir.y() < 0 ? -1 : 0);
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double delta_x = step_x ? std::abs(1.0 / dir.x()) : inf;
  const double delta_y = step_y ? std::abs(1.0 / dir.y()) : inf;
  double t_max_x = step_x > 0 ? (cur.x + 1 - ox) * delta_x : (step_x < 0 ? (ox - cur.x) * delta_x : inf);
  double t_max_y = step_y > 0 ? (cur.y + 1 - oy) * delta_y : (step_y < 0 ? (oy - cur.y) * delta_y : inf);
  double t_enter = 0.0;
  while (t_enter <= max_range) {
    if (t_max_x < t_max_y) {
      t_enter = t_max_x;
      t_max_x += delta_x;
      cur.x += step_x;
    } else {
      t_enter = t_max_y;
      t_max_y += delta_y;
      cur.y += step_y;
    }
    if (!world.in_bounds(cur) || world.blocked(cur)) {
      const double t_exit = std::min(t_max_x, t_max_y);
      return {cur, 0.5 * (t_enter + t_exit), true};
    }
  }
  return {cur, max_range, false};
}

Observation observe(const GridWorld& world, const FeatureModel& features,
                    const SensorConfig& config) {
  Observation obs;
  obs.step_index = world.step_count();
  Rng noise_rng(derive_seed(world.rng_seed(), "depth-noise", static_cast<uint64_t>(world.step_count())));
  Rng feature_rng(derive_seed(world.rng_seed(), "proposal", static_cast<uint64_t>(world.step_count())));
  std::normal_distribution<double> unit(0.0, 1.0);

  const double fov = config.fov_deg * std::numbers::pi / 180.0;
  const AgentPose pose = world.agent();
  std::map<int, std::set<Cell>> visible;
  obs.rays.reserve(static_cast<size_t>(config.num_rays));
  for (int i = 0; i < config.num_rays; ++i) {
    const double bearing =
        config.num_rays == 1 ? 0.0 : -fov / 2 + fov * i / (config.num_rays - 1);
    const RayHit hit = cast_ray(world, pose.cell, ray_direction(pose.heading, bearing), config.max_range);
    const double sd = config.noise_a + config.noise_b * hit.depth;
    Ray ray;
    ray.bearing = bearing;
    ray.depth_variance = std::max(sd * sd, config.min_variance);
    ray.depth = hit.depth + (sd > 0 ? sd * unit(noise_rng) : 0.0);
    ray.depth = std::max(ray.depth, 0.05);
    obs.rays.push_back(ray);
    if (hit.hit && world.in_bounds(hit.cell)) {
      const int id = world.occupant(hit.cell);
      if (id >= 0) visible[id].insert(hit.cell);
    }
  }

  for (const auto& [id, cells] : visible) {
    const auto& o = world.object(id);
    Proposal p;
    p.object_id = id;
    p.feature = features.sample(o.class_id, feature_rng);
    p.visible_cells.assign(cells.begin(), cells.end());
    p.confidence = static_cast<double>(cells.size()) / static_cast<double>(o.footprint.size());
    obs.proposals.push_back(std::move(p));
  }
  if (auto held = world.held_object()) {
    Proposal p;
    p.object_id = *held;
    p.feature = features.sample(world.object(*held).class_id, feature_rng);
    p.confidence = 1.0;
    obs.held = std::move(p);
  }
  return obs;
}

std::string observation_digest(const Observation& obs) {
  std::ostringstream out;
  out << "step " << obs.step_index << '\n';
  for (const auto& r : obs.rays)
    out << format_double(r.bearing) << ' ' << format_double(r.depth) << ' '
        << format_double(r.depth_variance) << '\n';
  auto write_proposal = [&](const Proposal& p) {
    out << "p " << p.object_id << ' ' << format_double(p.confidence);
    for (Cell c : p.visible_cells) out << ' ' << c.x << ':' << c.y;
    for (int i = 0; i < p.feature.size(); ++i) out << ' ' << format_double(p.feature[i]);
    out << '\n';
  };
  for (const auto& p : obs.proposals) write_proposal(p);
  if (obs.held) {
    out << "held ";
    write_proposal(*obs.held);
  }
  return hex64(fnv1a(out.str()));
}

}  // namespace ecl
