#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "ecl/concept/feature_model.hpp"
#include "ecl/world/world.hpp"

namespace ecl {

struct SensorConfig {
  int num_rays = 37;
  double fov_deg = 110.0;
  // Depth noise standard deviation is noise_a + noise_b * depth.
  double noise_a = 0.05;
  double noise_b = 0.02;
  double max_range = 64.0;
  // Floor on the reported per-ray variance (keeps it strictly positive).
  double min_variance = 1e-12;
};

struct Ray {
  double bearing = 0.0;  // radians, positive turns left of the heading
  double depth = 0.0;    // cells
  double depth_variance = 0.0;
};

struct Proposal {
  int object_id = -1;  // interaction handle; never a training label
  Eigen::VectorXd feature;
  std::vector<Cell> visible_cells;
  double confidence = 1.0;
};

struct Observation {
  std::vector<Ray> rays;
  std::vector<Proposal> proposals;
  std::optional<Proposal> held;  // object in the agent's hand, if any
  long step_index = 0;
};

// Unit direction of a ray with the given bearing for an agent heading.
Eigen::Vector2d ray_direction(Heading heading, double bearing);

struct RayHit {
  Cell cell{-1, -1};
  double depth = 0.0;  // midpoint of the ray chord through the hit cell
  bool hit = false;
};

// First blocking cell along a ray from the centre of `from`.
RayHit cast_ray(const GridWorld& world, Cell from, const Eigen::Vector2d& dir, double max_range);

// Deterministic in (world state, step counter, world seed).
Observation observe(const GridWorld& world, const FeatureModel& features,
                    const SensorConfig& config = {});

std::string observation_digest(const Observation& obs);

}  // namespace ecl
