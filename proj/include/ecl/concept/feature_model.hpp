#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "ecl/common/rng.hpp"
#include "ecl/world/catalog.hpp"

namespace ecl {

// Hidden visual appearance of each class: a prototype per class pushed
// through a fixed full-rank mixing, plus isotropic per-proposal noise.
// Stands in for detector features; learners never see class ids.
class FeatureModel {
 public:
  FeatureModel() = default;
  // group_correlation in [0, 1): share of prototype variance common to a
  // semantic group, so that e.g. Tomato and Apple look alike.
  FeatureModel(const Catalog& catalog, int dim, double noise_sigma, uint64_t seed,
               double group_correlation = 0.0);

  int dim() const { return static_cast<int>(prototypes_.rows()); }
  int num_classes() const { return static_cast<int>(prototypes_.cols()); }
  double noise_sigma() const { return noise_sigma_; }
  uint64_t seed() const { return seed_; }

  const Eigen::MatrixXd& prototypes() const { return prototypes_; }
  const Eigen::MatrixXd& transform() const { return transform_; }

  // Noise-free feature of a class.
  Eigen::VectorXd appearance(ClassId cls) const;
  Eigen::VectorXd sample(ClassId cls, Rng& rng) const;

 private:
  Eigen::MatrixXd prototypes_;  // dim x classes
  Eigen::MatrixXd transform_;   // dim x dim
  double noise_sigma_ = 0.0;
  uint64_t seed_ = 0;
};

}  // namespace ecl
