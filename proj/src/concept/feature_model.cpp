#include "ecl/concept/feature_model.hpp"

#include <map>

#include "ecl/common/error.hpp"

namespace ecl {

FeatureModel::FeatureModel(const Catalog& catalog, int dim, double noise_sigma, uint64_t seed,
                           double group_correlation)
    : noise_sigma_(noise_sigma), seed_(seed) {
  if (dim < 1) throw ConfigError("feature dimension must be positive");
  if (noise_sigma < 0) throw ConfigError("noise_sigma must be non-negative");
  if (group_correlation < 0 || group_correlation >= 1)
    throw ConfigError("group_correlation must lie in [0, 1)");
  Rng rng(derive_seed(seed, "feature-model"));
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian = [&](int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
    return v;
  };

  const int classes = catalog.size();
  prototypes_.resize(dim, classes);
  std::map<std::string, Eigen::VectorXd> group_centers;
  const double shared = std::sqrt(group_correlation);
  const double own = std::sqrt(1.0 - group_correlation);
  for (ClassId c = 0; c < classes; ++c) {
    Eigen::VectorXd v = gaussian(dim);
    const auto& group = catalog[c].group;
    if (!group.empty() && group_correlation > 0) {
      auto it = group_centers.find(group);
      if (it == group_centers.end()) it = group_centers.emplace(group, gaussian(dim)).first;
      v = shared * it->second + own * v;
    }
    prototypes_.col(c) = v;
  }

  // Orthogonal factor times a bounded positive diagonal: always invertible.
  Eigen::MatrixXd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  std::uniform_real_distribution<double> scale(0.5, 1.5);
  Eigen::VectorXd s(dim);
  for (int i = 0; i < dim; ++i) s[i] = scale(rng);
  transform_ = q * s.asDiagonal();
}

Eigen::VectorXd FeatureModel::appearance(ClassId cls) const {
  if (cls < 0 || cls >= num_classes()) throw InputError("feature model: bad class id");
  return transform_ * prototypes_.col(cls);
}

Eigen::VectorXd FeatureModel::sample(ClassId cls, Rng& rng) const {
  Eigen::VectorXd f = appearance(cls);
  if (noise_sigma_ > 0) {
    std::normal_distribution<double> normal(0.0, noise_sigma_);
    for (int i = 0; i < f.size(); ++i) f[i] += normal(rng);
  }
  return f;
}

}  // namespace ecl
