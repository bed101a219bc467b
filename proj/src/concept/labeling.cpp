#include "ecl/concept/labeling.hpp"

#include <cmath>
#include <limits>

#include "ecl/common/error.hpp"

namespace ecl {

double mse_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

SoftLabel one_hot_label(ClassId cls, int num_classes) {
  SoftLabel s;
  s.probabilities.assign(static_cast<size_t>(num_classes), 0.0);
  s.probabilities[static_cast<size_t>(cls)] = 1.0;
  s.hard_label = cls;
  return s;
}

SoftLabel soft_label_from_distances(const std::vector<std::pair<ClassId, double>>& distances,
                                    int num_classes, double temperature) {
  if (distances.empty()) throw InputError("labeling needs at least one class embedding");
  ClassId best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& [cls, d] : distances) {
    if (d < best_d || (d == best_d && cls < best)) {
      best_d = d;
      best = cls;
    }
  }
  if (best_d <= 0.0) return one_hot_label(best, num_classes);
  double max_logit = -std::numeric_limits<double>::infinity();
  for (const auto& [cls, d] : distances) max_logit = std::max(max_logit, temperature / d);
  SoftLabel s;
  s.probabilities.assign(static_cast<size_t>(num_classes), 0.0);
  double total = 0.0;
  for (const auto& [cls, d] : distances) {
    const double w = std::exp(temperature / d - max_logit);
    s.probabilities[static_cast<size_t>(cls)] = w;
    total += w;
  }
  for (auto& p : s.probabilities) p /= total;
  s.hard_label = best;
  return s;
}

std::vector<SoftLabel> label(const std::vector<Eigen::VectorXd>& features, const Projection& projection,
                             const std::vector<WordEmbedding>& embeddings, int num_classes,
                             double temperature) {
  if (embeddings.empty()) throw InputError("labeling needs at least one class embedding");
  for (const auto& e : embeddings)
    if (e.vector.size() != projection.out_dim()) throw ConfigError("embedding/projection dimension mismatch");
  std::vector<SoftLabel> out;
  out.reserve(features.size());
  if (features.empty()) return out;
  Eigen::MatrixXd inputs(projection.in_dim(), static_cast<Eigen::Index>(features.size()));
  for (size_t i = 0; i < features.size(); ++i) inputs.col(static_cast<Eigen::Index>(i)) = features[i];
  const Eigen::MatrixXd projected = projection.forward(inputs);
  std::vector<std::pair<ClassId, double>> d(embeddings.size());
  for (Eigen::Index i = 0; i < projected.cols(); ++i) {
    for (size_t j = 0; j < embeddings.size(); ++j)
      d[j] = {embeddings[j].class_id, mse_distance(projected.col(i), embeddings[j].vector)};
    out.push_back(soft_label_from_distances(d, num_classes, temperature));
  }
  return out;
}

double GroundingReport::macro() const {
  if (per_class.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [cls, acc] : per_class) sum += acc.accuracy();
  return sum / static_cast<double>(per_class.size());
}

GroundingReport grounding_accuracy(const std::vector<SoftLabel>& labels, const std::vector<ClassId>& truth) {
  if (labels.size() != truth.size()) throw InputError("labels and truth differ in length");
  GroundingReport r;
  for (size_t i = 0; i < labels.size(); ++i) {
    auto& acc = r.per_class[truth[i]];
    ++acc.total;
    ++r.total;
    if (labels[i].hard_label == truth[i]) {
      ++acc.correct;
      ++r.correct;
    }
  }
  return r;
}

}  // namespace ecl
