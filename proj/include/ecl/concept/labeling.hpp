#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <vector>

#include "ecl/concept/projection.hpp"
#include "ecl/instruct/embedding.hpp"

namespace ecl {

struct SoftLabel {
  std::vector<double> probabilities;  // indexed by catalog class id
  ClassId hard_label = -1;
};

// Retrieval distance between a projected feature and a word embedding:
// the mean squared error, the same metric used in training.
double mse_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Soft label from distances to candidate classes: softmax(temperature / d).
// A zero distance yields a one-hot on that class; ties resolve to the lowest
// class id.
SoftLabel soft_label_from_distances(const std::vector<std::pair<ClassId, double>>& distances,
                                    int num_classes, double temperature = 0.1);

std::vector<SoftLabel> label(const std::vector<Eigen::VectorXd>& features, const Projection& projection,
                             const std::vector<WordEmbedding>& embeddings, int num_classes,
                             double temperature = 0.1);

SoftLabel one_hot_label(ClassId cls, int num_classes);

struct ClassAccuracy {
  int correct = 0;
  int total = 0;
  double accuracy() const { return total ? static_cast<double>(correct) / total : 0.0; }
};

struct GroundingReport {
  std::map<ClassId, ClassAccuracy> per_class;  // classes with zero instances are absent
  int correct = 0;
  int total = 0;
  double overall() const { return total ? static_cast<double>(correct) / total : 0.0; }  // micro
  double macro() const;
};

GroundingReport grounding_accuracy(const std::vector<SoftLabel>& labels, const std::vector<ClassId>& truth);

}  // namespace ecl
