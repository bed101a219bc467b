#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ecl/concept/frames.hpp"
#include "ecl/concept/projection.hpp"
#include "ecl/instruct/embedding.hpp"

namespace ecl {

struct TrainConfig {
  int epochs = 30;
  double learning_rate = 0.5;
  int batch_size = 16;
  int hidden_dim = 48;
  double init_scale = 1.0;
  double temperature = 0.1;
  uint64_t seed = 0;
};

// Held-out proposals with their true classes, for the validation column of
// the loss trace.
struct ValidationSet {
  std::vector<Eigen::VectorXd> features;
  std::vector<ClassId> truth;
};

struct EpochStats {
  int epoch = 0;
  double mean_matched_mse = 0.0;
  double validation_accuracy = 0.0;  // NaN without a validation set
};

struct TrainResult {
  Projection projection;
  std::vector<EpochStats> trace;
};

// Per mini-batch: project each sample's proposals, match them to the
// mentioned words by minimum-cost assignment on MSE, then one gradient step
// on the summed matched MSE. Unmatched proposals contribute nothing.
TrainResult train(const std::vector<DemoFrameSample>& samples, const EmbeddingSet& embeddings,
                  int feature_dim, const TrainConfig& config, const ValidationSet* validation = nullptr);

// Same loop starting from a given projection.
TrainResult train_from(Projection init, const std::vector<DemoFrameSample>& samples,
                       const EmbeddingSet& embeddings, const TrainConfig& config,
                       const ValidationSet* validation = nullptr);

std::string loss_trace_text(const std::vector<EpochStats>& trace);

}  // namespace ecl
