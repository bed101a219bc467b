#include "ecl/concept/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ecl/common/error.hpp"
#include "ecl/common/io.hpp"
#include "ecl/common/rng.hpp"
#include "ecl/concept/assignment.hpp"
#include "ecl/concept/labeling.hpp"

namespace ecl {

namespace {

double validation_accuracy(const Projection& p, const EmbeddingSet& embeddings, const ValidationSet* v,
                           const std::vector<WordEmbedding>& candidates) {
  if (!v || v->features.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto labels = label(v->features, p, candidates, static_cast<int>(embeddings.embeddings.size()));
  return grounding_accuracy(labels, v->truth).overall();
}

}  // namespace

TrainResult train(const std::vector<DemoFrameSample>& samples, const EmbeddingSet& embeddings,
                  int feature_dim, const TrainConfig& config, const ValidationSet* validation) {
  Projection init(feature_dim, config.hidden_dim, embeddings.dim(), derive_seed(config.seed, "projection"),
                  config.init_scale);
  return train_from(std::move(init), samples, embeddings, config, validation);
}

TrainResult train_from(Projection init, const std::vector<DemoFrameSample>& samples,
                       const EmbeddingSet& embeddings, const TrainConfig& config,
                       const ValidationSet* validation) {
  if (init.out_dim() != embeddings.dim())
    throw ConfigError("projection output dimension " + std::to_string(init.out_dim()) +
                      " does not match embedding dimension " + std::to_string(embeddings.dim()));
  if (config.epochs < 0 || config.batch_size < 1 || !(config.learning_rate > 0))
    throw ConfigError("invalid training configuration");
  if (samples.empty() && config.epochs > 0) throw InputError("no training samples");
  const int num_classes = static_cast<int>(embeddings.embeddings.size());
  for (const auto& s : samples)
    for (ClassId c : s.mentioned)
      if (c < 0 || c >= num_classes) throw InputError("mentioned class has no embedding");

  // Labeling during validation considers every class that can be mentioned.
  std::vector<WordEmbedding> candidates;
  {
    std::vector<bool> seen(static_cast<size_t>(num_classes), false);
    for (const auto& s : samples)
      for (ClassId c : s.mentioned) seen[static_cast<size_t>(c)] = true;
    for (ClassId c = 0; c < num_classes; ++c)
      if (seen[static_cast<size_t>(c)]) candidates.push_back(embeddings.embeddings[static_cast<size_t>(c)]);
  }

  TrainResult result{std::move(init), {}};
  Projection& proj = result.projection;
  const double out_dim = proj.out_dim();
  Rng rng(derive_seed(config.seed, "train-order"));
  std::vector<size_t> order(samples.size());
  std::iota(order.begin(), order.end(), size_t{0});

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    long pairs = 0;
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(config.batch_size)) {
      const size_t stop = std::min(order.size(), start + static_cast<size_t>(config.batch_size));
      Projection::Params grad = proj.zero_like();
      long batch_pairs = 0;
      for (size_t b = start; b < stop; ++b) {
        const auto& s = samples[order[b]];
        const auto k = static_cast<Eigen::Index>(s.proposals.size());
        const auto l = static_cast<Eigen::Index>(s.mentioned.size());
        if (k == 0 || l == 0) continue;
        Eigen::MatrixXd inputs(proj.in_dim(), k);
        for (Eigen::Index i = 0; i < k; ++i) inputs.col(i) = s.proposals[static_cast<size_t>(i)].feature;
        Projection::Cache cache;
        const Eigen::MatrixXd y = proj.forward(inputs, &cache);
        Eigen::MatrixXd costs(k, l);
        for (Eigen::Index i = 0; i < k; ++i)
          for (Eigen::Index j = 0; j < l; ++j)
            costs(i, j) = mse_distance(y.col(i), embeddings.embeddings[static_cast<size_t>(s.mentioned[j])].vector);
        const Assignment a = solve_assignment(costs);
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(y.rows(), k);
        for (Eigen::Index i = 0; i < k; ++i) {
          const int j = a.row_to_col[static_cast<size_t>(i)];
          if (j < 0) continue;
          const auto& e = embeddings.embeddings[static_cast<size_t>(s.mentioned[static_cast<size_t>(j)])].vector;
          g.col(i) = 2.0 * (y.col(i) - e) / out_dim;
          loss_sum += costs(i, j);
          ++pairs;
          ++batch_pairs;
        }
        if (batch_pairs > 0) grad += proj.backward(cache, g);
      }
      if (batch_pairs == 0) continue;
      grad *= -config.learning_rate / static_cast<double>(stop - start);
      proj.params() += grad;
      if (!proj.params().all_finite()) throw Error("training diverged (non-finite parameters)");
    }
    EpochStats st;
    st.epoch = epoch;
    st.mean_matched_mse = pairs ? loss_sum / static_cast<double>(pairs) : 0.0;
    st.validation_accuracy = validation_accuracy(proj, embeddings, validation, candidates);
    result.trace.push_back(st);
  }
  return result;
}

std::string loss_trace_text(const std::vector<EpochStats>& trace) {
  std::ostringstream out;
  out << "# ecl-loss-trace v1\n# epoch mean_matched_mse validation_accuracy\n";
  for (const auto& s : trace)
    out << s.epoch << ' ' << format_double(s.mean_matched_mse) << ' '
        << (std::isnan(s.validation_accuracy) ? std::string("nan") : format_double(s.validation_accuracy)) << '\n';
  return out.str();
}

}  // namespace ecl
