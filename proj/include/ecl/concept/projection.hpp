#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace ecl {

// Two-layer perceptron from visual-feature space into word-embedding space:
// affine -> layer norm -> GELU -> affine.
class Projection {
 public:
  struct Params {
    Eigen::MatrixXd w1;     // hidden x in
    Eigen::VectorXd b1;     // hidden
    Eigen::VectorXd gamma;  // hidden, layer-norm gain
    Eigen::VectorXd beta;   // hidden, layer-norm bias
    Eigen::MatrixXd w2;     // out x hidden
    Eigen::VectorXd b2;     // out

    Params& operator+=(const Params& o);
    Params& operator*=(double s);
    bool all_finite() const;
    double squared_norm() const;
  };

  // Per-batch intermediate values kept for the backward pass.
  struct Cache {
    Eigen::MatrixXd input;
    Eigen::MatrixXd normalized;  // layer-norm output before gain/bias
    Eigen::VectorXd inv_std;     // one per column
    Eigen::MatrixXd pre_act;     // gamma * normalized + beta
    Eigen::MatrixXd act;
  };

  static constexpr double kLayerNormEps = 1e-5;

  Projection() = default;
  Projection(int in_dim, int hidden_dim, int out_dim, uint64_t seed, double init_scale = 1.0);

  int in_dim() const { return static_cast<int>(params_.w1.cols()); }
  int hidden_dim() const { return static_cast<int>(params_.w1.rows()); }
  int out_dim() const { return static_cast<int>(params_.w2.rows()); }
  uint64_t seed() const { return seed_; }

  const Params& params() const { return params_; }
  Params& params() { return params_; }

  // Columns of `inputs` are feature vectors; returns out_dim x N.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs, Cache* cache = nullptr) const;
  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;

  // Gradient of sum_n <grad_out.col(n), y_n> with respect to the parameters.
  Params backward(const Cache& cache, const Eigen::MatrixXd& grad_out) const;

  Params zero_like() const;

  std::string to_json(const std::string& config_hash) const;
  static Projection from_json(const std::string& text);

  friend bool operator==(const Projection& a, const Projection& b);

 private:
  Params params_;
  uint64_t seed_ = 0;
};

double gelu(double x);
double gelu_derivative(double x);

}  // namespace ecl
