#include "ecl/concept/projection.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>

#include "ecl/common/error.hpp"
#include "ecl/common/rng.hpp"

namespace ecl {

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double gelu_derivative(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

Projection::Params& Projection::Params::operator+=(const Params& o) {
  w1 += o.w1;
  b1 += o.b1;
  gamma += o.gamma;
  beta += o.beta;
  w2 += o.w2;
  b2 += o.b2;
  return *this;
}

Projection::Params& Projection::Params::operator*=(double s) {
  w1 *= s;
  b1 *= s;
  gamma *= s;
  beta *= s;
  w2 *= s;
  b2 *= s;
  return *this;
}

bool Projection::Params::all_finite() const {
  return w1.allFinite() && b1.allFinite() && gamma.allFinite() && beta.allFinite() &&
         w2.allFinite() && b2.allFinite();
}

double Projection::Params::squared_norm() const {
  return w1.squaredNorm() + b1.squaredNorm() + gamma.squaredNorm() + beta.squaredNorm() +
         w2.squaredNorm() + b2.squaredNorm();
}

Projection::Projection(int in_dim, int hidden_dim, int out_dim, uint64_t seed, double init_scale)
    : seed_(seed) {
  if (in_dim < 1 || hidden_dim < 1 || out_dim < 1) throw ConfigError("projection dimensions must be positive");
  Rng rng(derive_seed(seed, "projection-init"));
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_matrix = [&](int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    const double sd = init_scale / std::sqrt(static_cast<double>(cols));
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = sd * normal(rng);
    return m;
  };
  params_.w1 = random_matrix(hidden_dim, in_dim);
  params_.b1 = Eigen::VectorXd::Zero(hidden_dim);
  params_.gamma = Eigen::VectorXd::Ones(hidden_dim);
  params_.beta = Eigen::VectorXd::Zero(hidden_dim);
  params_.w2 = random_matrix(out_dim, hidden_dim);
  params_.b2 = Eigen::VectorXd::Zero(out_dim);
}

Eigen::MatrixXd Projection::forward(const Eigen::MatrixXd& inputs, Cache* cache) const {
  if (inputs.rows() != in_dim()) throw ConfigError("projection input dimension mismatch");
  const auto n = inputs.cols();
  Eigen::MatrixXd h = (params_.w1 * inputs).colwise() + params_.b1;
  Eigen::VectorXd inv_std(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const double mean = h.col(c).mean();
    h.col(c).array() -= mean;
    const double var = h.col(c).squaredNorm() / static_cast<double>(h.rows());
    inv_std[c] = 1.0 / std::sqrt(var + kLayerNormEps);
    h.col(c) *= inv_std[c];
  }
  Eigen::MatrixXd z = (h.array().colwise() * params_.gamma.array()).matrix().colwise() + params_.beta;
  Eigen::MatrixXd a = z.unaryExpr([](double v) { return gelu(v); });
  Eigen::MatrixXd y = (params_.w2 * a).colwise() + params_.b2;
  if (cache) {
    cache->input = inputs;
    cache->normalized = std::move(h);
    cache->inv_std = std::move(inv_std);
    cache->pre_act = std::move(z);
    cache->act = std::move(a);
  }
  return y;
}

Eigen::VectorXd Projection::forward(const Eigen::VectorXd& input) const {
  return forward(Eigen::MatrixXd(input)).col(0);
}

Projection::Params Projection::backward(const Cache& cache, const Eigen::MatrixXd& grad_out) const {
  Params g;
  g.w2 = grad_out * cache.act.transpose();
  g.b2 = grad_out.rowwise().sum();
  const Eigen::MatrixXd d_act = params_.w2.transpose() * grad_out;
  const Eigen::MatrixXd d_pre =
      d_act.cwiseProduct(cache.pre_act.unaryExpr([](double v) { return gelu_derivative(v); }));
  g.gamma = d_pre.cwiseProduct(cache.normalized).rowwise().sum();
  g.beta = d_pre.rowwise().sum();
  Eigen::MatrixXd d_norm = d_pre.array().colwise() * params_.gamma.array();
  const double dim = static_cast<double>(d_norm.rows());
  Eigen::MatrixXd d_h(d_norm.rows(), d_norm.cols());
  for (Eigen::Index c = 0; c < d_norm.cols(); ++c) {
    const double mean_d = d_norm.col(c).sum() / dim;
    const double mean_dn = d_norm.col(c).dot(cache.normalized.col(c)) / dim;
    d_h.col(c) = cache.inv_std[c] *
                 (d_norm.col(c).array() - mean_d - cache.normalized.col(c).array() * mean_dn).matrix();
  }
  g.w1 = d_h * cache.input.transpose();
  g.b1 = d_h.rowwise().sum();
  return g;
}

Projection::Params Projection::zero_like() const {
  Params z = params_;
  z *= 0.0;
  return z;
}

namespace {

nlohmann::ordered_json matrix_json(const Eigen::MatrixXd& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  return flat;
}

Eigen::MatrixXd matrix_from(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols) {
  const auto flat = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(flat.size()) != rows * cols) throw FormatError("projection: tensor size mismatch");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = flat[static_cast<size_t>(i * cols + k)];
  return m;
}

}  // namespace

std::string Projection::to_json(const std::string& config_hash) const {
  nlohmann::ordered_json j;
  j["format"] = "ecl-projection v1";
  j["in_dim"] = in_dim();
  j["hidden_dim"] = hidden_dim();
  j["out_dim"] = out_dim();
  j["seed"] = seed_;
  j["config_hash"] = config_hash;
  j["w1"] = matrix_json(params_.w1);
  j["b1"] = matrix_json(params_.b1);
  j["gamma"] = matrix_json(params_.gamma);
  j["beta"] = matrix_json(params_.beta);
  j["w2"] = matrix_json(params_.w2);
  j["b2"] = matrix_json(params_.b2);
  return j.dump() + "\n";
}

Projection Projection::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("format") != "ecl-projection v1") throw FormatError("projection: bad format tag");
  const int in = j.at("in_dim"), hidden = j.at("hidden_dim"), out = j.at("out_dim");
  Projection p;
  p.seed_ = j.at("seed").get<uint64_t>();
  p.params_.w1 = matrix_from(j.at("w1"), hidden, in);
  p.params_.b1 = matrix_from(j.at("b1"), hidden, 1);
  p.params_.gamma = matrix_from(j.at("gamma"), hidden, 1);
  p.params_.beta = matrix_from(j.at("beta"), hidden, 1);
  p.params_.w2 = matrix_from(j.at("w2"), out, hidden);
  p.params_.b2 = matrix_from(j.at("b2"), out, 1);
  if (!p.params_.all_finite()) throw FormatError("projection: non-finite parameters");
  return p;
}

bool operator==(const Projection& a, const Projection& b) {
  const auto& x = a.params_;
  const auto& y = b.params_;
  return a.seed_ == b.seed_ && x.w1 == y.w1 && x.b1 == y.b1 && x.gamma == y.gamma &&
         x.beta == y.beta && x.w2 == y.w2 && x.b2 == y.b2;
}

}  // namespace ecl
