#include "pforge/diffusion/oracles.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pforge::diffusion {

namespace {

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  Eigen::VectorXd v(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) v(r * m.cols() + c) = m(r, c);
  return v;
}

// Mean of a von Mises-Fisher distribution on S^2 relative to its mode: coth(k) - 1/k.
double langevin(double k) {
  if (k < 1e-3) return k / 3.0 - k * k * k / 45.0;
  return 1.0 / std::tanh(k) - 1.0 / k;
}

}  // namespace

GmmOracleDenoiser::GmmOracleDenoiser(std::vector<GmmComponent> components, NoiseSchedule schedule)
    : components_(std::move(components)), schedule_(schedule) {
  if (components_.empty()) throw std::invalid_argument("gmm: no components");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0)) throw std::invalid_argument("gmm: weights must be positive");
    if (c.variance < 0.0) throw std::invalid_argument("gmm: negative variance");
    if (c.mean.rows() != components_.front().mean.rows() || c.mean.cols() != components_.front().mean.cols())
      throw std::invalid_argument("gmm: component shapes differ");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("gmm: weights must sum to 1");
  schedule_.validate();
}

Eigen::VectorXd GmmOracleDenoiser::weights() const {
  Eigen::VectorXd w(static_cast<Eigen::Index>(components_.size()));
  for (std::size_t j = 0; j < components_.size(); ++j) w(static_cast<Eigen::Index>(j)) = components_[j].weight;
  return w;
}

Eigen::MatrixXd GmmOracleDenoiser::predict(const Eigen::MatrixXd& x_t, double t, const Eigen::VectorXd* cond) const {
  if (cond == nullptr) return gmm_oracle_eps(components_, weights(), x_t, t, schedule_);
  if (cond->size() != static_cast<Eigen::Index>(components_.size()) || (cond->array() < 0.0).any() ||
      !(cond->sum() > 0.0))
    throw std::invalid_argument("gmm: condition must be a non-negative weight per component");
  return gmm_oracle_eps(components_, *cond / cond->sum(), x_t, t, schedule_);
}

Eigen::VectorXd GmmOracleDenoiser::mixture_mean() const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(components_.front().mean.size());
  for (const auto& c : components_) m += c.weight * flatten(c.mean);
  return m;
}

Eigen::MatrixXd GmmOracleDenoiser::mixture_covariance() const {
  const Eigen::VectorXd m = mixture_mean();
  const Eigen::Index d = m.size();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (const auto& c : components_) {
    const Eigen::VectorXd mu = flatten(c.mean);
    cov += c.weight * (c.variance * Eigen::MatrixXd::Identity(d, d) + mu * mu.transpose());
  }
  return cov - m * m.transpose();
}

Eigen::MatrixXd gmm_posterior_mean(const std::vector<GmmComponent>& components, const Eigen::VectorXd& weights,
                                   const Eigen::MatrixXd& x_t, double t, const NoiseSchedule& s) {
  const MixCoefficients m = mix_coefficients(s, std::min(t, kMaxTime));
  const double a = m.signal;
  const double noise_var = m.noise * m.noise;
  const double dim = static_cast<double>(x_t.size());

  const auto k = static_cast<Eigen::Index>(components.size());
  Eigen::VectorXd log_post(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto& c = components[static_cast<std::size_t>(j)];
    const double var = a * a * c.variance + noise_var;
    const double sq = (x_t - a * c.mean).squaredNorm();
    log_post(j) = weights(j) > 0.0 ? std::log(weights(j)) - 0.5 * dim * std::log(2.0 * std::numbers::pi * var) -
                                         0.5 * sq / var
                                   : -std::numeric_limits<double>::infinity();
  }
  const double peak = log_post.maxCoeff();
  Eigen::VectorXd post = (log_post.array() - peak).exp();
  post /= post.sum();

  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(x_t.rows(), x_t.cols());
  for (Eigen::Index j = 0; j < k; ++j) {
    if (post(j) == 0.0) continue;
    const auto& c = components[static_cast<std::size_t>(j)];
    const double var = a * a * c.variance + noise_var;
    const double gain = var > 0.0 ? a * c.variance / var : 0.0;
    mean += post(j) * (c.mean + gain * (x_t - a * c.mean));
  }
  return mean;
}

Eigen::MatrixXd gmm_oracle_eps(const std::vector<GmmComponent>& components, const Eigen::VectorXd& weights,
                               const Eigen::MatrixXd& x_t, double t, const NoiseSchedule& s) {
  const MixCoefficients m = mix_coefficients(s, std::min(t, kMaxTime));
  if (m.noise == 0.0) return Eigen::MatrixXd::Zero(x_t.rows(), x_t.cols());
  return (x_t - m.signal * gmm_posterior_mean(components, weights, x_t, t, s)) / m.noise;
}

SphereOracleDenoiser::SphereOracleDenoiser(double radius, Vec3 color, NoiseSchedule schedule)
    : radius_(radius), color_(color * 2.0 - Vec3::Ones()), schedule_(schedule) {
  if (!(radius > 0.0)) throw std::invalid_argument("sphere oracle: radius must be positive");
  schedule_.validate();
}

Eigen::MatrixXd SphereOracleDenoiser::predict(const Eigen::MatrixXd& x_t, double t, const Eigen::VectorXd*) const {
  if (x_t.cols() != kChannels) throw std::invalid_argument("sphere oracle: expected 6 channels");
  const MixCoefficients m = mix_coefficients(schedule_, std::min(t, kMaxTime));
  if (m.noise == 0.0) return Eigen::MatrixXd::Zero(x_t.rows(), x_t.cols());
  const double noise_var = m.noise * m.noise;

  Eigen::MatrixXd eps(x_t.rows(), x_t.cols());
  for (Eigen::Index r = 0; r < x_t.rows(); ++r) {
    const Vec3 x = x_t.row(r).head<3>().transpose();
    const double len = x.norm();
    Vec3 x0 = Vec3::Zero();
    if (len > 0.0) {
      const double kappa = m.signal * radius_ * len / noise_var;
      x0 = radius_ * langevin(kappa) * x / len;
    }
    eps.row(r).head<3>() = ((x - m.signal * x0) / m.noise).transpose();
    eps.row(r).tail<3>() = ((x_t.row(r).tail<3>().transpose() - m.signal * color_) / m.noise).transpose();
  }
  return eps;
}

}  // namespace pforge::diffusion
