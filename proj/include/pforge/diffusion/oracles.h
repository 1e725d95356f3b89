#pragma once

#include <vector>

#include <Eigen/Core>

#include "pforge/diffusion/diffusion.h"

namespace pforge::diffusion {

/// Isotropic Gaussian over the full n x 6 state.
struct GmmComponent {
  double weight = 1.0;
  Eigen::MatrixXd mean;
  double variance = 0.0;
};

/// Closed-form loss-optimal noise predictor for a Gaussian-mixture data
/// distribution. A condition vector, when given, replaces the mixture
/// weights (it must have one non-negative entry per component).
class GmmOracleDenoiser final : public Denoiser {
 public:
  GmmOracleDenoiser(std::vector<GmmComponent> components, NoiseSchedule schedule);

  Eigen::MatrixXd predict(const Eigen::MatrixXd& x_t, double t, const Eigen::VectorXd* cond) const override;

  const std::vector<GmmComponent>& components() const { return components_; }
  const NoiseSchedule& schedule() const { return schedule_; }
  Eigen::VectorXd weights() const;

  /// Closed-form moments of the flattened (row-major) mixture.
  Eigen::VectorXd mixture_mean() const;
  Eigen::MatrixXd mixture_covariance() const;

 private:
  std::vector<GmmComponent> components_;
  NoiseSchedule schedule_;
};

/// eps_hat = (x_t - signal * E[x0 | x_t]) / noise with log-sum-exp posterior weights.
Eigen::MatrixXd gmm_oracle_eps(const std::vector<GmmComponent>& components, const Eigen::VectorXd& weights,
                               const Eigen::MatrixXd& x_t, double t, const NoiseSchedule& s);

/// E[x0 | x_t] under the mixture.
Eigen::MatrixXd gmm_posterior_mean(const std::vector<GmmComponent>& components, const Eigen::VectorXd& weights,
                                   const Eigen::MatrixXd& x_t, double t, const NoiseSchedule& s);

/// Oracle for i.i.d. points uniform on a sphere of `radius` about the origin
/// with a fixed color. The position posterior is von Mises-Fisher.
class SphereOracleDenoiser final : public Denoiser {
 public:
  SphereOracleDenoiser(double radius, Vec3 color, NoiseSchedule schedule);

  Eigen::MatrixXd predict(const Eigen::MatrixXd& x_t, double t, const Eigen::VectorXd* cond) const override;

 private:
  double radius_;
  Vec3 color_;  // schedule space
  NoiseSchedule schedule_;
};

}  // namespace pforge::diffusion
