#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Core>

#include "pforge/diffusion/schedule.h"
#include "pforge/pointcloud/point_cloud.h"

namespace pforge::diffusion {

/// Number of channels per point: XYZ followed by RGB.
inline constexpr Eigen::Index kChannels = 6;
inline constexpr std::size_t kDefaultPointCount = 512;

/// Noisy state in schedule space (n x 6, positions as-is, colors in [-1, 1]).
struct DiffusionState {
  Eigen::MatrixXd data;
  double t = 0.0;
};

/// Noise predictor. `cond == nullptr` selects the unconditional branch used
/// by classifier-free guidance. Implementations must be deterministic and
/// safe to call concurrently.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual Eigen::MatrixXd predict(const Eigen::MatrixXd& x_t, double t, const Eigen::VectorXd* cond) const = 0;
};

/// Maps a cloud into schedule space: colors [0,1] -> [-1,1].
Eigen::MatrixXd to_schedule_space(const PointCloud& pc);
/// Inverse of to_schedule_space; colors are clamped to [0,1].
PointCloud from_schedule_space(const Eigen::MatrixXd& data);

/// Forward noising with input scaling and variance renormalization.
DiffusionState forward_diffuse(const Eigen::MatrixXd& p0, double t, const Eigen::MatrixXd& eps,
                               const NoiseSchedule& s);

/// Mean squared noise-prediction error over all n x 6 elements.
double loss_simple(const Denoiser& denoiser, const Eigen::MatrixXd& p0, double t, const Eigen::MatrixXd& eps,
                   const Eigen::VectorXd* cond, const NoiseSchedule& s);

/// eps_uncond + scale * (eps_cond - eps_uncond); scale 1 is the conditional prediction.
Eigen::MatrixXd cfg_combine(const Eigen::MatrixXd& eps_cond, const Eigen::MatrixXd& eps_uncond, double scale);

/// One DDIM update from x_t.t to t_prev. `z` is required iff eta > 0.
DiffusionState ddim_step(const DiffusionState& x_t, const Eigen::MatrixXd& eps_hat, double t_prev, double eta,
                         const Eigen::MatrixXd* z, const NoiseSchedule& s);

struct SamplerConfig {
  int steps = 50;
  double eta = 0.0;
  double cfg_scale = 3.0;
  std::uint64_t seed = 0;
  std::size_t num_points = kDefaultPointCount;
  NoiseSchedule schedule;

  void validate() const;
};

/// Full reverse process from seeded Gaussian noise at t=1 down to t=0 over a
/// uniform grid. When `cond` is given both branches are evaluated and
/// combined with cfg_combine; otherwise the unconditional branch alone is
/// used. Throws std::runtime_error on a non-finite intermediate state.
PointCloud sample(const Denoiser& denoiser, const Eigen::VectorXd* cond, const SamplerConfig& cfg);

/// Same loop, returning the raw schedule-space output (before clamping).
Eigen::MatrixXd sample_raw(const Denoiser& denoiser, const Eigen::VectorXd* cond, const SamplerConfig& cfg);

}  // namespace pforge::diffusion
