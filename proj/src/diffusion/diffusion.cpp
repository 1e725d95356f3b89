#include "pforge/diffusion/diffusion.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "pforge/common/rng.h"

namespace pforge::diffusion {

namespace {

void require_same_shape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string("diffusion: shape mismatch in ") + what);
}

}  // namespace

Eigen::MatrixXd to_schedule_space(const PointCloud& pc) {
  Eigen::MatrixXd data(static_cast<Eigen::Index>(pc.size()), kChannels);
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    data.row(r).head<3>() = pc.positions[i].transpose();
    data.row(r).tail<3>() = (pc.colors[i] * 2.0 - Vec3::Ones()).transpose();
  }
  return data;
}

PointCloud from_schedule_space(const Eigen::MatrixXd& data) {
  if (data.cols() != kChannels) throw std::invalid_argument("diffusion: expected 6 channels");
  PointCloud pc;
  pc.positions.reserve(static_cast<std::size_t>(data.rows()));
  pc.colors.reserve(static_cast<std::size_t>(data.rows()));
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    pc.positions.emplace_back(data(r, 0), data(r, 1), data(r, 2));
    Vec3 c(data(r, 3), data(r, 4), data(r, 5));
    pc.colors.push_back(((c + Vec3::Ones()) * 0.5).cwiseMax(0.0).cwiseMin(1.0));
  }
  return pc;
}

DiffusionState forward_diffuse(const Eigen::MatrixXd& p0, double t, const Eigen::MatrixXd& eps,
                               const NoiseSchedule& s) {
  require_same_shape(p0, eps, "forward_diffuse");
  const MixCoefficients m = mix_coefficients(s, t);
  return {m.signal * p0 + m.noise * eps, t};
}

double loss_simple(const Denoiser& denoiser, const Eigen::MatrixXd& p0, double t, const Eigen::MatrixXd& eps,
                   const Eigen::VectorXd* cond, const NoiseSchedule& s) {
  const DiffusionState x_t = forward_diffuse(p0, t, eps, s);
  const Eigen::MatrixXd eps_hat = denoiser.predict(x_t.data, t, cond);
  require_same_shape(eps, eps_hat, "loss_simple");
  return (eps - eps_hat).squaredNorm() / static_cast<double>(eps.size());
}

Eigen::MatrixXd cfg_combine(const Eigen::MatrixXd& eps_cond, const Eigen::MatrixXd& eps_uncond, double scale) {
  require_same_shape(eps_cond, eps_uncond, "cfg_combine");
  return eps_uncond + scale * (eps_cond - eps_uncond);
}

DiffusionState ddim_step(const DiffusionState& x_t, const Eigen::MatrixXd& eps_hat, double t_prev, double eta,
                         const Eigen::MatrixXd* z, const NoiseSchedule& s) {
  require_same_shape(x_t.data, eps_hat, "ddim_step");
  if (!(t_prev < x_t.t)) throw std::invalid_argument("diffusion: ddim_step requires t_prev < t");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("diffusion: eta outside [0, 1]");
  if (eta > 0.0 && z == nullptr) throw std::invalid_argument("diffusion: eta > 0 requires noise z");
  if (z) require_same_shape(x_t.data, *z, "ddim_step noise");

  const MixCoefficients now = mix_coefficients(s, std::min(x_t.t, kMaxTime));
  const MixCoefficients prev = mix_coefficients(s, std::max(t_prev, 0.0));
  const double ab_t = now.alpha_bar;
  const double ab_prev = prev.alpha_bar;

  // Work in the un-renormalized space where x = sqrt(ab) * (b x0) + sqrt(1 - ab) * eps.
  const Eigen::MatrixXd x = x_t.data * now.norm;
  const Eigen::MatrixXd x0_hat = (x - std::sqrt(1.0 - ab_t) * eps_hat) / std::sqrt(ab_t);

  double sigma = 0.0;
  if (eta > 0.0) sigma = eta * std::sqrt((1.0 - ab_prev) / (1.0 - ab_t)) * std::sqrt(1.0 - ab_t / ab_prev);
  const double dir = std::sqrt(std::max(0.0, 1.0 - ab_prev - sigma * sigma));

  Eigen::MatrixXd x_prev = std::sqrt(ab_prev) * x0_hat + dir * eps_hat;
  if (sigma > 0.0) x_prev += sigma * (*z);
  return {x_prev / prev.norm, t_prev};
}

void SamplerConfig::validate() const {
  if (steps < 1) throw std::invalid_argument("sampler: steps must be >= 1");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("sampler: eta outside [0, 1]");
  if (!std::isfinite(cfg_scale)) throw std::invalid_argument("sampler: cfg_scale must be finite");
  if (num_points == 0) throw std::invalid_argument("sampler: num_points must be positive");
  schedule.validate();
}

Eigen::MatrixXd sample_raw(const Denoiser& denoiser, const Eigen::VectorXd* cond, const SamplerConfig& cfg) {
  cfg.validate();
  std::mt19937_64 gen(cfg.seed);
  const auto n = static_cast<Eigen::Index>(cfg.num_points);
  DiffusionState state{gaussian_matrix(gen, n, kChannels), kMaxTime};

  for (int i = cfg.steps; i >= 1; --i) {
    const double t = std::min(static_cast<double>(i) / cfg.steps, kMaxTime);
    const double t_prev = static_cast<double>(i - 1) / cfg.steps;
    state.t = t;

    Eigen::MatrixXd eps_hat;
    if (cond != nullptr) {
      const Eigen::MatrixXd eps_c = denoiser.predict(state.data, t, cond);
      const Eigen::MatrixXd eps_u = denoiser.predict(state.data, t, nullptr);
      eps_hat = cfg_combine(eps_c, eps_u, cfg.cfg_scale);
    } else {
      eps_hat = denoiser.predict(state.data, t, nullptr);
    }

    Eigen::MatrixXd z;
    if (cfg.eta > 0.0) z = gaussian_matrix(gen, n, kChannels);
    state = ddim_step(state, eps_hat, t_prev, cfg.eta, cfg.eta > 0.0 ? &z : nullptr, cfg.schedule);
    if (!state.data.allFinite())
      throw std::runtime_error("diffusion: non-finite state after step " + std::to_string(cfg.steps - i + 1));
  }
  return state.data;
}

PointCloud sample(const Denoiser& denoiser, const Eigen::VectorXd* cond, const SamplerConfig& cfg) {
  return from_schedule_space(sample_raw(denoiser, cond, cfg));
}

}  // namespace pforge::diffusion
