#pragma once

namespace pforge::diffusion {

enum class ScheduleKind { Sigmoid, Linear, Cosine };

/// Continuous-time noise schedule over t in [0, 1].
///
/// `start`, `end` and `tau` shape the sigmoid and cosine families (the
/// linear family ignores them). `input_scale` multiplies the clean signal
/// before noise is added; with `renormalize` the noisy state is divided by
/// its standard deviation so the network input keeps unit variance.
struct NoiseSchedule {
  ScheduleKind kind = ScheduleKind::Sigmoid;
  double start = -3.0;
  double end = 3.0;
  double tau = 1.0;
  double input_scale = 1.0;
  bool renormalize = true;

  static NoiseSchedule sigmoid(double start = -3.0, double end = 3.0, double tau = 1.0);
  static NoiseSchedule cosine(double start = 0.0, double end = 1.0, double tau = 1.0);
  static NoiseSchedule linear();

  /// Throws std::invalid_argument on an ill-formed parameter set.
  void validate() const;
};

/// Upper bound applied to t before dividing by sqrt(alpha_bar).
inline constexpr double kMaxTime = 1.0 - 1e-5;

/// Endpoint-normalized cumulative signal coefficient: exactly 1 at t=0 and
/// exactly 0 at t=1, strictly decreasing in between.
double schedule_alpha_bar(const NoiseSchedule& s, double t);

/// Coefficients of the normalized noisy state x_t = signal * x0 + noise * eps.
struct MixCoefficients {
  double alpha_bar = 1.0;
  double signal = 1.0;  // sqrt(alpha_bar) * b / k
  double noise = 0.0;   // sqrt(1 - alpha_bar) / k
  double norm = 1.0;    // k = sqrt(b^2 alpha_bar + 1 - alpha_bar), or 1 without renormalization
};

MixCoefficients mix_coefficients(const NoiseSchedule& s, double t);

const char* to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const char* name);

}  // namespace pforge::diffusion
