#include "pforge/diffusion/schedule.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pforge::diffusion {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

NoiseSchedule NoiseSchedule::sigmoid(double start, double end, double tau) {
  NoiseSchedule s;
  s.kind = ScheduleKind::Sigmoid;
  s.start = start;
  s.end = end;
  s.tau = tau;
  return s;
}

NoiseSchedule NoiseSchedule::cosine(double start, double end, double tau) {
  NoiseSchedule s = sigmoid(start, end, tau);
  s.kind = ScheduleKind::Cosine;
  return s;
}

NoiseSchedule NoiseSchedule::linear() {
  NoiseSchedule s;
  s.kind = ScheduleKind::Linear;
  return s;
}

void NoiseSchedule::validate() const {
  if (!(input_scale > 0.0) || !std::isfinite(input_scale))
    throw std::invalid_argument("schedule: input_scale must be positive");
  if (kind == ScheduleKind::Linear) return;
  if (!(tau > 0.0)) throw std::invalid_argument("schedule: tau must be positive");
  if (!(end > start)) throw std::invalid_argument("schedule: end must exceed start");
  if (kind == ScheduleKind::Cosine && (start < 0.0 || end > 1.0))
    throw std::invalid_argument("schedule: cosine start/end must lie in [0, 1]");
}

double schedule_alpha_bar(const NoiseSchedule& s, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::out_of_range("schedule: t outside [0, 1]");
  if (t == 0.0) return 1.0;
  if (t == 1.0) return 0.0;
  double v = 0.0;
  switch (s.kind) {
    case ScheduleKind::Linear:
      v = 1.0 - t;
      break;
    case ScheduleKind::Sigmoid: {
      const double v_start = logistic(s.start / s.tau);
      const double v_end = logistic(s.end / s.tau);
      const double out = logistic((t * (s.end - s.start) + s.start) / s.tau);
      v = (v_end - out) / (v_end - v_start);
      break;
    }
    case ScheduleKind::Cosine: {
      const auto f = [&](double x) { return std::pow(std::cos(x * std::numbers::pi / 2.0), 2.0 * s.tau); };
      const double v_start = f(s.start);
      const double v_end = f(s.end);
      const double out = f(t * (s.end - s.start) + s.start);
      v = (v_end - out) / (v_end - v_start);
      break;
    }
  }
  return std::clamp(v, 0.0, 1.0);
}

MixCoefficients mix_coefficients(const NoiseSchedule& s, double t) {
  MixCoefficients m;
  m.alpha_bar = schedule_alpha_bar(s, t);
  const double b = s.input_scale;
  m.norm = s.renormalize ? std::sqrt(b * b * m.alpha_bar + (1.0 - m.alpha_bar)) : 1.0;
  m.signal = std::sqrt(m.alpha_bar) * b / m.norm;
  m.noise = std::sqrt(1.0 - m.alpha_bar) / m.norm;
  return m;
}

const char* to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::Sigmoid: return "sigmoid";
    case ScheduleKind::Linear: return "linear";
    case ScheduleKind::Cosine: return "cosine";
  }
  return "sigmoid";
}

ScheduleKind schedule_kind_from_string(const char* name) {
  const std::string n = name;
  if (n == "sigmoid") return ScheduleKind::Sigmoid;
  if (n == "linear") return ScheduleKind::Linear;
  if (n == "cosine") return ScheduleKind::Cosine;
  throw std::invalid_argument("schedule: unknown kind '" + n + "'");
}

}  // namespace pforge::diffusion
