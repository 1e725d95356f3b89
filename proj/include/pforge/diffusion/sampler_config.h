#pragma once

#include "json.hpp"

#include "pforge/diffusion/diffusion.h"

namespace pforge::diffusion {

/// {steps, eta, cfg_scale, seed, num_points, schedule:{kind,start,end,tau,input_scale,renormalize}}.
/// Missing keys keep their defaults; unknown keys throw std::invalid_argument.
SamplerConfig sampler_config_from_json(const nlohmann::json& j, SamplerConfig base = {});
nlohmann::json to_json(const SamplerConfig& cfg);

NoiseSchedule schedule_from_json(const nlohmann::json& j, NoiseSchedule base = {});
nlohmann::json to_json(const NoiseSchedule& s);

}  // namespace pforge::diffusion
