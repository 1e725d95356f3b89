#include "pforge/diffusion/sampler_config.h"

#include <stdexcept>

namespace pforge::diffusion {

using nlohmann::json;

NoiseSchedule schedule_from_json(const json& j, NoiseSchedule s) {
  if (!j.is_object()) throw std::invalid_argument("schedule: expected an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") {
      s.kind = schedule_kind_from_string(value.get<std::string>().c_str());
    } else if (key == "start") {
      s.start = value.get<double>();
    } else if (key == "end") {
      s.end = value.get<double>();
    } else if (key == "tau") {
      s.tau = value.get<double>();
    } else if (key == "input_scale") {
      s.input_scale = value.get<double>();
    } else if (key == "renormalize") {
      s.renormalize = value.get<bool>();
    } else {
      throw std::invalid_argument("schedule: unknown key '" + key + "'");
    }
  }
  s.validate();
  return s;
}

json to_json(const NoiseSchedule& s) {
  return {{"kind", to_string(s.kind)}, {"start", s.start},           {"end", s.end},
          {"tau", s.tau},              {"input_scale", s.input_scale}, {"renormalize", s.renormalize}};
}

SamplerConfig sampler_config_from_json(const json& j, SamplerConfig cfg) {
  if (!j.is_object()) throw std::invalid_argument("sampler: expected an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "steps") {
      cfg.steps = value.get<int>();
    } else if (key == "eta") {
      cfg.eta = value.get<double>();
    } else if (key == "cfg_scale") {
      cfg.cfg_scale = value.get<double>();
    } else if (key == "seed") {
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "num_points") {
      cfg.num_points = value.get<std::size_t>();
    } else if (key == "schedule") {
      cfg.schedule = schedule_from_json(value, cfg.schedule);
    } else {
      throw std::invalid_argument("sampler: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

json to_json(const SamplerConfig& cfg) {
  return {{"steps", cfg.steps},
          {"eta", cfg.eta},
          {"cfg_scale", cfg.cfg_scale},
          {"seed", cfg.seed},
          {"num_points", cfg.num_points},
          {"schedule", to_json(cfg.schedule)}};
}

}  // namespace pforge::diffusion
