#include "pforge/app/config.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pforge/common/fileio.h"
#include "pforge/common/rng.h"
#include "pforge/diffusion/sampler_config.h"

namespace pforge::app {

using nlohmann::json;

namespace {

// Reads the keys of one JSON object into typed fields; anything not claimed
// is an error.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw std::invalid_argument("config: '" + path_ + "' must be an object");
  }

  template <typename T>
  Reader& field(const char* key, T& out) {
    claimed_.push_back(key);
    if (auto it = j_.find(key); it != j_.end()) {
      try {
        out = it->template get<T>();
      } catch (const json::exception&) {
        throw std::invalid_argument("config: wrong type for '" + where(key) + "'");
      }
    }
    return *this;
  }

  const json* sub(const char* key) {
    claimed_.push_back(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string where(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      bool ok = false;
      for (const char* c : claimed_) ok = ok || key == c;
      if (!ok) throw std::invalid_argument("config: unknown key '" + where(key.c_str()) + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<const char*> claimed_;
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument("config: " + msg);
}

}  // namespace

void RenderConfig::validate() const {
  require(width > 0 && height > 0 && width <= 4096 && height <= 4096, "render.width/height must be in [1, 4096]");
  require(fov_deg > 0.0 && fov_deg < 180.0, "render.fov_deg must be in (0, 180)");
  require(distance > 0.0, "render.distance must be positive");
  require(spp_ggx >= 0 && spp_env >= 0 && spp_hemi >= 0 && spp_ggx + spp_env + spp_hemi > 0,
          "render.spp_* must be >= 0 with a positive total");
  require(shadow_distance > 0.0 && shadow_steps >= 1 && shadow_bias >= 0.0, "render.shadow_* out of range");
  require(clamp_max > 0.0, "render.clamp_max must be positive");
  require(metallic >= 0.0 && metallic <= 1.0, "render.metallic must be in [0, 1]");
  require(roughness >= render::kMinRoughness && roughness <= 1.0, "render.roughness must be in [0.03, 1]");
  require(loss_image >= 0.0 && loss_mask >= 0.0, "render.loss_* must be >= 0");
}

render::Camera RenderConfig::camera() const {
  return render::Camera::orbit(azimuth_deg, elevation_deg, distance, Vec3::Zero(), fov_deg * std::numbers::pi / 180.0,
                               width, height);
}

render::ShadeSettings RenderConfig::shade_settings(std::uint64_t seed) const {
  render::ShadeSettings s;
  s.counts = {spp_ggx, spp_env, spp_hemi};
  s.shadow = {shadows, shadow_distance, shadow_steps, shadow_bias};
  s.clamp_max = clamp_max;
  s.seed = seed;
  return s;
}

render::LossWeights RenderConfig::loss_weights() const {
  render::LossWeights w;
  w.image = loss_image;
  w.mask = loss_mask;
  return w;
}

void MetricsConfig::validate() const {
  require(!thresholds.empty(), "metrics.thresholds must be non-empty");
  for (double t : thresholds) require(t > 0.0, "metrics.thresholds must be positive");
  require(surface_samples >= 1, "metrics.surface_samples must be >= 1");
  require(azimuth_steps >= 1 && elevation_steps >= 1 && roll_steps >= 1, "metrics rotation steps must be >= 1");
  require(subsample >= 1 && icp_iterations >= 0 && icp_tolerance >= 0.0, "metrics alignment settings out of range");
  require(image_size >= 11 && image_size <= 4096, "metrics.image_size must be in [11, 4096]");
}

metrics::AlignSettings MetricsConfig::align_settings(std::uint64_t seed) const {
  metrics::AlignSettings s;
  s.azimuth_steps = azimuth_steps;
  s.elevation_steps = elevation_steps;
  s.roll_steps = roll_steps;
  s.subsample = subsample;
  s.icp_iterations = icp_iterations;
  s.icp_relative_tolerance = icp_tolerance;
  s.seed = seed;
  return s;
}

void ServiceConfig::validate() const {
  require(port >= 0 && port <= 65535, "service.port must be in [0, 65535]");
  require(resolution >= 8 && resolution <= 512, "service.resolution must be in [8, 512]");
  require(!host.empty(), "service.host must be non-empty");
}

void PipelineConfig::validate() const {
  sampler.validate();
  reconstruct.validate();
  render.validate();
  metrics.validate();
  service.validate();
}

PipelineConfig config_from_json(const json& j, PipelineConfig c) {
  Reader top(j, "");
  top.field("seed", c.seed);
  if (const json* s = top.sub("sampler")) {
    if (s->is_object() && s->contains("seed"))
      throw std::invalid_argument("config: 'sampler.seed' is not accepted; stage seeds derive from the top-level seed");
    try {
      c.sampler = diffusion::sampler_config_from_json(*s, c.sampler);
    } catch (const std::exception& e) {
      throw std::invalid_argument(std::string("config: ") + e.what());
    }
  }
  if (const json* r = top.sub("reconstruct")) {
    Reader rr(*r, "reconstruct");
    rr.field("resolution", c.reconstruct.resolution);
    rr.field("k", c.reconstruct.fit.k);
    rr.field("weight_epsilon", c.reconstruct.fit.weight_epsilon);
    rr.field("normal_k", c.reconstruct.fit.normal_k);
    rr.finish();
  }
  if (const json* r = top.sub("render")) {
    Reader rr(*r, "render");
    RenderConfig& x = c.render;
    rr.field("width", x.width).field("height", x.height).field("fov_deg", x.fov_deg);
    rr.field("azimuth_deg", x.azimuth_deg).field("elevation_deg", x.elevation_deg).field("distance", x.distance);
    rr.field("spp_ggx", x.spp_ggx).field("spp_env", x.spp_env).field("spp_hemi", x.spp_hemi);
    rr.field("shadows", x.shadows).field("shadow_distance", x.shadow_distance);
    rr.field("shadow_steps", x.shadow_steps).field("shadow_bias", x.shadow_bias);
    rr.field("clamp_max", x.clamp_max).field("metallic", x.metallic).field("roughness", x.roughness);
    rr.field("loss_image", x.loss_image).field("loss_mask", x.loss_mask);
    rr.finish();
  }
  if (const json* m = top.sub("metrics")) {
    Reader mr(*m, "metrics");
    MetricsConfig& x = c.metrics;
    mr.field("thresholds", x.thresholds).field("surface_samples", x.surface_samples);
    mr.field("azimuth_steps", x.azimuth_steps).field("elevation_steps", x.elevation_steps);
    mr.field("roll_steps", x.roll_steps).field("subsample", x.subsample);
    mr.field("icp_iterations", x.icp_iterations).field("icp_tolerance", x.icp_tolerance);
    mr.field("image_size", x.image_size);
    mr.finish();
  }
  if (const json* s = top.sub("service")) {
    Reader sr(*s, "service");
    sr.field("host", c.service.host).field("port", c.service.port).field("resolution", c.service.resolution);
    sr.finish();
  }
  top.finish();
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    throw std::invalid_argument(msg.rfind("config:", 0) == 0 ? msg : "config: " + msg);
  }
  return c;
}

json to_json(const PipelineConfig& c) {
  json sampler = diffusion::to_json(c.sampler);
  sampler.erase("seed");
  const RenderConfig& r = c.render;
  const MetricsConfig& m = c.metrics;
  return {
      {"seed", c.seed},
      {"sampler", sampler},
      {"reconstruct",
       {{"resolution", c.reconstruct.resolution},
        {"k", c.reconstruct.fit.k},
        {"weight_epsilon", c.reconstruct.fit.weight_epsilon},
        {"normal_k", c.reconstruct.fit.normal_k}}},
      {"render",
       {{"width", r.width},
        {"height", r.height},
        {"fov_deg", r.fov_deg},
        {"azimuth_deg", r.azimuth_deg},
        {"elevation_deg", r.elevation_deg},
        {"distance", r.distance},
        {"spp_ggx", r.spp_ggx},
        {"spp_env", r.spp_env},
        {"spp_hemi", r.spp_hemi},
        {"shadows", r.shadows},
        {"shadow_distance", r.shadow_distance},
        {"shadow_steps", r.shadow_steps},
        {"shadow_bias", r.shadow_bias},
        {"clamp_max", r.clamp_max},
        {"metallic", r.metallic},
        {"roughness", r.roughness},
        {"loss_image", r.loss_image},
        {"loss_mask", r.loss_mask}}},
      {"metrics",
       {{"thresholds", m.thresholds},
        {"surface_samples", m.surface_samples},
        {"azimuth_steps", m.azimuth_steps},
        {"elevation_steps", m.elevation_steps},
        {"roll_steps", m.roll_steps},
        {"subsample", m.subsample},
        {"icp_iterations", m.icp_iterations},
        {"icp_tolerance", m.icp_tolerance},
        {"image_size", m.image_size}}},
      {"service", {{"host", c.service.host}, {"port", c.service.port}, {"resolution", c.service.resolution}}},
  };
}

PipelineConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::uint64_t stage_seed(std::uint64_t global, const char* stage) { return derive_seed(global, stage); }

}  // namespace pforge::app
