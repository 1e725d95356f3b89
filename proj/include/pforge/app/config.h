#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "pforge/app/pipeline.h"
#include "pforge/diffusion/diffusion.h"
#include "pforge/metrics/align.h"
#include "pforge/render/camera.h"
#include "pforge/render/loss.h"
#include "pforge/render/shade.h"

namespace pforge::app {

struct RenderConfig {
  int width = 256;
  int height = 256;
  double fov_deg = 40.0;
  double azimuth_deg = 30.0;
  double elevation_deg = 20.0;
  double distance = 3.2;
  int spp_ggx = 6;
  int spp_env = 6;
  int spp_hemi = 4;
  bool shadows = true;
  double shadow_distance = 0.25;
  int shadow_steps = 6;
  double shadow_bias = 1e-3;
  double clamp_max = 1e4;
  double metallic = 0.0;
  double roughness = 0.5;
  double loss_image = 1.0;
  double loss_mask = 0.5;

  void validate() const;
  render::Camera camera() const;
  render::ShadeSettings shade_settings(std::uint64_t seed) const;
  render::LossWeights loss_weights() const;
};

struct MetricsConfig {
  std::vector<double> thresholds{0.1, 0.2, 0.5};
  std::size_t surface_samples = 10000;
  int azimuth_steps = 24;
  int elevation_steps = 8;
  int roll_steps = 4;
  std::size_t subsample = 512;
  int icp_iterations = 50;
  double icp_tolerance = 1e-7;
  int image_size = 128;  // renders compared by PSNR / SSIM

  void validate() const;
  metrics::AlignSettings align_settings(std::uint64_t seed) const;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  int resolution = 64;

  void validate() const;
};

/// Everything a pipeline run needs. One global seed fans out to per-stage
/// seeds (see stage_seed); stage blocks carry no seeds of their own.
struct PipelineConfig {
  std::uint64_t seed = 0;
  diffusion::SamplerConfig sampler;
  ReconstructParams reconstruct;
  RenderConfig render;
  MetricsConfig metrics;
  ServiceConfig service;

  void validate() const;
};

/// Overlays `j` on `base`. Unknown keys, wrong types and out-of-range
/// values throw std::invalid_argument naming the offending key path.
PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {});
nlohmann::json to_json(const PipelineConfig& c);
PipelineConfig load_config(const std::filesystem::path& path);

/// Independent per-stage seed (splitmix of the global seed and stage name).
std::uint64_t stage_seed(std::uint64_t global, const char* stage);

}  // namespace pforge::app
