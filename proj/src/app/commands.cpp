#include "pforge/app/commands.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "pforge/app/config.h"
#include "pforge/app/fixtures.h"
#include "pforge/app/pipeline.h"
#include "pforge/common/fileio.h"
#include "pforge/diffusion/oracles.h"
#include "pforge/isosurface/mesh_io.h"
#include "pforge/metrics/chamfer.h"
#include "pforge/metrics/image_metrics.h"
#include "pforge/metrics/surface_sampling.h"
#include "pforge/pointcloud/ply.h"
#include "pforge/render/envmap.h"
#include "pforge/render/image_io.h"
#include "pforge/render/raster.h"
#include "pforge/service/server.h"

namespace pforge::app {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Config file plus flag overrides shared by every subcommand.
struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string effective_config_path;

  PipelineConfig load() const {
    PipelineConfig c;
    if (!config_path.empty()) {
      try {
        c = load_config(config_path);
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
    }
    if (seed) c.seed = *seed;
    return c;
  }
};

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

render::Image load_env_or_default(const std::string& path) {
  return path.empty() ? fixture_env() : render::load_pfm(path);
}

std::string threshold_key(double t) {
  std::ostringstream s;
  s << "fs_" << t;
  return s.str();
}

// Maps a mesh into the normalized ground-truth frame found by alignment.
TriMesh transform_mesh(const TriMesh& m, const metrics::AlignmentResult& a) {
  TriMesh out = m;
  for (Vec3& p : out.positions) p = a.apply(p);
  for (Vec3& n : out.normals) n = (a.rotation * n).normalized();
  return out;
}

TriMesh normalize_mesh(const TriMesh& m, const Similarity& s) {
  TriMesh out = m;
  for (Vec3& p : out.positions) p = s.apply(p);
  return out;
}

render::Image render_for_metrics(const TriMesh& mesh, const render::EnvMap& env, const PipelineConfig& c,
                                 std::uint64_t seed) {
  RenderConfig rc = c.render;
  rc.width = rc.height = c.metrics.image_size;
  const render::Camera cam = rc.camera();
  const render::GBuffer g = render::rasterize(mesh, cam);
  const render::ShadeResult r =
      render::shade(g, env, MaterialParams{rc.metallic, rc.roughness}, cam, rc.shade_settings(seed));
  return render::tonemap(r.hdr);
}

int cmd_fixture(const PipelineConfig& c, const std::string& shape_name, std::size_t n, const std::string& out_dir,
                std::ostream& out) {
  Shape shape;
  try {
    shape = shape_from_string(shape_name);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const std::string name = to_string(shape);
  const PointCloud pc = fixture_cloud(shape, n, stage_seed(c.seed, "fixture"));
  save_ply(dir / (name + ".ply"), pc);
  save_obj(dir / (name + "_mesh.obj"), fixture_mesh(shape));
  render::save_pfm((dir / "env.pfm").string(), fixture_env());
  out << "fixture: wrote " << (dir / (name + ".ply")).string() << ", " << (dir / (name + "_mesh.obj")).string()
      << ", " << (dir / "env.pfm").string() << "\n";
  return kExitOk;
}

struct SampleArgs {
  std::string oracle = "gmm";
  std::vector<std::string> templates;
  std::optional<int> cond;
  double variance = 1e-3;
  std::string out;
};

int cmd_sample(PipelineConfig c, const SampleArgs& a, std::ostream& out) {
  c.sampler.seed = stage_seed(c.seed, "sample");
  std::unique_ptr<diffusion::Denoiser> denoiser;
  std::optional<Eigen::VectorXd> cond;
  if (a.oracle == "gmm") {
    std::vector<PointCloud> clouds;
    for (const std::string& t : a.templates) clouds.push_back(load_ply(t));
    if (clouds.empty()) {
      clouds.push_back(fixture_cloud(Shape::Sphere, c.sampler.num_points, stage_seed(c.seed, "sample.template0")));
      clouds.push_back(fixture_cloud(Shape::Torus, c.sampler.num_points, stage_seed(c.seed, "sample.template1")));
    }
    std::vector<diffusion::GmmComponent> comps;
    for (const PointCloud& pc : clouds) {
      if (pc.size() != clouds.front().size()) throw ConfigError("sample: templates must have equal point counts");
      comps.push_back({1.0 / clouds.size(), diffusion::to_schedule_space(pc), a.variance});
    }
    c.sampler.num_points = clouds.front().size();
    denoiser = std::make_unique<diffusion::GmmOracleDenoiser>(std::move(comps), c.sampler.schedule);
    if (a.cond) {
      if (*a.cond < 0 || *a.cond >= static_cast<int>(clouds.size()))
        throw ConfigError("sample: --cond must index a template");
      cond = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(clouds.size()));
      (*cond)[*a.cond] = 1.0;
    }
  } else if (a.oracle == "sphere") {
    if (a.cond) throw ConfigError("sample: the sphere oracle takes no condition");
    denoiser = std::make_unique<diffusion::SphereOracleDenoiser>(1.0, Vec3(0.8, 0.8, 0.8), c.sampler.schedule);
  } else {
    throw ConfigError("sample: unknown oracle '" + a.oracle + "' (gmm, sphere)");
  }
  const PointCloud pc = diffusion::sample(*denoiser, cond ? &*cond : nullptr, c.sampler);
  ensure_parent(a.out);
  save_ply(a.out, pc);
  out << "sample: " << pc.size() << " points -> " << a.out << "\n";
  return kExitOk;
}

int cmd_edit(const std::string& in, const std::string& ops_path, const std::string& out_path, std::ostream& out) {
  json j;
  try {
    j = json::parse(read_file(ops_path));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("edit: ") + e.what());
  }
  if (j.is_object() && j.contains("ops")) j = j.at("ops");
  std::vector<EditOp> ops;
  try {
    ops = edit_ops_from_json(j);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("edit: ") + e.what());
  }
  const EditResult r = apply_edits(load_ply(in), ops);
  ensure_parent(out_path);
  save_ply(out_path, r.cloud);
  out << "edit: " << ops.size() << " ops, " << r.changed << " points changed, " << r.cloud.size() << " points -> "
      << out_path << "\n";
  return kExitOk;
}

int cmd_reconstruct(const PipelineConfig& c, const std::string& in, const std::string& out_path, std::ostream& out,
                    std::ostream& err) {
  const ReconstructResult r = reconstruct(load_ply(in), c.reconstruct);
  ensure_parent(out_path);
  save_obj(out_path, r.mesh);
  err << "reconstruct: fit " << r.fit_ms << " ms, grid " << r.grid_ms << " ms, extract " << r.extract_ms
      << " ms (res " << c.reconstruct.resolution << ")\n";
  out << "reconstruct: " << r.mesh.vertex_count() << " vertices, " << r.mesh.face_count() << " faces, "
      << r.weld.boundary_edges << " boundary edges -> " << out_path << "\n";
  return kExitOk;
}

int cmd_render(const PipelineConfig& c, const std::string& mesh_path, const std::string& env_path,
               const std::string& prefix, std::ostream& out, std::ostream& err) {
  const TriMesh mesh = load_obj(mesh_path);
  const render::EnvMap env(load_env_or_default(env_path));
  const render::Camera cam = c.render.camera();
  const render::GBuffer g = render::rasterize(mesh, cam);
  const render::ShadeResult r = render::shade(g, env, MaterialParams{c.render.metallic, c.render.roughness}, cam,
                                              c.render.shade_settings(stage_seed(c.seed, "render")));
  ensure_parent(prefix);
  render::save_png(prefix + ".png", render::tonemap(r.hdr));
  render::save_pfm(prefix + ".pfm", r.hdr);
  const json log{{"width", cam.width},   {"height", cam.height},   {"covered_pixels", g.covered()},
                 {"clamped", r.clamped}, {"nonfinite", r.nonfinite}, {"clamp_max", c.render.clamp_max}};
  write_file_atomic(prefix + ".json", log.dump(2) + "\n");
  err << "render: clamped " << r.clamped << " pixels, non-finite " << r.nonfinite << "\n";
  out << "render: " << g.covered() << " covered pixels -> " << prefix << ".png, " << prefix << ".pfm\n";
  return kExitOk;
}

int cmd_eval(const PipelineConfig& c, const std::string& pred_path, const std::string& gt_path,
             const std::string& env_path, const std::string& out_path, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const TriMesh pred = load_obj(pred_path);
  const TriMesh gt = load_obj(gt_path);
  const auto pp = metrics::sample_surface(pred, c.metrics.surface_samples, stage_seed(c.seed, "eval.pred"));
  const auto gp = metrics::sample_surface(gt, c.metrics.surface_samples, stage_seed(c.seed, "eval.gt"));
  const metrics::AlignmentResult a = metrics::align(pp, gp, c.metrics.align_settings(stage_seed(c.seed, "eval.align")));
  std::vector<Vec3> pa(pp.size()), ga(gp.size());
  for (std::size_t i = 0; i < pp.size(); ++i) pa[i] = a.apply(pp[i]);
  for (std::size_t i = 0; i < gp.size(); ++i) ga[i] = a.gt_normalization.apply(gp[i]);

  json report;
  report["cd"] = metrics::chamfer(pa, ga);
  for (double t : c.metrics.thresholds) report[threshold_key(t)] = metrics::fscore(pa, ga, t).f;

  const render::EnvMap env(load_env_or_default(env_path));
  const std::uint64_t rseed = stage_seed(c.seed, "eval.render");
  const render::Image ip = render_for_metrics(transform_mesh(pred, a), env, c, rseed);
  const render::Image ig = render_for_metrics(normalize_mesh(gt, a.gt_normalization), env, c, rseed);
  const double psnr = metrics::psnr(ip, ig);
  report["psnr"] = std::isinf(psnr) ? json("inf") : json(psnr);
  report["ssim"] = metrics::ssim(ip, ig);

  json rot = json::array();
  for (int i = 0; i < 3; ++i) rot.push_back({a.rotation(i, 0), a.rotation(i, 1), a.rotation(i, 2)});
  report["alignment"] = {{"rotation", rot},
                         {"translation", {a.translation.x(), a.translation.y(), a.translation.z()}},
                         {"scale", a.scale},
                         {"grid_index", a.grid_index},
                         {"grid_chamfer", a.grid_chamfer},
                         {"residual", a.residual},
                         {"icp_iterations", a.icp_iterations},
                         {"icp_diverged", a.icp_diverged}};
  report["runtime_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  ensure_parent(out_path);
  write_file_atomic(out_path, report.dump(2) + "\n");
  out << "eval: cd " << report["cd"].get<double>() << " -> " << out_path << "\n";
  return kExitOk;
}

int cmd_serve(const PipelineConfig& c, std::ostream& out, std::ostream& err) {
  service::SessionOptions opts;
  opts.reconstruct = c.reconstruct;
  opts.reconstruct.resolution = c.service.resolution;
  opts.render = c.render;
  opts.seed = stage_seed(c.seed, "serve");
  service::Server server(opts);
  const int port = server.bind(c.service.host, c.service.port);
  if (port < 0) {
    err << "serve: cannot bind " << c.service.host << ":" << c.service.port << "\n";
    return kExitStage;
  }
  out << "serve: listening on http://" << c.service.host << ":" << port << std::endl;
  return server.listen() ? kExitOk : kExitStage;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pforge: point cloud diffusion, editing, meshing, rendering and evaluation"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "JSON pipeline config (unknown keys are rejected)")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", common.seed, "Global seed; per-stage seeds derive from it");
  app.add_option("--effective-config", common.effective_config_path,
                 "Write the effective config (file + flags + defaults) as JSON");

  auto* fixture = app.add_subcommand("fixture", "Generate a ground-truth cloud, mesh and environment map");
  std::string shape = "sphere", out_dir = ".";
  std::size_t n = 512;
  fixture->add_option("--shape", shape, "sphere | torus | box | mug")->capture_default_str();
  fixture->add_option("--n", n, "Number of surface samples")->capture_default_str()->check(CLI::PositiveNumber);
  fixture->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();

  auto* sample = app.add_subcommand("sample", "Run the DDIM sampler against a closed-form oracle denoiser");
  SampleArgs sa;
  std::optional<int> steps, n_points;
  std::optional<double> eta, cfg_scale;
  sample->add_option("--oracle", sa.oracle, "gmm | sphere")->capture_default_str();
  sample->add_option("--template", sa.templates, "PLY cloud used as a mixture component mean (repeatable)")
      ->check(CLI::ExistingFile);
  sample->add_option("--cond", sa.cond, "Condition on one mixture component (guided by --cfg-scale)");
  sample->add_option("--variance", sa.variance, "Per-element variance of each mixture component")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sample->add_option("--steps", steps, "DDIM steps (default 50)");
  sample->add_option("--eta", eta, "DDIM stochasticity (default 0)");
  sample->add_option("--cfg-scale", cfg_scale, "Guidance scale (default 3)");
  sample->add_option("--n", n_points, "Points per cloud without templates (default 512)");
  sample->add_option("--out", sa.out, "Output PLY")->required();

  auto* edit = app.add_subcommand("edit", "Apply EditOp JSON to a cloud");
  std::string edit_in, edit_ops, edit_out;
  edit->add_option("--in", edit_in, "Input PLY")->required();
  edit->add_option("--ops", edit_ops, "JSON array of ops, or {\"ops\": [...]}")->required()->check(CLI::ExistingFile);
  edit->add_option("--out", edit_out, "Output PLY")->required();

  auto* recon = app.add_subcommand("reconstruct", "Fit an SDF to a cloud and extract a mesh");
  std::string recon_in, recon_out;
  std::optional<int> res;
  recon->add_option("--in", recon_in, "Input PLY")->required();
  recon->add_option("--out", recon_out, "Output OBJ (a binary PLY mesh is written next to it)")->required();
  recon->add_option("--res", res, "Tet lattice resolution (default 96)");

  auto* rend = app.add_subcommand("render", "Rasterize and shade a mesh under an environment map");
  std::string mesh_path, env_path, prefix;
  std::optional<int> spp_ggx, spp_env, spp_hemi, shadow_steps, width, height;
  std::optional<double> shadow_dist, azimuth, elevation, distance, fov, metallic, roughness;
  bool no_shadows = false;
  rend->add_option("--mesh", mesh_path, "Input OBJ")->required();
  rend->add_option("--env", env_path, "Equirectangular PFM (default: built-in sun and sky)");
  rend->add_option("--out", prefix, "Output prefix: writes .png, .pfm and .json")->required();
  rend->add_option("--spp-ggx", spp_ggx, "GGX lobe samples per pixel (default 6)");
  rend->add_option("--spp-env", spp_env, "Environment samples per pixel (default 6)");
  rend->add_option("--spp-hemi", spp_hemi, "Cosine hemisphere samples per pixel (default 4)");
  rend->add_option("--shadow-dist", shadow_dist, "Screen-space shadow march distance (default 0.25)");
  rend->add_option("--shadow-steps", shadow_steps, "Shadow march steps (default 6)");
  rend->add_flag("--no-shadows", no_shadows, "Disable the shadow test");
  rend->add_option("--width", width, "Image width (default 256)");
  rend->add_option("--height", height, "Image height (default 256)");
  rend->add_option("--azimuth", azimuth, "Orbit azimuth in degrees (default 30)");
  rend->add_option("--elevation", elevation, "Orbit elevation in degrees (default 20)");
  rend->add_option("--distance", distance, "Orbit distance (default 3.2)");
  rend->add_option("--fov", fov, "Vertical field of view in degrees (default 40)");
  rend->add_option("--metallic", metallic, "Metallic in [0, 1] (default 0)");
  rend->add_option("--roughness", roughness, "Roughness in [0.03, 1] (default 0.5)");

  auto* ev = app.add_subcommand("eval", "Align a predicted mesh to ground truth and report metrics");
  std::string pred, gt, report, eval_env;
  ev->add_option("--pred", pred, "Predicted OBJ")->required();
  ev->add_option("--gt", gt, "Ground-truth OBJ")->required();
  ev->add_option("--env", eval_env, "PFM lighting for the PSNR/SSIM renders (default: built-in)");
  ev->add_option("--out", report, "Report JSON")->required();

  auto* serve = app.add_subcommand("serve", "Run the interactive edit/mesh/render HTTP service");
  std::optional<int> port, serve_res;
  std::optional<std::string> host;
  serve->add_option("--port", port, "TCP port (default 8080; 0 picks a free port)");
  serve->add_option("--host", host, "Bind address (default 127.0.0.1)");
  serve->add_option("--res", serve_res, "Default re-mesh resolution (default 64)");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    PipelineConfig c = common.load();
    if (steps) c.sampler.steps = *steps;
    if (eta) c.sampler.eta = *eta;
    if (cfg_scale) c.sampler.cfg_scale = *cfg_scale;
    if (n_points) {
      if (*n_points < 1) throw ConfigError("sample: --n must be positive");
      c.sampler.num_points = static_cast<std::size_t>(*n_points);
    }
    if (res) c.reconstruct.resolution = *res;
    RenderConfig& r = c.render;
    if (spp_ggx) r.spp_ggx = *spp_ggx;
    if (spp_env) r.spp_env = *spp_env;
    if (spp_hemi) r.spp_hemi = *spp_hemi;
    if (shadow_dist) r.shadow_distance = *shadow_dist;
    if (shadow_steps) r.shadow_steps = *shadow_steps;
    if (no_shadows) r.shadows = false;
    if (width) r.width = *width;
    if (height) r.height = *height;
    if (azimuth) r.azimuth_deg = *azimuth;
    if (elevation) r.elevation_deg = *elevation;
    if (distance) r.distance = *distance;
    if (fov) r.fov_deg = *fov;
    if (metallic) r.metallic = *metallic;
    if (roughness) r.roughness = *roughness;
    if (port) c.service.port = *port;
    if (host) c.service.host = *host;
    if (serve_res) c.service.resolution = *serve_res;
    try {
      c.validate();
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    if (!common.effective_config_path.empty())
      write_file_atomic(common.effective_config_path, to_json(c).dump(2) + "\n");

    if (*fixture) return cmd_fixture(c, shape, n, out_dir, out);
    if (*sample) return cmd_sample(c, sa, out);
    if (*edit) return cmd_edit(edit_in, edit_ops, edit_out, out);
    if (*recon) return cmd_reconstruct(c, recon_in, recon_out, out, err);
    if (*rend) return cmd_render(c, mesh_path, env_path, prefix, out, err);
    if (*ev) return cmd_eval(c, pred, gt, eval_env, report, out);
    if (*serve) return cmd_serve(c, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "stage error: " << e.what() << "\n";
    return kExitStage;
  }
  return kExitConfig;
}

}  // namespace pforge::app
