// Command-line driver: mesh generation, experiment runs, gauge analysis of
// checkpoints, and heatmap rendering.

#include "stripes/experiment.hpp"
#include "stripes/export.hpp"
#include "stripes/gauge.hpp"
#include "stripes/mesh.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>

namespace {

using namespace stripes;

struct KeyOverride {
  std::string key;
  std::string value;
};

void add_config_flags(CLI::App* cmd, std::vector<KeyOverride>& overrides) {
  static const std::vector<std::string> keys = {
      "semi_major",  "semi_minor",      "target_edge", "lambda",      "sigma",
      "tau",         "a",               "cg_sweeps",   "gs_sweeps",   "outer_iterations",
      "gamma_tolerance", "stop_tol",    "stop_window", "mode",        "output_dir",
      "log_stride",  "snapshot_stride", "seed",        "mu_threshold", "heatmap_px"};
  for (const auto& key : keys) {
    cmd->add_option_function<std::string>(
        "--" + key, [&overrides, key](const std::string& v) { overrides.push_back({key, v}); },
        "overrides config key " + key);
  }
}

int cmd_mesh(double semi_major, double semi_minor, double target_edge, const std::string& out_path) {
  const auto tri = build_ellipse_mesh(semi_major, semi_minor, target_edge);
  save_mesh(tri, out_path);
  const auto q = mesh_quality(tri);
  std::cout << "vertices " << tri.vertex_count() << "\nedges " << q.edge_count << "\nfaces "
            << tri.face_count() << "\nmin_angle_deg " << q.min_angle * 180.0 / std::numbers::pi
            << "\nmax_edge " << q.max_edge << "\n";
  return 0;
}

int cmd_analyze(const std::string& mesh_path, const std::string& checkpoint_path, double tol,
                double mu_threshold, const std::string& out_path) {
  const auto tri = load_mesh(mesh_path);
  const auto state = load_checkpoint(checkpoint_path);
  if (state.theta.size() != tri.interior_count())
    throw ConfigError("analyze: checkpoint does not match the mesh");

  const Vector theta_full = lift_full(tri, state.theta);
  auto strips = decompose_strips(tri, theta_full, tol);
  strip_orientation(tri, theta_full, strips);

  double thr = mu_threshold;
  const double mu_max = state.mu.size() ? state.mu.cwiseAbs().maxCoeff() : 0.0;
  if (thr < 0.0) thr = 0.25 * mu_max;
  std::vector<Disclination> defects;
  if (mu_max > 0.0) defects = detect_disclinations(state, strips, tri, thr);
  write_disclinations_csv(out_path, defects);

  std::cout << "strips " << strips.strips.size() << "\n";
  for (std::size_t s = 0; s < strips.strips.size(); ++s) {
    const auto& strip = strips.strips[s];
    std::cout << "strip " << s << " faces " << strip.faces.size() << " orientation " << strip.orientation;
    if (!strip.degenerate) std::cout << " theta " << strip.theta_lo << ".." << strip.theta_hi;
    std::cout << "\n";
  }
  std::cout << "orientation_defect " << orientation_defect(strips, tri) << "\n";
  std::cout << "disclinations " << defects.size() << "\n";
  return 0;
}

int cmd_render(const std::string& mesh_path, const std::string& checkpoint_path, const std::string& field,
               double lo, double hi, int px, const std::string& out_path) {
  const auto tri = load_mesh(mesh_path);
  const auto state = load_checkpoint(checkpoint_path);
  if (state.theta.size() != tri.interior_count())
    throw ConfigError("render: checkpoint does not match the mesh");
  const Vector theta_full = lift_full(tri, state.theta);

  if (field == "h") {
    Vector h(tri.vertex_count());
    for (int v = 0; v < tri.vertex_count(); ++v) h(v) = std::cos(theta_full(v));
    render_heatmap(h, tri, false, lo, hi, out_path, px);
  } else if (field == "theta") {
    render_heatmap(theta_full, tri, false, lo, hi, out_path, px);
  } else if (field == "mu") {
    render_heatmap(lift_full(tri, state.mu), tri, false, lo, hi, out_path, px);
  } else if (field == "gradnorm") {
    const Vector g = face_gradients_full(tri, theta_full).rowwise().norm();
    render_heatmap(g, tri, true, lo, hi, out_path, px);
  } else {
    throw ConfigError("render: unknown field '" + field + "' (h, theta, mu, gradnorm)");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variational stripe-pattern solver"};
  app.require_subcommand(1);

  // mesh
  auto* mesh_cmd = app.add_subcommand("mesh", "generate an elliptical mesh and print a summary");
  double semi_major = 32.0 * std::numbers::pi;
  double semi_minor = 20.0 * std::numbers::pi;
  double target_edge = std::numbers::pi / 4.0;
  std::string mesh_out = "mesh.txt";
  mesh_cmd->add_option("--semi_major", semi_major, "ellipse semi-major axis");
  mesh_cmd->add_option("--semi_minor", semi_minor, "ellipse semi-minor axis");
  mesh_cmd->add_option("--target_edge", target_edge, "target edge length");
  mesh_cmd->add_option("--out", mesh_out, "output mesh file");

  // run
  auto* run_cmd = app.add_subcommand("run", "run the stripe experiment");
  std::string config_path;
  std::string init_checkpoint;
  std::vector<KeyOverride> overrides;
  run_cmd->add_option("--config", config_path, "config file (key = value lines)");
  run_cmd->add_option("--init_checkpoint", init_checkpoint, "restart from a state dump");
  add_config_flags(run_cmd, overrides);

  // analyze
  auto* an_cmd = app.add_subcommand("analyze", "gauge post-processing of a checkpoint");
  std::string an_mesh, an_ckpt, an_out = "disclinations.csv";
  double an_tol = 0.3, an_thr = -1.0;
  an_cmd->add_option("--mesh", an_mesh, "mesh file")->required();
  an_cmd->add_option("--checkpoint", an_ckpt, "state dump")->required();
  an_cmd->add_option("--tol", an_tol, "singular band tolerance");
  an_cmd->add_option("--mu_threshold", an_thr, "defect cluster threshold (<0 = auto)");
  an_cmd->add_option("--out", an_out, "disclination list output");

  // render
  auto* rd_cmd = app.add_subcommand("render", "rasterize a field to a portable pixmap");
  std::string rd_mesh, rd_ckpt, rd_field = "h", rd_out = "field.ppm";
  double rd_lo = -1.0, rd_hi = 1.0;
  int rd_px = 800;
  rd_cmd->add_option("--mesh", rd_mesh, "mesh file")->required();
  rd_cmd->add_option("--checkpoint", rd_ckpt, "state dump")->required();
  rd_cmd->add_option("--field", rd_field, "h | theta | mu | gradnorm");
  rd_cmd->add_option("--min", rd_lo, "lower data range");
  rd_cmd->add_option("--max", rd_hi, "upper data range");
  rd_cmd->add_option("--px", rd_px, "pixels along the long axis");
  rd_cmd->add_option("--out", rd_out, "output image path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (mesh_cmd->parsed()) return cmd_mesh(semi_major, semi_minor, target_edge, mesh_out);
    if (run_cmd->parsed()) {
      ExperimentConfig cfg = config_path.empty() ? default_config() : load_config_file(config_path);
      for (const auto& o : overrides) apply_override(cfg, o.key, o.value);
      if (!init_checkpoint.empty()) {
        // restart path: run a single mode from the stored state
        cfg.validate();
        if (cfg.mode == "both")
          throw ConfigError("run: --init_checkpoint requires mode restricted or unrestricted");
        const auto tri = build_ellipse_mesh(cfg.semi_major, cfg.semi_minor, cfg.target_edge);
        PhaseState state = load_checkpoint(init_checkpoint);
        if (state.theta.size() != tri.interior_count())
          throw ConfigError("run: checkpoint does not match the configured mesh");
        SolverConfig scfg = cfg.solver;
        scfg.mu_frozen = (cfg.mode == "restricted");
        BregmanSolver solver(tri, scfg);
        const auto result = solver.run(state, cfg.log_stride);
        std::filesystem::create_directories(cfg.output_dir);
        write_energy_log((std::filesystem::path(cfg.output_dir) / "energy.log").string(), result.log);
        save_checkpoint(result.state,
                        (std::filesystem::path(cfg.output_dir) / "checkpoint.txt").string());
        return 0;
      }
      run_experiment(cfg);
      return 0;
    }
    if (an_cmd->parsed()) return cmd_analyze(an_mesh, an_ckpt, an_tol, an_thr, an_out);
    if (rd_cmd->parsed()) return cmd_render(rd_mesh, rd_ckpt, rd_field, rd_lo, rd_hi, rd_px, rd_out);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const SolverAbort& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
