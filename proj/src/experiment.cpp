#include "stripes/experiment.hpp"

#include "stripes/export.hpp"
#include "stripes/gauge.hpp"
#include "stripes/mesh.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace stripes {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for " + key + ": '" + value + "'");
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer value for " + key + ": '" + value + "'");
  }
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.semi_major = 32.0 * kPi;
  cfg.semi_minor = 20.0 * kPi;
  cfg.target_edge = kPi / 4.0;
  return cfg;
}

void ExperimentConfig::validate() const {
  if (!(semi_major >= semi_minor) || !(semi_minor > 0.0))
    throw ConfigError("config: require semi_major >= semi_minor > 0");
  if (!(target_edge > 0.0) || !(target_edge < semi_minor))
    throw ConfigError("config: require 0 < target_edge < semi_minor");
  if (mode != "restricted" && mode != "unrestricted" && mode != "both")
    throw ConfigError("config: mode must be restricted, unrestricted or both");
  if (log_stride < 1) throw ConfigError("config: log_stride must be positive");
  if (snapshot_stride < 0) throw ConfigError("config: snapshot_stride must be nonnegative");
  if (heatmap_px < 2) throw ConfigError("config: heatmap_px too small");
  if (output_dir.empty()) throw ConfigError("config: output_dir must be set");
  try {
    solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "semi_major")
    cfg.semi_major = parse_double(key, value);
  else if (key == "semi_minor")
    cfg.semi_minor = parse_double(key, value);
  else if (key == "target_edge")
    cfg.target_edge = parse_double(key, value);
  else if (key == "lambda")
    cfg.solver.lambda = parse_double(key, value);
  else if (key == "sigma")
    cfg.solver.sigma = parse_double(key, value);
  else if (key == "tau")
    cfg.solver.tau = parse_double(key, value);
  else if (key == "a")
    cfg.solver.a = parse_double(key, value);
  else if (key == "cg_sweeps")
    cfg.solver.cg_sweeps = static_cast<int>(parse_long(key, value));
  else if (key == "gs_sweeps")
    cfg.solver.gs_sweeps = static_cast<int>(parse_long(key, value));
  else if (key == "outer_iterations")
    cfg.solver.outer_iterations = static_cast<int>(parse_long(key, value));
  else if (key == "gamma_tolerance")
    cfg.solver.gamma_tolerance = parse_double(key, value);
  else if (key == "stop_tol")
    cfg.solver.stop_tol = parse_double(key, value);
  else if (key == "stop_window")
    cfg.solver.stop_window = static_cast<int>(parse_long(key, value));
  else if (key == "mode")
    cfg.mode = value;
  else if (key == "output_dir")
    cfg.output_dir = value;
  else if (key == "log_stride")
    cfg.log_stride = static_cast<int>(parse_long(key, value));
  else if (key == "snapshot_stride")
    cfg.snapshot_stride = static_cast<int>(parse_long(key, value));
  else if (key == "seed")
    cfg.seed = parse_long(key, value);
  else if (key == "mu_threshold")
    cfg.mu_threshold = parse_double(key, value);
  else if (key == "heatmap_px")
    cfg.heatmap_px = static_cast<int>(parse_long(key, value));
  else
    throw ConfigError("config: unknown key '" + key + "'");
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  ExperimentConfig cfg = default_config();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) + " of " + path + " is not key = value");
    apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

std::string config_echo_text(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "semi_major = " << fmt(cfg.semi_major) << '\n';
  out << "semi_minor = " << fmt(cfg.semi_minor) << '\n';
  out << "target_edge = " << fmt(cfg.target_edge) << '\n';
  out << "lambda = " << fmt(cfg.solver.lambda) << '\n';
  out << "sigma = " << fmt(cfg.solver.sigma) << '\n';
  out << "tau = " << fmt(cfg.solver.tau) << '\n';
  out << "a = " << fmt(cfg.solver.a) << '\n';
  out << "cg_sweeps = " << cfg.solver.cg_sweeps << '\n';
  out << "gs_sweeps = " << cfg.solver.gs_sweeps << '\n';
  out << "outer_iterations = " << cfg.solver.outer_iterations << '\n';
  out << "gamma_tolerance = " << fmt(cfg.solver.gamma_tolerance) << '\n';
  out << "stop_tol = " << fmt(cfg.solver.stop_tol) << '\n';
  out << "stop_window = " << cfg.solver.stop_window << '\n';
  out << "mode = " << cfg.mode << '\n';
  out << "output_dir = " << cfg.output_dir << '\n';
  out << "log_stride = " << cfg.log_stride << '\n';
  out << "snapshot_stride = " << cfg.snapshot_stride << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "mu_threshold = " << fmt(cfg.mu_threshold) << '\n';
  out << "heatmap_px = " << cfg.heatmap_px << '\n';
  return out.str();
}

namespace {

void run_one_mode(const ExperimentConfig& cfg, const Triangulation& tri, bool restricted) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(cfg.output_dir) / (restricted ? "restricted" : "unrestricted");
  fs::create_directories(dir);

  SolverConfig solver_cfg = cfg.solver;
  solver_cfg.mu_frozen = restricted;
  BregmanSolver solver(tri, solver_cfg);

  RunResult result;
  if (cfg.snapshot_stride > 0) {
    // stride through shorter runs so intermediate checkpoints can be written
    PhaseState state = initial_state(tri);
    result.log.clear();
    int done = 0;
    while (done < cfg.solver.outer_iterations) {
      SolverConfig piece = solver_cfg;
      piece.outer_iterations = std::min(cfg.snapshot_stride, cfg.solver.outer_iterations - done);
      piece.stop_tol = 0.0;
      BregmanSolver piece_solver(tri, piece);
      RunResult part = piece_solver.run(state, cfg.log_stride);
      state = part.state;
      done += piece.outer_iterations;
      const bool first = result.log.empty();
      for (std::size_t i = first ? 0 : 1; i < part.log.size(); ++i) result.log.push_back(part.log[i]);
      save_checkpoint(state, (dir / ("checkpoint_" + std::to_string(done) + ".txt")).string());
    }
    result.state = std::move(state);
  } else {
    result = solver.run(cfg.log_stride);
  }

  const Vector theta_full = lift_full(tri, result.state.theta);
  const Vector mu_full = lift_full(tri, result.state.mu);
  const auto grads = gradient_field(solver.ops(), result.state.theta);
  const Vector gradnorm = grads.rowwise().norm();

  auto strips = decompose_strips(tri, theta_full, cfg.solver.gamma_tolerance);
  strip_orientation(tri, theta_full, strips);

  double mu_thr = cfg.mu_threshold;
  if (mu_thr < 0.0) mu_thr = 0.25 * mu_full.cwiseAbs().maxCoeff();
  std::vector<Disclination> defects;
  if (mu_full.cwiseAbs().maxCoeff() > 0.0)
    defects = detect_disclinations(result.state, strips, tri, mu_thr);

  write_energy_log((dir / "energy.log").string(), result.log);
  write_theta_csv((dir / "theta.csv").string(), tri, theta_full);
  write_fields_csv((dir / "fields.csv").string(), tri, gradnorm, strips.face_labels);
  write_mu_csv((dir / "mu.csv").string(), tri, mu_full);
  write_disclinations_csv((dir / "disclinations.csv").string(), defects);
  save_checkpoint(result.state, (dir / "checkpoint.txt").string());

  Vector h_field(tri.vertex_count());
  for (int v = 0; v < tri.vertex_count(); ++v) h_field(v) = std::cos(theta_full(v));
  render_heatmap(h_field, tri, false, -1.0, 1.0, (dir / "h.ppm").string(), cfg.heatmap_px);
  render_heatmap(gradnorm, tri, true, 0.0, 1.5, (dir / "gradnorm.ppm").string(), cfg.heatmap_px);
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);

  {
    std::ofstream echo(fs::path(cfg.output_dir) / "config.echo");
    if (!echo) throw std::runtime_error("cannot write config.echo");
    echo << config_echo_text(cfg);
  }

  const Triangulation tri = build_ellipse_mesh(cfg.semi_major, cfg.semi_minor, cfg.target_edge);
  save_mesh(tri, (fs::path(cfg.output_dir) / "mesh.txt").string());

  if (cfg.mode == "restricted" || cfg.mode == "both") run_one_mode(cfg, tri, true);
  if (cfg.mode == "unrestricted" || cfg.mode == "both") run_one_mode(cfg, tri, false);
}

}  // namespace stripes
