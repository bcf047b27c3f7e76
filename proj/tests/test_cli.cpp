#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stripes/experiment.hpp"
#include "stripes/export.hpp"
#include "stripes/gauge.hpp"

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace stripes;
namespace fs = std::filesystem;
constexpr double pi = std::numbers::pi;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_disk_config(const std::string& outdir, const std::string& mode) {
  ExperimentConfig cfg = default_config();
  cfg.semi_major = 4.0 * pi;
  cfg.semi_minor = 4.0 * pi;
  cfg.target_edge = pi / 3.0;
  cfg.solver.outer_iterations = 60;
  cfg.mode = mode;
  cfg.output_dir = outdir;
  cfg.heatmap_px = 64;
  return cfg;
}

}  // namespace

TEST_CASE("config file: defaults, comments, overrides, rejection of unknown keys") {
  {
    std::ofstream out("cli_test.cfg");
    out << "# a comment line\n";
    out << "semi_major = 10.0   # trailing comment\n";
    out << "semi_minor = 5.0\n";
    out << "mode = restricted\n";
    out << "tau = 0.05\n";
  }
  auto cfg = load_config_file("cli_test.cfg");
  CHECK(cfg.semi_major == 10.0);
  CHECK(cfg.semi_minor == 5.0);
  CHECK(cfg.mode == "restricted");
  CHECK(cfg.solver.tau == 0.05);
  CHECK(cfg.target_edge == doctest::Approx(pi / 4.0));  // untouched default

  apply_override(cfg, "sigma", "2.5");
  CHECK(cfg.solver.sigma == 2.5);
  CHECK_THROWS_AS(apply_override(cfg, "nonsense", "1"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "tau", "abc"), ConfigError);

  {
    std::ofstream out("cli_bad.cfg");
    out << "this line has no equals sign\n";
  }
  CHECK_THROWS_AS(load_config_file("cli_bad.cfg"), ConfigError);
  CHECK_THROWS_AS(load_config_file("missing_file.cfg"), ConfigError);
}

TEST_CASE("config validation rejects inconsistent settings") {
  auto cfg = default_config();
  cfg.mode = "sideways";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = default_config();
  cfg.semi_minor = 2.0 * cfg.semi_major;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = default_config();
  cfg.target_edge = cfg.semi_minor;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = default_config();
  cfg.solver.lambda = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("config echo reproduces every effective parameter") {
  auto cfg = default_config();
  cfg.solver.tau = 0.07;
  cfg.mode = "unrestricted";
  cfg.output_dir = "somewhere";
  cfg.mu_threshold = 0.125;
  const std::string echo = config_echo_text(cfg);
  {
    std::ofstream out("cli_echo.cfg");
    out << echo;
  }
  const auto back = load_config_file("cli_echo.cfg");
  CHECK(back.solver.tau == cfg.solver.tau);
  CHECK(back.mode == cfg.mode);
  CHECK(back.output_dir == cfg.output_dir);
  CHECK(back.mu_threshold == cfg.mu_threshold);
  CHECK(back.semi_major == cfg.semi_major);
  CHECK(config_echo_text(back) == echo);
}

TEST_CASE("restricted run produces the artifact set with an empty disclination list") {
  const auto cfg = small_disk_config("out_restricted", "restricted");
  run_experiment(cfg);
  const fs::path dir = fs::path(cfg.output_dir);
  for (const char* name : {"config.echo", "mesh.txt"}) CHECK(fs::exists(dir / name));
  const fs::path mode_dir = dir / "restricted";
  for (const char* name : {"energy.log", "theta.csv", "fields.csv", "mu.csv", "disclinations.csv",
                           "checkpoint.txt", "h.ppm", "gradnorm.ppm"})
    CHECK(fs::exists(mode_dir / name));
  CHECK_FALSE(fs::exists(dir / "unrestricted"));

  // frozen jump measure: header only
  CHECK(slurp(mode_dir / "disclinations.csv") == "x,y,classification,cluster_size\n");

  // the log parses losslessly and iterations are strictly increasing
  const auto log = read_energy_log((mode_dir / "energy.log").string());
  REQUIRE(log.size() >= 2);
  for (std::size_t i = 1; i < log.size(); ++i) CHECK(log[i].iteration > log[i - 1].iteration);
  CHECK(log.front().iteration == 0);
  write_energy_log((mode_dir / "energy_rewrite.log").string(), log);
  CHECK(slurp(mode_dir / "energy.log") == slurp(mode_dir / "energy_rewrite.log"));
}

TEST_CASE("two identical runs are byte-identical") {
  auto cfg1 = small_disk_config("out_det_a", "unrestricted");
  auto cfg2 = small_disk_config("out_det_b", "unrestricted");
  run_experiment(cfg1);
  run_experiment(cfg2);
  for (const char* name : {"energy.log", "fields.csv", "theta.csv", "mu.csv", "checkpoint.txt"}) {
    CHECK(slurp(fs::path("out_det_a") / "unrestricted" / name) ==
          slurp(fs::path("out_det_b") / "unrestricted" / name));
  }
}

TEST_CASE("checkpoint restarts reproduce the uninterrupted trajectory") {
  const auto tri = build_ellipse_mesh(3.0 * pi, 3.0 * pi, pi / 3.0);
  SolverConfig cfg;
  cfg.outer_iterations = 20;
  cfg.stop_tol = 0.0;
  BregmanSolver solver(tri, cfg);
  const auto full = solver.run(5);

  SolverConfig half = cfg;
  half.outer_iterations = 10;
  BregmanSolver hsolver(tri, half);
  const auto part1 = hsolver.run(5);
  save_checkpoint(part1.state, "restart_state.txt");
  const auto resumed = hsolver.run(load_checkpoint("restart_state.txt"), 5);
  CHECK(resumed.state.iteration == 20);
  CHECK((resumed.state.theta - full.state.theta).cwiseAbs().maxCoeff() == 0.0);
  CHECK((resumed.state.b - full.state.b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("heatmap renderer: uniform interior, white exterior, range checks") {
  const auto tri = build_ellipse_mesh(2.0, 1.0, 0.3);
  const Vector constant = Vector::Constant(tri.vertex_count(), 0.25);
  render_heatmap(constant, tri, false, 0.0, 1.0, "flat.ppm", 48);
  std::ifstream in("flat.ppm");
  std::string magic;
  int w, h, maxval;
  in >> magic >> w >> h >> maxval;
  REQUIRE(magic == "P3");
  REQUIRE(maxval == 255);
  int white = 0, colored = 0;
  int r, g, b;
  std::array<int, 3> interior{-1, -1, -1};
  while (in >> r >> g >> b) {
    if (r == 255 && g == 255 && b == 255) {
      ++white;
    } else {
      ++colored;
      if (interior[0] < 0) interior = {r, g, b};
      CHECK(r == interior[0]);
      CHECK(g == interior[1]);
      CHECK(b == interior[2]);
    }
  }
  CHECK(white > 0);      // corners outside the ellipse
  CHECK(colored > 0);    // the domain itself
  CHECK(white + colored == w * h);

  CHECK_THROWS_AS(render_heatmap(constant, tri, false, 1.0, -1.0, "bad.ppm", 48), std::invalid_argument);
  Vector nan_field = constant;
  nan_field(0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(render_heatmap(nan_field, tri, false, 0.0, 1.0, "bad.ppm", 48), std::invalid_argument);
}

TEST_CASE("heatmap of a striped field shows the analytic number of bands") {
  // h = cos(distance field) on a disk: rings at radius steps of pi
  const auto tri = build_ellipse_mesh(4.0 * pi, 4.0 * pi, pi / 4.0);
  Vector h_field(tri.vertex_count());
  for (int v = 0; v < tri.vertex_count(); ++v)
    h_field(v) = std::cos(boundary_distance(tri, v));
  render_heatmap(h_field, tri, false, -1.0, 1.0, "stripes.ppm", 201);

  std::ifstream in("stripes.ppm");
  std::string magic;
  int w, hh, maxval;
  in >> magic >> w >> hh >> maxval;
  std::vector<int> rgb(3 * w * hh);
  for (auto& c : rgb) in >> c;
  // middle row: count sign changes of (red - blue) across the diameter
  const int row = hh / 2;
  int changes = 0;
  int prev = 0;
  for (int px = 0; px < w; ++px) {
    const int r = rgb[3 * (row * w + px)];
    const int b = rgb[3 * (row * w + px) + 2];
    if (r == 255 && rgb[3 * (row * w + px) + 1] == 255 && b == 255) continue;  // outside
    const int sign = (r > b) - (r < b);
    if (sign != 0 && prev != 0 && sign != prev) ++changes;
    if (sign != 0) prev = sign;
  }
  // cos(4pi - r_dist) crosses zero 8 times along the diameter
  CHECK(changes >= 6);
  CHECK(changes <= 10);
}

TEST_CASE("snapshot stride writes intermediate checkpoints") {
  auto cfg = small_disk_config("out_snapshots", "restricted");
  cfg.solver.outer_iterations = 20;
  cfg.snapshot_stride = 10;
  run_experiment(cfg);
  CHECK(fs::exists(fs::path("out_snapshots") / "restricted" / "checkpoint_10.txt"));
  CHECK(fs::exists(fs::path("out_snapshots") / "restricted" / "checkpoint_20.txt"));
  const auto log = read_energy_log("out_snapshots/restricted/energy.log");
  CHECK(log.front().iteration == 0);
  CHECK(log.back().iteration == 20);
}
