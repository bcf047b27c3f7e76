#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stripes/bregman.hpp"
#include "stripes/sparse.hpp"
#include "test_helpers.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

using namespace stripes;
using test::random_vector;
using test::to_dense;
constexpr double pi = std::numbers::pi;

namespace {

// brute-force minimizer of w |m| + (lambda/2) (m - nu)^2 on a grid
double grid_shrink_oracle(double nu, double w, double lambda, double step = 1e-4, double span = 10.0) {
  double best_m = -span, best_f = 1e300;
  const long count = static_cast<long>(std::llround(2.0 * span / step));
  for (long k = 0; k <= count; ++k) {
    const double m = -span + k * step;
    const double f = w * std::abs(m) + 0.5 * lambda * (m - nu) * (m - nu);
    if (f < best_f) {
      best_f = f;
      best_m = m;
    }
  }
  return best_m;
}

}  // namespace

TEST_CASE("shrink: frozen cases and the sign convention") {
  Vector nu(3), thr(3);
  nu << 2.0, 0.3, -2.0;
  thr << 0.5, 0.5, 0.5;
  const Vector out = shrink(nu, thr);
  CHECK(out(0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(out(1) == 0.0);
  CHECK(out(2) == doctest::Approx(-1.5).epsilon(1e-15));

  // zero threshold passes nu through untouched
  Vector z = Vector::Zero(3);
  CHECK((shrink(nu, z) - nu).norm() == 0.0);
  CHECK_THROWS_AS(shrink(nu, Vector::Zero(2)), std::invalid_argument);
}

TEST_CASE("shrink matches the brute-force grid minimizer") {
  std::mt19937 rng(73);
  std::uniform_real_distribution<double> unu(-8.0, 8.0);
  std::uniform_real_distribution<double> uw(0.0, 3.0);
  const double lambda = 0.5;
  for (int trial = 0; trial < 300; ++trial) {
    const double nu = unu(rng);
    const double w = uw(rng);  // sigma |sin theta|
    Vector vn(1), vt(1);
    vn << nu;
    vt << w / lambda;
    const double ours = shrink(vn, vt)(0);
    const double oracle = grid_shrink_oracle(nu, w, lambda);
    CHECK(std::abs(ours - oracle) <= 1e-4 + 1e-12);
  }
}

TEST_CASE("theta update: well bottoms are fixed points") {
  Vector zeta(4);
  zeta << 0.0, pi, -pi, 3.0 * pi;
  const Vector out = update_theta(zeta, 0.05);
  CHECK(out(0) == 0.0);
  CHECK(out(1) == pi);
  CHECK(out(2) == -pi);
  CHECK(out(3) == 3.0 * pi);
}

TEST_CASE("theta update: frozen unclamped and clamped branches") {
  Vector zeta(2);
  zeta << 0.1, 0.01;
  const Vector out = update_theta(zeta, 0.05);
  // unclamped: 0.1 - 0.05 cos(0.1)
  CHECK(out(0) == doctest::Approx(0.1 - 0.05 * std::cos(0.1)).epsilon(1e-15));
  CHECK(out(0) == doctest::Approx(0.050250).epsilon(1e-4));
  // clamped at the well bottom, no overshoot
  CHECK(out(1) == 0.0);
}

TEST_CASE("theta update properties on random input") {
  std::mt19937 rng(79);
  std::uniform_real_distribution<double> uz(-12.0, 12.0);
  std::uniform_real_distribution<double> ut(0.0, 0.5);
  for (int trial = 0; trial < 20000; ++trial) {
    const double z = uz(rng);
    const double st = ut(rng);
    Vector vz(1);
    vz << z;
    const double out = update_theta(vz, st)(0);
    const double beta = pi * std::floor(z / pi + 0.5);
    // never moves past the nearest well bottom
    CHECK(std::abs(out - beta) <= std::abs(z - beta) + 1e-15);
    // unclamped branch equals forward Euler of the modulus flow
    const double euler = z - st * ((std::sin(z) > 0) - (std::sin(z) < 0)) * std::cos(z);
    if (st * std::abs(std::cos(z)) < std::abs(beta - z)) CHECK(out == doctest::Approx(euler).epsilon(1e-12));
  }
}

TEST_CASE("rho update: zero state stays zero; scalar oracle; objective decreases") {
  // synthetic operator set: M = identity, K = 0 on two unknowns
  OperatorSet ops;
  ops.n = 2;
  ops.face_count = 1;
  ops.M = test::from_dense(Eigen::MatrixXd::Identity(2, 2));
  ops.K = test::from_dense(Eigen::MatrixXd::Zero(2, 2));
  ops.Dx = SparseMatrix(1, 2);
  ops.Dy = SparseMatrix(1, 2);
  ops.A = test::from_dense(Eigen::MatrixXd::Identity(1, 1));

  const double lambda = 0.5;
  const double c = 1.7;  // mu + b
  PhaseState s;
  s.theta = Vector::Zero(2);
  s.rho = Vector::Zero(2);
  s.mu = Vector::Constant(2, c);
  s.b = Vector::Zero(2);

  // minimize rho'M rho + (lambda/2) |M rho + c|^2 directly: rho = -lambda c / (2 + lambda)
  const SparseMatrix system = test::from_dense(Eigen::MatrixXd::Identity(2, 2) * (2.0 + lambda));
  const Vector rhs = Vector::Constant(2, -lambda * c);
  const Vector rho = conjugate_gradient(system, rhs, Vector::Zero(2), 10);
  CHECK(rho(0) == doctest::Approx(-lambda * c / (2.0 + lambda)).epsilon(1e-10));

  // all-zero data keeps rho at zero through the actual solver
  const auto tri = test::grid_patch(4, 4, 0.5);
  SolverConfig cfg;
  cfg.outer_iterations = 1;
  BregmanSolver solver(tri, cfg);
  PhaseState zero;
  const int n = solver.ops().n;
  zero.theta = zero.rho = zero.mu = zero.b = Vector::Zero(n);
  CHECK(solver.update_rho(zero).norm() == 0.0);

  // objective never increases relative to the incoming iterate
  std::mt19937 rng(83);
  const auto& sops = solver.ops();
  auto objective = [&](const Vector& r, const Vector& cc) {
    return r.dot(sops.M * r) + 0.5 * cfg.lambda * (sops.M * r + cc).squaredNorm();
  };
  for (int trial = 0; trial < 10; ++trial) {
    PhaseState st;
    st.theta = random_vector(n, rng);
    st.rho = random_vector(n, rng);
    st.mu = random_vector(n, rng);
    st.b = random_vector(n, rng);
    const Vector cc = sops.K * st.theta + st.mu + st.b;
    const Vector out = solver.update_rho(st);
    CHECK(objective(out, cc) <= objective(st.rho, cc) + 1e-12);
  }
}

TEST_CASE("mu update: frozen config returns zero; sin = 0 passes nu through") {
  const auto tri = test::grid_patch(4, 4, 0.5);
  SolverConfig cfg;
  cfg.mu_frozen = true;
  BregmanSolver frozen(tri, cfg);
  const int n = frozen.ops().n;
  std::mt19937 rng(89);
  PhaseState s;
  s.theta = random_vector(n, rng);
  s.rho = random_vector(n, rng);
  s.mu = random_vector(n, rng);
  s.b = random_vector(n, rng);
  CHECK(frozen.update_mu(s, s.rho).norm() == 0.0);

  cfg.mu_frozen = false;
  BregmanSolver solver(tri, cfg);
  PhaseState t;
  t.theta = Vector::Constant(n, pi);  // sin(pi * k) = 0 up to roundoff
  t.rho = Vector::Zero(n);
  t.mu = Vector::Zero(n);
  t.b = random_vector(n, rng);
  const Vector nu = -(solver.ops().M * t.rho) - solver.ops().K * t.theta - t.b;
  const Vector mu = solver.update_mu(t, t.rho);
  CHECK((mu - nu).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("zeta update: tiny time step pins zeta to theta; objective decreases") {
  const auto tri = test::grid_patch(5, 5, 0.4);
  SolverConfig cfg;
  cfg.tau = 1e-8;
  cfg.gs_sweeps = 5;
  BregmanSolver solver(tri, cfg);
  const int n = solver.ops().n;
  std::mt19937 rng(97);
  PhaseState s;
  s.theta = random_vector(n, rng);
  s.rho = random_vector(n, rng);
  s.mu = random_vector(n, rng);
  s.b = random_vector(n, rng);
  const auto L = solver.weighted_stiffness(s.theta);
  const Vector zeta = solver.update_zeta(s, s.rho, s.mu, L);
  CHECK((zeta - s.theta).cwiseAbs().maxCoeff() < 1e-6);

  SolverConfig cfg2;
  cfg2.tau = 0.1;
  BregmanSolver solver2(tri, cfg2);
  const auto& ops = solver2.ops();
  auto objective = [&](const Vector& z, const PhaseState& st, const SparseMatrix& l, const Vector& rho_new,
                       const Vector& mu_new) {
    return 0.5 / cfg2.tau * (z - st.theta).squaredNorm() + cfg2.a * z.dot(ops.K * z) -
           z.dot(2.0 * (cfg2.a + 2.0) * (ops.K * st.theta) - 4.0 * (l * st.theta)) +
           0.5 * cfg2.lambda * (ops.M * rho_new + ops.K * z + mu_new + st.b).squaredNorm();
  };
  for (int trial = 0; trial < 10; ++trial) {
    PhaseState st;
    st.theta = random_vector(n, rng);
    st.rho = random_vector(n, rng);
    st.mu = random_vector(n, rng);
    st.b = random_vector(n, rng);
    const Vector rho_new = solver2.update_rho(st);
    const Vector mu_new = solver2.update_mu(st, rho_new);
    const auto L2 = solver2.weighted_stiffness(st.theta);
    const Vector z = solver2.update_zeta(st, rho_new, mu_new, L2);
    CHECK(objective(z, st, L2, rho_new, mu_new) <= objective(st.theta, st, L2, rho_new, mu_new) + 1e-10);
  }
}

TEST_CASE("bregman refresh accumulates the constraint residual") {
  const auto tri = test::grid_patch(4, 4, 0.5);
  SolverConfig cfg;
  BregmanSolver solver(tri, cfg);
  const int n = solver.ops().n;
  std::mt19937 rng(101);
  PhaseState s;
  s.theta = random_vector(n, rng);
  s.rho = random_vector(n, rng);
  s.mu = random_vector(n, rng);
  s.b = Vector::Zero(n);
  const Vector r = solver.ops().M * s.rho + solver.ops().K * s.theta + s.mu;
  const Vector b1 = solver.bregman_refresh(s, s.rho, s.theta, s.mu);
  CHECK((b1 - r).norm() < 1e-14);
  PhaseState s2 = s;
  s2.b = b1;
  const Vector b2 = solver.bregman_refresh(s2, s.rho, s.theta, s.mu);
  CHECK((b2 - 2.0 * r).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("one step matches an independent dense reference on a tiny mesh") {
  // straight-line reference with exact subproblem solves; sweep counts raised
  // until the inexact solvers agree with it
  const auto tri = test::grid_patch(4, 4, 0.6);
  REQUIRE(tri.interior_count() == 4);
  SolverConfig cfg;
  cfg.lambda = 0.5;
  cfg.sigma = 1.0;
  cfg.tau = 0.1;
  cfg.a = 6.0;
  cfg.cg_sweeps = 400;
  cfg.gs_sweeps = 4000;
  BregmanSolver solver(tri, cfg);
  const auto& ops = solver.ops();
  const int n = ops.n;

  std::mt19937 rng(103);
  PhaseState s;
  s.theta = random_vector(n, rng, 2.0);
  s.rho = random_vector(n, rng);
  s.mu = random_vector(n, rng);
  s.b = random_vector(n, rng);
  s.iteration = 7;

  const Eigen::MatrixXd M = to_dense(ops.M);
  const Eigen::MatrixXd K = to_dense(ops.K);
  const Eigen::MatrixXd Dx = to_dense(ops.Dx);
  const Eigen::MatrixXd Dy = to_dense(ops.Dy);

  // rho: (2M + lambda M'M) rho = -lambda M'(K theta + mu + b)
  const Eigen::MatrixXd rho_sys = 2.0 * M + cfg.lambda * M.transpose() * M;
  const Vector rho_ref =
      rho_sys.ldlt().solve(-cfg.lambda * M.transpose() * (K * s.theta + s.mu + s.b));

  // mu: shrink of nu = -(M rho + K theta + b)
  const Vector nu = -(M * rho_ref) - K * s.theta - s.b;
  Vector mu_ref(n);
  for (int i = 0; i < n; ++i) {
    const double w = (cfg.sigma / cfg.lambda) * std::abs(std::sin(s.theta(i)));
    const double sign = (nu(i) > 0) - (nu(i) < 0);
    mu_ref(i) = sign * std::max(std::abs(nu(i)) - w, 0.0);
  }

  // weighted stiffness from the face weights
  Eigen::VectorXd w(ops.face_count);
  for (int f = 0; f < ops.face_count; ++f) {
    const double gx = Dx.row(f).dot(s.theta);
    const double gy = Dy.row(f).dot(s.theta);
    w(f) = tri.face_areas(f) * (gx * gx + gy * gy);
  }
  const Eigen::MatrixXd L = Dx.transpose() * w.asDiagonal() * Dx + Dy.transpose() * w.asDiagonal() * Dy;

  // zeta: (I/tau + 2aK + lambda K'K) zeta = theta/tau + (2(a+2)K - 4L) theta - lambda K'(M rho + mu + b)
  const Eigen::MatrixXd zeta_sys =
      Eigen::MatrixXd::Identity(n, n) / cfg.tau + 2.0 * cfg.a * K + cfg.lambda * K.transpose() * K;
  const Vector zeta_ref = zeta_sys.ldlt().solve(
      s.theta / cfg.tau + (2.0 * (cfg.a + 2.0) * K - 4.0 * L) * s.theta -
      cfg.lambda * K.transpose() * (M * rho_ref + mu_ref + s.b));

  // componentwise theta rule (step size weighted by the jump mass) and the
  // dual refresh
  Vector theta_ref(n);
  for (int i = 0; i < n; ++i) {
    const double z = zeta_ref(i);
    const double beta = pi * std::floor(z / pi + 0.5);
    const double s2 = std::sin(2.0 * z);
    const double sgn = (s2 > 0) - (s2 < 0);
    theta_ref(i) = z - sgn * std::min(cfg.sigma * cfg.tau * std::abs(mu_ref(i)) * std::abs(std::cos(z)),
                                      std::abs(beta - z));
  }
  const Vector b_ref = s.b + M * rho_ref + K * theta_ref + mu_ref;

  const PhaseState out = solver.step(s);
  CHECK(out.iteration == 8);
  CHECK((out.rho - rho_ref).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((out.mu - mu_ref).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((out.theta - theta_ref).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((out.b - b_ref).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("step is deterministic") {
  const auto tri = build_ellipse_mesh(1.5, 1.0, 0.3);
  SolverConfig cfg;
  cfg.outer_iterations = 5;
  BregmanSolver solver(tri, cfg);
  const auto r1 = solver.run(1);
  const auto r2 = solver.run(1);
  CHECK((r1.state.theta - r2.state.theta).norm() == 0.0);
  CHECK((r1.state.rho - r2.state.rho).norm() == 0.0);
  CHECK((r1.state.mu - r2.state.mu).norm() == 0.0);
  CHECK((r1.state.b - r2.state.b).norm() == 0.0);
  REQUIRE(r1.log.size() == r2.log.size());
  for (std::size_t i = 0; i < r1.log.size(); ++i)
    CHECK(r1.log[i].energy.total == r2.log[i].energy.total);
}

TEST_CASE("frozen mu stays zero along a run") {
  const auto tri = build_ellipse_mesh(1.5, 1.0, 0.3);
  SolverConfig cfg;
  cfg.outer_iterations = 10;
  cfg.mu_frozen = true;
  const auto result = run(cfg, tri, 2);
  CHECK(result.state.mu.cwiseAbs().maxCoeff() == 0.0);
  for (const auto& row : result.log) CHECK(row.energy.jump == 0.0);
}

TEST_CASE("run logs the initial row, stride rows, and the final row") {
  const auto tri = build_ellipse_mesh(1.2, 1.0, 0.4);
  SolverConfig cfg;
  cfg.outer_iterations = 7;
  cfg.stop_tol = 0.0;
  const auto result = run(cfg, tri, 3);
  REQUIRE(result.log.size() == 4);
  CHECK(result.log[0].iteration == 0);
  CHECK(result.log[1].iteration == 3);
  CHECK(result.log[2].iteration == 6);
  CHECK(result.log[3].iteration == 7);
  CHECK(result.state.iteration == 7);

  SolverConfig one = cfg;
  one.outer_iterations = 1;
  const auto tiny = run(one, tri, 5);
  REQUIRE(tiny.log.size() == 2);  // initial row plus the single stepped row
  CHECK(tiny.log.back().iteration == 1);
}

TEST_CASE("initial state is the boundary distance with zero auxiliaries") {
  const auto tri = build_ellipse_mesh(1.5, 1.0, 0.3);
  const auto s = initial_state(tri);
  CHECK(s.iteration == 0);
  CHECK(s.rho.norm() == 0.0);
  CHECK(s.mu.norm() == 0.0);
  CHECK(s.b.norm() == 0.0);
  for (int i = 0; i < tri.interior_count(); ++i)
    CHECK(s.theta(i) == doctest::Approx(boundary_distance(tri, tri.interior_vertices(i))).epsilon(1e-15));
}

TEST_CASE("checkpoint round-trips the full state") {
  std::mt19937 rng(107);
  PhaseState s;
  s.theta = random_vector(6, rng);
  s.rho = random_vector(6, rng);
  s.mu = random_vector(6, rng);
  s.b = random_vector(6, rng);
  s.iteration = 42;
  save_checkpoint(s, "checkpoint_roundtrip.txt");
  const auto back = load_checkpoint("checkpoint_roundtrip.txt");
  CHECK(back.iteration == 42);
  CHECK((back.theta - s.theta).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.rho - s.rho).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.mu - s.mu).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.b - s.b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  cfg.lambda = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.tau = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.outer_iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
