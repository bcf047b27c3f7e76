#include "stripes/bregman.hpp"

#include "stripes/sparse.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace stripes {

void SolverConfig::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("config: lambda must be positive");
  if (sigma < 0.0) throw std::invalid_argument("config: sigma must be nonnegative");
  if (!(tau > 0.0)) throw std::invalid_argument("config: tau must be positive");
  if (a < 0.0) throw std::invalid_argument("config: a must be nonnegative");
  if (cg_sweeps < 0 || gs_sweeps < 0) throw std::invalid_argument("config: sweep counts must be nonnegative");
  if (outer_iterations < 1) throw std::invalid_argument("config: outer_iterations must be at least 1");
  if (!(gamma_tolerance > 0.0)) throw std::invalid_argument("config: gamma_tolerance must be positive");
  if (stop_tol < 0.0 || stop_window < 1) throw std::invalid_argument("config: bad stop heuristic parameters");
}

PhaseState initial_state(const Triangulation& tri) {
  PhaseState s;
  const int n = tri.interior_count();
  s.theta.resize(n);
  for (int i = 0; i < n; ++i) s.theta(i) = boundary_distance(tri, tri.interior_vertices(i));
  s.rho = Vector::Zero(n);
  s.mu = Vector::Zero(n);
  s.b = Vector::Zero(n);
  s.iteration = 0;
  return s;
}

Vector shrink(const Vector& nu, const Vector& threshold) {
  if (nu.size() != threshold.size()) throw std::invalid_argument("shrink: length mismatch");
  Vector out(nu.size());
  for (int i = 0; i < nu.size(); ++i) {
    const double v = nu(i);
    const double sign = (v > 0.0) - (v < 0.0);
    out(i) = sign * std::max(std::abs(v) - threshold(i), 0.0);
  }
  return out;
}

Vector update_theta(const Vector& zeta, double sigma_tau) {
  return update_theta(zeta, Vector(Vector::Constant(zeta.size(), sigma_tau)));
}

Vector update_theta(const Vector& zeta, const Vector& sigma_tau) {
  if (zeta.size() != sigma_tau.size()) throw std::invalid_argument("update_theta: length mismatch");
  constexpr double pi = std::numbers::pi;
  Vector out(zeta.size());
  for (int i = 0; i < zeta.size(); ++i) {
    const double z = zeta(i);
    const double beta = pi * std::floor(z / pi + 0.5);  // nearest multiple, ties upward
    const double s2 = std::sin(2.0 * z);
    const double sign = (s2 > 0.0) - (s2 < 0.0);
    const double move = std::min(sigma_tau(i) * std::abs(std::cos(z)), std::abs(beta - z));
    out(i) = z - sign * move;
  }
  return out;
}

namespace {
SolverConfig validated(SolverConfig cfg) {
  cfg.validate();
  return cfg;
}
}  // namespace

BregmanSolver::BregmanSolver(const Triangulation& tri, SolverConfig cfg)
    : tri_(tri), cfg_(validated(cfg)), ops_(assemble_operators(tri)), l_assembler_(ops_) {
  const int n = ops_.n;
  SparseMatrix identity(n, n);
  identity.setIdentity();
  const SparseMatrix MM = ops_.M * ops_.M;
  const SparseMatrix KK = ops_.K * ops_.K;
  rho_system_ = 2.0 * ops_.M + cfg_.lambda * MM;
  zeta_system_ = (1.0 / cfg_.tau) * identity + 2.0 * cfg_.a * ops_.K + cfg_.lambda * KK;
  rho_system_.makeCompressed();
  zeta_system_.makeCompressed();
}

Vector BregmanSolver::update_rho(const PhaseState& s) const {
  const Vector c = ops_.K * s.theta + s.mu + s.b;
  const Vector rhs = -cfg_.lambda * (ops_.M * c);
  return conjugate_gradient(rho_system_, rhs, s.rho, cfg_.cg_sweeps);
}

Vector BregmanSolver::update_mu(const PhaseState& s, const Vector& rho_new) const {
  if (cfg_.mu_frozen) return Vector::Zero(ops_.n);
  const Vector nu = -(ops_.M * rho_new) - ops_.K * s.theta - s.b;
  Vector threshold(ops_.n);
  for (int i = 0; i < ops_.n; ++i)
    threshold(i) = (cfg_.sigma / cfg_.lambda) * std::abs(std::sin(s.theta(i)));
  return shrink(nu, threshold);
}

SparseMatrix BregmanSolver::weighted_stiffness(const Vector& theta) const {
  return l_assembler_.from_theta(theta);
}

Vector BregmanSolver::update_zeta(const PhaseState& s, const Vector& rho_new, const Vector& mu_new,
                                  const SparseMatrix& L) const {
  const Vector forcing = 2.0 * (cfg_.a + 2.0) * (ops_.K * s.theta) - 4.0 * (L * s.theta);
  const Vector rhs =
      s.theta / cfg_.tau + forcing - cfg_.lambda * (ops_.K * (ops_.M * rho_new + mu_new + s.b));
  return gauss_seidel(zeta_system_, rhs, s.theta, cfg_.gs_sweeps);
}

Vector BregmanSolver::bregman_refresh(const PhaseState& s, const Vector& rho_new, const Vector& theta_new,
                                      const Vector& mu_new) const {
  return s.b + ops_.M * rho_new + ops_.K * theta_new + mu_new;
}

PhaseState BregmanSolver::step(const PhaseState& s) const {
  PhaseState next;
  const Vector rho_new = update_rho(s);
  const Vector mu_new = update_mu(s, rho_new);
  const SparseMatrix L = weighted_stiffness(s.theta);
  const Vector zeta = update_zeta(s, rho_new, mu_new, L);
  const Vector snap_rate = cfg_.sigma * cfg_.tau * mu_new.cwiseAbs();
  next.theta = update_theta(zeta, snap_rate);
  next.rho = rho_new;
  next.mu = mu_new;
  next.b = bregman_refresh(s, rho_new, next.theta, mu_new);
  next.iteration = s.iteration + 1;
  return next;
}

RunResult BregmanSolver::run(int log_stride) const { return run(initial_state(tri_), log_stride); }

RunResult BregmanSolver::run(PhaseState state, int log_stride) const {
  if (log_stride < 1) throw std::invalid_argument("run: log stride must be positive");
  RunResult result;
  const double bound = (cfg_.a + 2.0) / 6.0;

  auto log_row = [&](const PhaseState& s) {
    LogRow row;
    row.iteration = s.iteration;
    row.energy = evaluate(ops_, s.theta, s.rho, s.mu, cfg_.sigma);
    result.log.push_back(row);
    const auto g = gradient_field(ops_, s.theta);
    if (g.rowwise().norm().maxCoeff() >= bound) ++result.gradient_bound_violations;
  };

  log_row(state);
  const int start = state.iteration;
  const int last = start + cfg_.outer_iterations;
  for (int k = start + 1; k <= last; ++k) {
    state = step(state);
    if (!state.theta.allFinite() || !state.rho.allFinite() || !state.mu.allFinite() || !state.b.allFinite())
      throw SolverAbort(k, "state became non-finite");
    if (k % log_stride == 0 || k == last) log_row(state);
    if (cfg_.stop_tol > 0.0 && result.log.size() >= 2) {
      const auto& cur = result.log.back();
      for (auto it = result.log.rbegin(); it != result.log.rend(); ++it) {
        if (cur.iteration - it->iteration >= cfg_.stop_window) {
          const double scale = std::max(std::abs(cur.energy.total), 1.0);
          if (std::abs(cur.energy.total - it->energy.total) < cfg_.stop_tol * scale) {
            result.stopped_early = true;
          }
          break;
        }
      }
      if (result.stopped_early) break;
    }
  }
  result.state = std::move(state);
  return result;
}

RunResult run(const SolverConfig& cfg, const Triangulation& tri, int log_stride) {
  return BregmanSolver(tri, cfg).run(log_stride);
}

namespace {

void write_row(std::ofstream& out, const Vector& v) {
  for (int i = 0; i < v.size(); ++i) out << (i ? " " : "") << v(i);
  out << '\n';
}

Vector read_row(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(std::string("checkpoint: missing ") + what);
  std::istringstream ss(line);
  std::vector<double> vals;
  double x;
  while (ss >> x) vals.push_back(x);
  return Eigen::Map<Vector>(vals.data(), static_cast<int>(vals.size()));
}

}  // namespace

void save_checkpoint(const PhaseState& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out.precision(17);
  out << s.iteration << '\n';
  write_row(out, s.theta);
  write_row(out, s.rho);
  write_row(out, s.mu);
  write_row(out, s.b);
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

PhaseState load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  PhaseState s;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_checkpoint: missing iteration line");
  s.iteration = std::stoi(line);
  s.theta = read_row(in, "theta");
  s.rho = read_row(in, "rho");
  s.mu = read_row(in, "mu");
  s.b = read_row(in, "b");
  if (s.rho.size() != s.theta.size() || s.mu.size() != s.theta.size() || s.b.size() != s.theta.size())
    throw std::runtime_error("load_checkpoint: inconsistent vector lengths");
  return s;
}

}  // namespace stripes
