#ifndef STRIPES_BREGMAN_HPP
#define STRIPES_BREGMAN_HPP

// Split-Bregman IMEX iteration for the relaxed stripe energy: inexact CG/GS
// subproblem solves, exact componentwise shrink updates, and the Bregman
// dual refresh.

#include "stripes/energy.hpp"
#include "stripes/fem.hpp"
#include "stripes/mesh.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace stripes {

struct SolverConfig {
  double lambda = 0.5;  // Bregman weight
  double sigma = 1.0;   // jump penalty weight
  double tau = 0.1;     // time step
  double a = 6.0;       // convexity-split parameter
  int cg_sweeps = 5;
  int gs_sweeps = 5;
  int outer_iterations = 2000;
  bool mu_frozen = false;        // restricts mu to 0 (no jump measure)
  double gamma_tolerance = 0.3;  // |sin theta| band threshold for the singular set
  double stop_tol = 1e-8;        // relative energy change for early stop; 0 disables
  int stop_window = 100;

  void validate() const;
};

struct PhaseState {
  Vector theta, rho, mu, b;
  int iteration = 0;
};

// theta = distance to the boundary at interior vertices; rho = mu = b = 0.
PhaseState initial_state(const Triangulation& tri);

// Componentwise soft threshold: sign(nu) * max(|nu| - threshold, 0).
Vector shrink(const Vector& nu, const Vector& threshold);

// Forward-Euler relaxation toward the nearest multiple of pi, clamped so the
// well bottom is never overshot; sign(0) = 0 leaves stationary points fixed.
Vector update_theta(const Vector& zeta, double sigma_tau);
// Per-component step sizes; the solver uses sigma * tau * |mu_i|, the
// gradient-flow weight of the jump potential, so vertices carrying no jump
// mass relax purely by the proximal step.
Vector update_theta(const Vector& zeta, const Vector& sigma_tau);

struct LogRow {
  int iteration = 0;
  EnergyBreakdown energy;
};

struct RunResult {
  PhaseState state;
  std::vector<LogRow> log;
  bool stopped_early = false;
  int gradient_bound_violations = 0;  // logged rows with max |grad theta| >= (a+2)/6
};

struct SolverAbort : std::runtime_error {
  SolverAbort(int iteration, const std::string& what)
      : std::runtime_error("solver abort at iteration " + std::to_string(iteration) + ": " + what),
        iteration(iteration) {}
  int iteration;
};

class BregmanSolver {
 public:
  BregmanSolver(const Triangulation& tri, SolverConfig cfg);

  Vector update_rho(const PhaseState& s) const;
  Vector update_mu(const PhaseState& s, const Vector& rho_new) const;
  SparseMatrix weighted_stiffness(const Vector& theta) const;
  Vector update_zeta(const PhaseState& s, const Vector& rho_new, const Vector& mu_new,
                     const SparseMatrix& L) const;
  Vector bregman_refresh(const PhaseState& s, const Vector& rho_new, const Vector& theta_new,
                         const Vector& mu_new) const;

  // One full iteration: rho, mu, weighted stiffness + zeta, theta, dual refresh.
  PhaseState step(const PhaseState& s) const;

  RunResult run(int log_stride = 10) const;
  RunResult run(PhaseState state, int log_stride) const;

  const OperatorSet& ops() const { return ops_; }
  const SolverConfig& config() const { return cfg_; }
  const Triangulation& tri() const { return tri_; }

 private:
  const Triangulation& tri_;
  SolverConfig cfg_;
  OperatorSet ops_;
  SparseMatrix rho_system_;   // 2M + lambda M M
  SparseMatrix zeta_system_;  // (1/tau) I + 2aK + lambda K K
  WeightedStiffnessAssembler l_assembler_;
};

RunResult run(const SolverConfig& cfg, const Triangulation& tri, int log_stride = 10);

// Plain-text state dump: iteration line, then theta, rho, mu, b rows.
void save_checkpoint(const PhaseState& s, const std::string& path);
PhaseState load_checkpoint(const std::string& path);

}  // namespace stripes

#endif
