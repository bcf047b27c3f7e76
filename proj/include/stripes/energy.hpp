#ifndef STRIPES_ENERGY_HPP
#define STRIPES_ENERGY_HPP

// Energy functionals reported by the solver: the decoupled free-discontinuity
// energy, its convexity-split pieces, and the eikonal diagnostic.

#include "stripes/fem.hpp"

namespace stripes {

struct EnergyBreakdown {
  double bending = 0.0;  // rho' M rho
  double well = 0.0;     // sum_f area (|grad theta|^2 - 1)^2
  double jump = 0.0;     // sigma * sum |mu_i| |sin theta_i|
  double total = 0.0;
  double constraint_residual = 0.0;  // | M rho + K theta + mu |
};

EnergyBreakdown evaluate(const OperatorSet& ops, const Vector& theta, const Vector& rho, const Vector& mu,
                         double sigma);

struct WellSplit {
  double convex = 0.0;   // a * sum_f area |grad theta|^2
  double concave = 0.0;  // -sum_f area [(a+2)|grad|^2 - |grad|^4]
  bool gradient_bound_ok = true;  // max |grad theta| < (a+2)/6
};

WellSplit split_well_pieces(const OperatorSet& ops, const Vector& theta, double a);

// eps * int rho^2 + (1/eps) * int (1 - |grad theta|^2)^2, with rho standing
// in for the Hessian norm via the divergence constraint.
double aviles_giga_energy(const OperatorSet& ops, const Vector& theta, const Vector& rho, double eps);

double mesh_area(const OperatorSet& ops);

}  // namespace stripes

#endif
