#include "stripes/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace stripes {

namespace {

void check_state(const OperatorSet& ops, const Vector& theta, const Vector& rho, const Vector& mu) {
  if (theta.size() != ops.n || rho.size() != ops.n || mu.size() != ops.n)
    throw std::invalid_argument("energy: coefficient length mismatch");
  if (!theta.allFinite() || !rho.allFinite() || !mu.allFinite())
    throw std::invalid_argument("energy: non-finite inputs");
}

}  // namespace

double mesh_area(const OperatorSet& ops) {
  double area = 0.0;
  for (int f = 0; f < ops.face_count; ++f) area += ops.A.coeff(f, f);
  return area;
}

EnergyBreakdown evaluate(const OperatorSet& ops, const Vector& theta, const Vector& rho, const Vector& mu,
                         double sigma) {
  check_state(ops, theta, rho, mu);
  if (sigma < 0.0) throw std::invalid_argument("energy: sigma must be nonnegative");

  EnergyBreakdown e;
  e.bending = rho.dot(ops.M * rho);

  const Vector gx = ops.Dx * theta;
  const Vector gy = ops.Dy * theta;
  for (int f = 0; f < ops.face_count; ++f) {
    const double g2 = gx(f) * gx(f) + gy(f) * gy(f);
    const double d = g2 - 1.0;
    e.well += ops.A.coeff(f, f) * d * d;
  }

  for (int i = 0; i < ops.n; ++i) e.jump += std::abs(mu(i)) * std::abs(std::sin(theta(i)));
  e.jump *= sigma;

  e.total = e.bending + e.well + e.jump;
  e.constraint_residual = (ops.M * rho + ops.K * theta + mu).norm();
  return e;
}

WellSplit split_well_pieces(const OperatorSet& ops, const Vector& theta, double a) {
  if (theta.size() != ops.n) throw std::invalid_argument("split_well_pieces: coefficient length mismatch");
  const Vector gx = ops.Dx * theta;
  const Vector gy = ops.Dy * theta;
  WellSplit split;
  double max_g2 = 0.0;
  for (int f = 0; f < ops.face_count; ++f) {
    const double g2 = gx(f) * gx(f) + gy(f) * gy(f);
    const double area = ops.A.coeff(f, f);
    split.convex += a * area * g2;
    split.concave -= area * ((a + 2.0) * g2 - g2 * g2);
    max_g2 = std::max(max_g2, g2);
  }
  const double bound = (a + 2.0) / 6.0;
  split.gradient_bound_ok = std::sqrt(max_g2) < bound;
  return split;
}

double aviles_giga_energy(const OperatorSet& ops, const Vector& theta, const Vector& rho, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("aviles_giga_energy: eps must be positive");
  if (theta.size() != ops.n || rho.size() != ops.n)
    throw std::invalid_argument("aviles_giga_energy: coefficient length mismatch");
  const double bending = rho.dot(ops.M * rho);
  const Vector gx = ops.Dx * theta;
  const Vector gy = ops.Dy * theta;
  double well = 0.0;
  for (int f = 0; f < ops.face_count; ++f) {
    const double g2 = gx(f) * gx(f) + gy(f) * gy(f);
    const double d = 1.0 - g2;
    well += ops.A.coeff(f, f) * d * d;
  }
  return eps * bending + well / eps;
}

}  // namespace stripes
