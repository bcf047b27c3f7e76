#include "stripes/sparse.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace stripes {

namespace {

void check_dims(const SparseMatrix& A, const Vector& x, const char* who) {
  if (A.cols() != x.size())
    throw std::invalid_argument(std::string(who) + ": dimension mismatch (" + std::to_string(A.cols()) +
                                " columns vs vector of length " + std::to_string(x.size()) + ")");
}

void check_finite(const Vector& x, const char* who) {
  if (!x.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite values in input");
}

// Spot-check symmetry on a deterministic sample of stored entries.
void audit_symmetric(const SparseMatrix& A, const char* who) {
  if (A.rows() != A.cols()) throw std::invalid_argument(std::string(who) + ": matrix not square");
  const int stride = std::max<int>(1, static_cast<int>(A.nonZeros() / 256));
  int idx = 0;
  for (int r = 0; r < A.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(A, r); it; ++it, ++idx) {
      if (idx % stride != 0) continue;
      if (std::abs(A.coeff(it.col(), r) - it.value()) > 1e-12)
        throw std::invalid_argument(std::string(who) + ": matrix fails the symmetry audit at (" +
                                    std::to_string(r) + "," + std::to_string(it.col()) + ")");
    }
  }
}

}  // namespace

void finalize_csr(SparseMatrix& A, double prune_tol) {
  A.makeCompressed();
  A.prune([prune_tol](int, int, double v) { return std::abs(v) > prune_tol; });
  A.makeCompressed();
}

Vector matvec(const SparseMatrix& A, const Vector& x) {
  check_dims(A, x, "matvec");
  return A * x;
}

Vector conjugate_gradient(const SparseMatrix& A, const Vector& rhs, const Vector& x0, int sweeps) {
  check_dims(A, x0, "conjugate_gradient");
  if (A.rows() != rhs.size()) throw std::invalid_argument("conjugate_gradient: rhs length mismatch");
  check_finite(rhs, "conjugate_gradient");
  check_finite(x0, "conjugate_gradient");
  if (sweeps < 0) throw std::invalid_argument("conjugate_gradient: negative sweep count");
  audit_symmetric(A, "conjugate_gradient");

  Vector x = x0;
  Vector r = rhs - A * x;
  double rs = r.squaredNorm();
  if (std::sqrt(rs) < 1e-13) return x;
  Vector p = r;
  for (int k = 0; k < sweeps; ++k) {
    const Vector Ap = A * p;
    const double curvature = p.dot(Ap);
    if (curvature <= 1e-16) break;  // semi-definite guard
    const double alpha = rs / curvature;
    x += alpha * p;
    r -= alpha * Ap;
    const double rs_new = r.squaredNorm();
    if (std::sqrt(rs_new) < 1e-13) break;
    p = r + (rs_new / rs) * p;
    rs = rs_new;
  }
  return x;
}

Vector gauss_seidel(const SparseMatrix& A, const Vector& rhs, const Vector& x0, int sweeps) {
  check_dims(A, x0, "gauss_seidel");
  if (A.rows() != rhs.size()) throw std::invalid_argument("gauss_seidel: rhs length mismatch");
  check_finite(rhs, "gauss_seidel");
  check_finite(x0, "gauss_seidel");
  if (sweeps < 0) throw std::invalid_argument("gauss_seidel: negative sweep count");

  const int n = static_cast<int>(A.rows());
  std::vector<double> diag(n, 0.0);
  for (int r = 0; r < n; ++r)
    for (SparseMatrix::InnerIterator it(A, r); it; ++it)
      if (it.col() == r) diag[r] = it.value();
  for (int r = 0; r < n; ++r)
    if (diag[r] == 0.0) throw std::invalid_argument("gauss_seidel: zero diagonal entry in row " + std::to_string(r));

  Vector x = x0;
  for (int s = 0; s < sweeps; ++s) {
    for (int r = 0; r < n; ++r) {
      double acc = rhs(r);
      for (SparseMatrix::InnerIterator it(A, r); it; ++it) {
        if (it.col() != r) acc -= it.value() * x(it.col());
      }
      x(r) = acc / diag[r];
    }
  }
  return x;
}

void dump_coordinate(const SparseMatrix& A, std::ostream& out) {
  out << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  out.precision(17);
  for (int r = 0; r < A.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(A, r); it; ++it)
      out << r << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace stripes
