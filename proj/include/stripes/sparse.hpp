#ifndef STRIPES_SPARSE_HPP
#define STRIPES_SPARSE_HPP

// Sparse kernels for the inner loop: matrix-vector product plus the two
// fixed-sweep iterative solvers (conjugate gradient, forward Gauss-Seidel).

#include "stripes/types.hpp"

#include <iosfwd>

namespace stripes {

// Compress and drop stored entries below the magnitude threshold.
void finalize_csr(SparseMatrix& A, double prune_tol = 1e-14);

Vector matvec(const SparseMatrix& A, const Vector& x);

// Runs exactly `sweeps` CG steps from x0 on a symmetric positive
// (semi-)definite system. Stops early only when the residual norm drops
// below 1e-13 or a search direction has curvature <= 1e-16.
Vector conjugate_gradient(const SparseMatrix& A, const Vector& rhs, const Vector& x0, int sweeps);

// `sweeps` forward Gauss-Seidel sweeps in ascending row order.
Vector gauss_seidel(const SparseMatrix& A, const Vector& rhs, const Vector& x0, int sweeps);

// Coordinate-format text dump for debugging.
void dump_coordinate(const SparseMatrix& A, std::ostream& out);

}  // namespace stripes

#endif
