#ifndef STRIPES_FEM_HPP
#define STRIPES_FEM_HPP

// Piecewise-linear finite element operators over a triangulation, with the
// Dirichlet boundary rows/columns eliminated (all vectors have length
// n = number of interior vertices).

#include "stripes/mesh.hpp"
#include "stripes/types.hpp"

#include <vector>

namespace stripes {

struct OperatorSet {
  SparseMatrix Dx, Dy;  // |F| x n gradient component matrices
  SparseMatrix A;       // |F| x |F| diagonal face-area matrix
  SparseMatrix M;       // n x n mass matrix
  SparseMatrix K;       // n x n stiffness matrix, K = Dx' A Dx + Dy' A Dy
  int n = 0;
  int face_count = 0;
};

// Exact integrals of hat-function products over one face.
Eigen::Matrix3d local_mass_matrix(double area);
Eigen::Matrix3d local_stiffness_matrix(const Vector2& p0, const Vector2& p1, const Vector2& p2);

OperatorSet assemble_operators(const Triangulation& tri);

// Per-face gradient ((Dx theta)_f, (Dy theta)_f) of an interior coefficient vector.
Eigen::MatrixX2d gradient_field(const OperatorSet& ops, const Vector& theta);

// Assembles sum_f w_f * (g_i . g_j) over interior hat pairs for an arbitrary
// per-face weight vector; the state-dependent weighted stiffness uses
// w_f = area_f * |grad theta|_f^2.
class WeightedStiffnessAssembler {
 public:
  explicit WeightedStiffnessAssembler(const OperatorSet& ops);
  SparseMatrix with_face_weights(const Vector& face_weights) const;
  SparseMatrix from_theta(const Vector& theta) const;
  Vector face_weights(const Vector& theta) const;  // B diagonal: area * |grad|^2

 private:
  const OperatorSet& ops_;
  SparseMatrix pattern_;               // fixed sparsity, zero values
  std::vector<int> entry_slot_;        // per (face, pair) -> value slot
  std::vector<int> entry_face_;
  std::vector<double> entry_coeff_;    // g_i . g_j
};

SparseMatrix assemble_weighted_stiffness(const OperatorSet& ops, const Vector& theta);

// Expand an interior coefficient vector to all vertices (zero trace) and back.
Vector lift_full(const Triangulation& tri, const Vector& interior);
Vector restrict_interior(const Triangulation& tri, const Vector& full);

}  // namespace stripes

#endif
