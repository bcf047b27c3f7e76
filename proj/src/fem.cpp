#include "stripes/fem.hpp"

#include "stripes/sparse.hpp"

#include <map>
#include <stdexcept>

namespace stripes {

Eigen::Matrix3d local_mass_matrix(double area) {
  Eigen::Matrix3d m;
  m << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  return (area / 12.0) * m;
}

Eigen::Matrix3d local_stiffness_matrix(const Vector2& p0, const Vector2& p1, const Vector2& p2) {
  const double twice_area = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p1.y() - p0.y()) * (p2.x() - p0.x());
  const double area = 0.5 * twice_area;
  if (!(area > 0.0)) throw std::runtime_error("local_stiffness_matrix: degenerate face");
  const Vector2 pts[3] = {p0, p1, p2};
  Vector2 g[3];
  for (int k = 0; k < 3; ++k) {
    const Vector2 e = pts[(k + 2) % 3] - pts[(k + 1) % 3];
    g[k] = Vector2(-e.y(), e.x()) / twice_area;
  }
  Eigen::Matrix3d s;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s(i, j) = area * g[i].dot(g[j]);
  return s;
}

OperatorSet assemble_operators(const Triangulation& tri) {
  OperatorSet ops;
  const int nf = tri.face_count();
  const int n = tri.interior_count();
  ops.n = n;
  ops.face_count = nf;

  const auto grads = face_gradient_geometry(tri);

  std::vector<Triplet> tx, ty, tm, tk, ta;
  tx.reserve(3 * nf);
  ty.reserve(3 * nf);
  tm.reserve(9 * nf);
  tk.reserve(9 * nf);
  ta.reserve(nf);

  for (int f = 0; f < nf; ++f) {
    const double area = tri.face_areas(f);
    ta.emplace_back(f, f, area);
    int idx[3];
    for (int k = 0; k < 3; ++k) idx[k] = tri.interior_index(tri.faces(f, k));
    for (int k = 0; k < 3; ++k) {
      if (idx[k] < 0) continue;
      tx.emplace_back(f, idx[k], grads(f, 2 * k));
      ty.emplace_back(f, idx[k], grads(f, 2 * k + 1));
    }
    for (int i = 0; i < 3; ++i) {
      if (idx[i] < 0) continue;
      for (int j = 0; j < 3; ++j) {
        if (idx[j] < 0) continue;
        tm.emplace_back(idx[i], idx[j], (area / 12.0) * (i == j ? 2.0 : 1.0));
        const double kij =
            area * (grads(f, 2 * i) * grads(f, 2 * j) + grads(f, 2 * i + 1) * grads(f, 2 * j + 1));
        tk.emplace_back(idx[i], idx[j], kij);
      }
    }
  }

  ops.Dx.resize(nf, n);
  ops.Dx.setFromTriplets(tx.begin(), tx.end());
  ops.Dy.resize(nf, n);
  ops.Dy.setFromTriplets(ty.begin(), ty.end());
  ops.A.resize(nf, nf);
  ops.A.setFromTriplets(ta.begin(), ta.end());
  ops.M.resize(n, n);
  ops.M.setFromTriplets(tm.begin(), tm.end());
  ops.K.resize(n, n);
  ops.K.setFromTriplets(tk.begin(), tk.end());

  finalize_csr(ops.M);
  finalize_csr(ops.K);
  finalize_csr(ops.A);
  ops.Dx.makeCompressed();
  ops.Dy.makeCompressed();
  return ops;
}

Eigen::MatrixX2d gradient_field(const OperatorSet& ops, const Vector& theta) {
  if (theta.size() != ops.n) throw std::invalid_argument("gradient_field: coefficient length mismatch");
  Eigen::MatrixX2d g(ops.face_count, 2);
  g.col(0) = ops.Dx * theta;
  g.col(1) = ops.Dy * theta;
  return g;
}

WeightedStiffnessAssembler::WeightedStiffnessAssembler(const OperatorSet& ops) : ops_(ops) {
  // Merge the Dx/Dy rows of each face into (vertex -> gradient) entries, then
  // lay out the union of all pair blocks as a fixed CSR pattern.
  const int nf = ops.face_count;
  std::vector<std::vector<std::pair<int, Vector2>>> face_entries(nf);
  for (int f = 0; f < nf; ++f) {
    std::map<int, Vector2> row;
    for (SparseMatrix::InnerIterator it(ops_.Dx, f); it; ++it) {
      auto [pos, _] = row.emplace(static_cast<int>(it.col()), Vector2::Zero());
      pos->second.x() = it.value();
    }
    for (SparseMatrix::InnerIterator it(ops_.Dy, f); it; ++it) {
      auto [pos, _] = row.emplace(static_cast<int>(it.col()), Vector2::Zero());
      pos->second.y() = it.value();
    }
    face_entries[f].assign(row.begin(), row.end());
  }

  std::vector<Triplet> pattern;
  for (int f = 0; f < nf; ++f)
    for (const auto& [i, gi] : face_entries[f])
      for (const auto& [j, gj] : face_entries[f]) pattern.emplace_back(i, j, 0.0);
  pattern_.resize(ops.n, ops.n);
  pattern_.setFromTriplets(pattern.begin(), pattern.end());
  pattern_.makeCompressed();

  auto slot_of = [this](int i, int j) {
    const int begin = pattern_.outerIndexPtr()[i];
    const int end = pattern_.outerIndexPtr()[i + 1];
    for (int s = begin; s < end; ++s)
      if (pattern_.innerIndexPtr()[s] == j) return s;
    throw std::logic_error("weighted stiffness pattern is missing a slot");
  };

  for (int f = 0; f < nf; ++f) {
    for (const auto& [i, gi] : face_entries[f]) {
      for (const auto& [j, gj] : face_entries[f]) {
        entry_slot_.push_back(slot_of(i, j));
        entry_face_.push_back(f);
        entry_coeff_.push_back(gi.dot(gj));
      }
    }
  }
}

Vector WeightedStiffnessAssembler::face_weights(const Vector& theta) const {
  if (theta.size() != ops_.n)
    throw std::invalid_argument("weighted stiffness: coefficient length mismatch");
  const Vector gx = ops_.Dx * theta;
  const Vector gy = ops_.Dy * theta;
  Vector w(ops_.face_count);
  for (int f = 0; f < ops_.face_count; ++f)
    w(f) = ops_.A.coeff(f, f) * (gx(f) * gx(f) + gy(f) * gy(f));
  return w;
}

SparseMatrix WeightedStiffnessAssembler::with_face_weights(const Vector& w) const {
  if (w.size() != ops_.face_count)
    throw std::invalid_argument("weighted stiffness: face weight length mismatch");
  SparseMatrix L = pattern_;
  double* values = L.valuePtr();
  for (std::size_t e = 0; e < entry_slot_.size(); ++e)
    values[entry_slot_[e]] += w(entry_face_[e]) * entry_coeff_[e];
  return L;
}

SparseMatrix WeightedStiffnessAssembler::from_theta(const Vector& theta) const {
  return with_face_weights(face_weights(theta));
}

SparseMatrix assemble_weighted_stiffness(const OperatorSet& ops, const Vector& theta) {
  WeightedStiffnessAssembler assembler(ops);
  SparseMatrix L = assembler.from_theta(theta);
  finalize_csr(L);
  return L;
}

Vector lift_full(const Triangulation& tri, const Vector& interior) {
  if (interior.size() != tri.interior_count())
    throw std::invalid_argument("lift_full: coefficient length mismatch");
  Vector full = Vector::Zero(tri.vertex_count());
  for (int i = 0; i < tri.interior_vertices.size(); ++i) full(tri.interior_vertices(i)) = interior(i);
  return full;
}

Vector restrict_interior(const Triangulation& tri, const Vector& full) {
  if (full.size() != tri.vertex_count())
    throw std::invalid_argument("restrict_interior: field length mismatch");
  Vector interior(tri.interior_count());
  for (int i = 0; i < tri.interior_vertices.size(); ++i) interior(i) = full(tri.interior_vertices(i));
  return interior;
}

}  // namespace stripes
