#ifndef STRIPES_TYPES_HPP
#define STRIPES_TYPES_HPP

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace stripes {

using Vector = Eigen::VectorXd;
using Vector2 = Eigen::Vector2d;
// Compressed row storage throughout; outer = rows.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

}  // namespace stripes

#endif
