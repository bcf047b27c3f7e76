#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stripes/sparse.hpp"
#include "test_helpers.hpp"

#include <Eigen/Dense>

#include <random>
#include <sstream>

using namespace stripes;
using test::from_dense;
using test::random_dominant;
using test::random_vector;

TEST_CASE("matvec: identity, zero, and the dense oracle") {
  std::mt19937 rng(11);
  const Vector x = random_vector(4, rng);
  CHECK((matvec(from_dense(Eigen::MatrixXd::Identity(4, 4)), x) - x).norm() == 0.0);
  CHECK(matvec(from_dense(Eigen::MatrixXd::Zero(4, 4)), x).norm() == 0.0);

  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd a(5, 5);
    for (int i = 0; i < 5; ++i) a.row(i) = random_vector(5, rng).transpose();
    const Vector v = random_vector(5, rng);
    CHECK((matvec(from_dense(a), v) - a * v).cwiseAbs().maxCoeff() < 1e-14);
  }

  CHECK_THROWS_AS(matvec(from_dense(Eigen::MatrixXd::Zero(3, 3)), random_vector(4, rng)),
                  std::invalid_argument);
}

TEST_CASE("conjugate gradient solves the frozen 2x2 system in two steps") {
  Eigen::MatrixXd a(2, 2);
  a << 4, 1, 1, 3;
  Vector rhs(2);
  rhs << 1, 2;
  const Vector x = conjugate_gradient(from_dense(a), rhs, Vector::Zero(2), 2);
  CHECK(x(0) == doctest::Approx(1.0 / 11.0).epsilon(1e-12));
  CHECK(x(1) == doctest::Approx(7.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("conjugate gradient: identity solves in one step, exact start returns unchanged") {
  std::mt19937 rng(3);
  const Vector rhs = random_vector(6, rng);
  const SparseMatrix eye = from_dense(Eigen::MatrixXd::Identity(6, 6));
  CHECK((conjugate_gradient(eye, rhs, Vector::Zero(6), 1) - rhs).norm() < 1e-14);

  // starting at the exact solution hits the residual short-circuit
  const Vector out = conjugate_gradient(eye, rhs, rhs, 5);
  CHECK((out - rhs).norm() == 0.0);
}

TEST_CASE("conjugate gradient error decreases monotonically in the A-norm") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd r = random_dominant(8, rng);
    const Eigen::MatrixXd a = r.transpose() * r;  // SPD
    const SparseMatrix as = from_dense(a);
    const Vector rhs = random_vector(8, rng);
    const Vector solution = a.ldlt().solve(rhs);
    double prev = 1e300;
    for (int sweeps = 1; sweeps <= 8; ++sweeps) {
      const Vector x = conjugate_gradient(as, rhs, Vector::Zero(8), sweeps);
      const Vector e = x - solution;
      const double err = std::sqrt(e.dot(a * e));
      CHECK(err <= prev + 1e-9);
      prev = err;
    }
    CHECK(prev < 1e-7);  // CG is exact after n steps
  }
}

TEST_CASE("conjugate gradient input validation") {
  Eigen::MatrixXd ns(3, 3);
  ns << 1, 2, 0, 0, 1, 0, 0, 0, 1;  // not symmetric
  CHECK_THROWS_AS(conjugate_gradient(from_dense(ns), Vector::Zero(3), Vector::Zero(3), 2),
                  std::invalid_argument);
  Vector bad = Vector::Zero(3);
  bad(1) = std::numeric_limits<double>::quiet_NaN();
  const SparseMatrix eye = from_dense(Eigen::MatrixXd::Identity(3, 3));
  CHECK_THROWS_AS(conjugate_gradient(eye, bad, Vector::Zero(3), 2), std::invalid_argument);
  CHECK_THROWS_AS(conjugate_gradient(eye, Vector::Zero(3), Vector::Zero(4), 2), std::invalid_argument);
}

TEST_CASE("gauss-seidel: diagonal system solves in one sweep, zero sweeps is identity") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(4, 4);
  d.diagonal() << 2, 4, 5, 8;
  Vector rhs(4);
  rhs << 2, 8, 15, 32;
  const Vector x = gauss_seidel(from_dense(d), rhs, Vector::Zero(4), 1);
  CHECK((x - Vector(rhs.array() / d.diagonal().array())).norm() < 1e-15);

  std::mt19937 rng(23);
  const Vector x0 = random_vector(4, rng);
  CHECK((gauss_seidel(from_dense(d), rhs, x0, 0) - x0).norm() == 0.0);
}

TEST_CASE("gauss-seidel converges to the dense solution on dominant systems") {
  std::mt19937 rng(29);
  const Eigen::MatrixXd a = random_dominant(6, rng);
  const Vector rhs = random_vector(6, rng);
  const Vector expected = a.partialPivLu().solve(rhs);
  const Vector x = gauss_seidel(from_dense(a), rhs, Vector::Zero(6), 50);
  CHECK((x - expected).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("gauss-seidel residual strictly decreases on dominant systems") {
  std::mt19937 rng(31);
  const Eigen::MatrixXd a = random_dominant(10, rng);
  const SparseMatrix as = from_dense(a);
  const Vector rhs = random_vector(10, rng);
  Vector x = random_vector(10, rng);
  double prev = (rhs - a * x).norm();
  for (int sweep = 0; sweep < 10; ++sweep) {
    x = gauss_seidel(as, rhs, x, 1);
    const double res = (rhs - a * x).norm();
    CHECK(res < prev);
    prev = res;
  }
}

TEST_CASE("gauss-seidel reports the zero-diagonal row") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
  a(1, 1) = 0.0;
  try {
    gauss_seidel(from_dense(a), Vector::Ones(3), Vector::Zero(3), 1);
    CHECK(false);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
}

TEST_CASE("gauss-seidel is the forward sweep in ascending row order") {
  // hand-rolled single forward sweep as the oracle
  std::mt19937 rng(37);
  const Eigen::MatrixXd a = random_dominant(5, rng);
  const Vector rhs = random_vector(5, rng);
  const Vector x = random_vector(5, rng);
  Vector expected = x;
  for (int i = 0; i < 5; ++i) {
    double acc = rhs(i);
    for (int j = 0; j < 5; ++j)
      if (j != i) acc -= a(i, j) * expected(j);
    expected(i) = acc / a(i, i);
  }
  CHECK((gauss_seidel(from_dense(a), rhs, x, 1) - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("finalize_csr prunes tiny stored entries") {
  std::vector<Triplet> t{{0, 0, 1.0}, {0, 1, 1e-16}, {1, 1, 2.0}};
  SparseMatrix a(2, 2);
  a.setFromTriplets(t.begin(), t.end());
  finalize_csr(a);
  CHECK(a.nonZeros() == 2);
  CHECK(a.coeff(0, 1) == 0.0);
}

TEST_CASE("coordinate dump lists every stored entry") {
  std::vector<Triplet> t{{0, 1, 0.5}, {1, 0, -2.0}};
  SparseMatrix a(2, 2);
  a.setFromTriplets(t.begin(), t.end());
  std::ostringstream out;
  dump_coordinate(a, out);
  CHECK(out.str() == "2 2 2\n0 1 0.5\n1 0 -2\n");
}
