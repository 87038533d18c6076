#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "twophase/errors.hpp"
#include "twophase/linear_operator.hpp"
#include "twophase/sparse.hpp"

using namespace twophase;

TEST_CASE("identity times x is x") {
  const auto x = fixtures::test_vector(7);
  CHECK(spmv(SparseMatrix::identity(7), x) == x);
}

TEST_CASE("diagonal times ones") {
  const std::vector<double> d{1, 2, 3};
  const auto y = spmv(SparseMatrix::diagonal(d), std::vector<double>{1, 1, 1});
  CHECK(y == std::vector<double>{1, 2, 3});
}

TEST_CASE("spmv matches a dense product") {
  const SparseMatrix a = fixtures::poisson_2d(5);
  const auto x = fixtures::test_vector(a.rows());
  const Eigen::VectorXd ref = to_dense(a) * Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
  const auto y = spmv(a, x);
  for (int i = 0; i < a.rows(); ++i) CHECK(y[i] == doctest::Approx(ref[i]).epsilon(1e-15));
}

TEST_CASE("triplets with duplicates are summed") {
  const std::vector<Triplet> t{{0, 1, 2.0}, {0, 1, 3.0}, {1, 0, -1.0}};
  const SparseMatrix a = SparseMatrix::from_triplets(2, 2, t);
  CHECK(a.nnz() == 2);
  CHECK(a.coeff(0, 1) == 5.0);
  CHECK(a.coeff(1, 1) == 0.0);
  CHECK(a.find(1, 1) == -1);
}

TEST_CASE("malformed CSR input is rejected") {
  CHECK_THROWS_AS(SparseMatrix(2, 2, {0, 2, 1}, {0, 1}, {1, 1}), ValidationError);
  CHECK_THROWS_AS(SparseMatrix(1, 2, {0, 2}, {1, 0}, {1, 1}), ValidationError);
  CHECK_THROWS_AS(SparseMatrix(1, 2, {0, 1}, {2}, {1}), ValidationError);
  CHECK_THROWS_AS(SparseMatrix(1, 2, {0, 2}, {1, 1}, {1, 1}), ValidationError);
}

TEST_CASE("multiply, add, transpose and scaling agree with dense algebra") {
  const SparseMatrix a = fixtures::poisson_2d(4);
  std::vector<Triplet> t;
  for (int i = 0; i < 16; ++i) t.push_back({i, (3 * i + 1) % 16, 0.5 + i});
  const SparseMatrix b = SparseMatrix::from_triplets(16, 16, t);
  const Eigen::MatrixXd da = to_dense(a), db = to_dense(b);
  CHECK(fixtures::max_abs(to_dense(multiply(a, b)) - da * db) < 1e-13);
  CHECK(fixtures::max_abs(to_dense(add(a, b, 2.0, -3.0)) - (2.0 * da - 3.0 * db)) < 1e-13);
  CHECK(fixtures::max_abs(to_dense(transpose(b)) - db.transpose()) == 0.0);
  std::vector<double> d(16);
  for (int i = 0; i < 16; ++i) d[i] = i - 7.5;
  const Eigen::VectorXd dv = Eigen::Map<Eigen::VectorXd>(d.data(), 16);
  CHECK(fixtures::max_abs(to_dense(scale_columns(b, d)) - db * dv.asDiagonal()) == 0.0);
}

TEST_CASE("symmetric permutation round trip") {
  const SparseMatrix a = fixtures::poisson_2d(3);
  std::vector<int> perm{4, 0, 8, 2, 6, 1, 3, 5, 7}, inv(9);
  for (int i = 0; i < 9; ++i) inv[perm[i]] = i;
  const SparseMatrix b = permute_symmetric(a, perm);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) CHECK(b.coeff(perm[i], perm[j]) == a.coeff(i, j));
  CHECK(permute_symmetric(b, inv) == a);
}

TEST_CASE("submatrix and drop_small") {
  const SparseMatrix a = fixtures::poisson_1d(6);
  const std::vector<int> rows{1, 2}, cols{0, 1, 2};
  const SparseMatrix s = submatrix(a, rows, cols);
  CHECK(s.rows() == 2);
  CHECK(s.cols() == 3);
  CHECK(s.coeff(0, 0) == -1.0);
  CHECK(s.coeff(1, 2) == 2.0);
  const SparseMatrix d = drop_small(a, 1.5);
  CHECK(d.nnz() == 6);
}

TEST_CASE("norms") {
  const SparseMatrix a = fixtures::poisson_1d(4);
  CHECK(norm_inf(a) == 4.0);
  CHECK(norm_frobenius(a) == doctest::Approx(std::sqrt(4 * 4.0 + 6 * 1.0)));
}

TEST_CASE("MatrixMarket round trip is exact") {
  std::vector<Triplet> t{{0, 0, 1.0 / 3.0}, {2, 1, -2.5e-17}, {1, 2, 6.02214076e23}};
  const SparseMatrix a = SparseMatrix::from_triplets(3, 3, t);
  std::stringstream ss;
  write_matrix_market(a, ss);
  CHECK(read_matrix_market(ss) == a);
}

TEST_CASE("dimension mismatch in multiply") {
  const SparseMatrix a = fixtures::poisson_1d(3);
  std::vector<double> x(4), y(3);
  CHECK_THROWS_AS(a.multiply(x, y), DimensionError);
  CHECK_THROWS_AS(multiply(a, fixtures::poisson_1d(4)), DimensionError);
}
