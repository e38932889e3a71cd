#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fedgl/errors.hpp"
#include "fedgl/matrix.hpp"
#include "fedgl/rng.hpp"
#include "test_support.hpp"

using namespace fedgl;

TEST_CASE("dense multiply matches hand results") {
  DenseMatrix a(2, 3, {1, 2, 3, 4, 5, 6});
  DenseMatrix b(3, 2, {7, 8, 9, 10, 11, 12});
  const DenseMatrix c = DenseMatrix::multiply(a, b);
  CHECK(c.at(0, 0) == 58);
  CHECK(c.at(0, 1) == 64);
  CHECK(c.at(1, 0) == 139);
  CHECK(c.at(1, 1) == 154);
  CHECK_THROWS_AS(DenseMatrix::multiply(a, a), ValidationError);
}

TEST_CASE("transpose-side multiplies agree with explicit transposes") {
  Rng rng(7);
  const DenseMatrix a = test::random_dense(4, 3, rng);
  const DenseMatrix b = test::random_dense(4, 5, rng);
  const DenseMatrix atb = DenseMatrix::multiply_at_b(a, b);
  DenseMatrix at(3, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j) at.at(j, i) = a.at(i, j);
  const DenseMatrix expected = DenseMatrix::multiply(at, b);
  for (std::size_t i = 0; i < atb.rows(); ++i)
    for (std::size_t j = 0; j < atb.cols(); ++j)
      CHECK(atb.at(i, j) == doctest::Approx(expected.at(i, j)).epsilon(1e-12));

  const DenseMatrix c = test::random_dense(5, 3, rng);
  const DenseMatrix abt = DenseMatrix::multiply_a_bt(a, c);
  CHECK(abt.rows() == 4);
  CHECK(abt.cols() == 5);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += a.at(i, k) * c.at(j, k);
      CHECK(abt.at(i, j) == doctest::Approx(s).epsilon(1e-12));
    }
  }
}

TEST_CASE("csr from triplets sorts, collapses duplicates, validates range") {
  std::vector<SparseMatrix::Triplet> t{{1, 2, 5.0}, {0, 1, 1.0}, {1, 0, 2.0}, {1, 2, 7.0}};
  const SparseMatrix last = SparseMatrix::from_triplets(2, 3, t);
  CHECK(last.nnz() == 3);
  CHECK(last.at(1, 2) == 7.0);
  const SparseMatrix sum = SparseMatrix::from_triplets(2, 3, t, SparseMatrix::Combine::kSum);
  CHECK(sum.at(1, 2) == 12.0);
  CHECK(sum.at(0, 0) == 0.0);
  CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 3, {{2, 0, 1.0}}), ValidationError);
}

TEST_CASE("csr round trips through dense") {
  Rng rng(11);
  DenseMatrix d(6, 5);
  for (double& v : d.data()) v = rng.uniform() < 0.4 ? rng.uniform(-2, 2) : 0.0;
  const SparseMatrix s = SparseMatrix::from_dense(d);
  CHECK(s.to_dense() == d);
  CHECK(s.transpose().transpose() == s);
}

TEST_CASE("sparse-dense products match dense evaluation") {
  Rng rng(3);
  DenseMatrix ad(5, 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      if (rng.uniform() < 0.5) ad.at(i, j) = rng.uniform(-1, 1);
  const SparseMatrix a = SparseMatrix::from_dense(ad);
  const DenseMatrix x = test::random_dense(5, 3, rng);

  const DenseMatrix ax = a.multiply_dense(x);
  const DenseMatrix expected = DenseMatrix::multiply(ad, x);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(ax.at(i, j) == doctest::Approx(expected.at(i, j)).epsilon(1e-12));

  DenseMatrix atx(5, 3);
  a.add_transpose_multiply(x, atx, 1.0);
  const DenseMatrix expected_t = DenseMatrix::multiply(a.transpose().to_dense(), x);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(atx.at(i, j) == doctest::Approx(expected_t.at(i, j)).epsilon(1e-12));
}

TEST_CASE("submatrix keeps only the selected block") {
  //  0-1-2 chain plus 0-3
  const SparseMatrix a = SparseMatrix::from_triplets(
      4, 4, {{0, 1, 1.0}, {1, 0, 1.0}, {1, 2, 1.0}, {2, 1, 1.0}, {0, 3, 1.0}, {3, 0, 1.0}});
  const SparseMatrix sub = a.submatrix({0, 2});
  CHECK(sub.rows() == 2);
  CHECK(sub.nnz() == 0);  // 0 and 2 are not adjacent
  const SparseMatrix sub2 = a.submatrix({0, 1, 3});
  CHECK(sub2.at(0, 1) == 1.0);
  CHECK(sub2.at(0, 2) == 1.0);
  CHECK(sub2.at(1, 2) == 0.0);
  CHECK_THROWS_AS(a.submatrix({0, 0}), ValidationError);
  CHECK_THROWS_AS(a.submatrix({9}), ValidationError);
}

TEST_CASE("rng streams are reproducible and derivation decorrelates") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c = Rng::derive(42, 1);
  Rng d = Rng::derive(42, 2);
  CHECK(c.next_u64() != d.next_u64());
  // tag defaults make derive(s, t) == derive(s, t, 0, 0)
  Rng e = Rng::derive(42, 1);
  Rng f = Rng::derive(42, 1, 0, 0);
  CHECK(e.next_u64() == f.next_u64());
}

TEST_CASE("sampling without replacement is uniform-ish and exact-length") {
  Rng rng(5);
  auto s = rng.sample_without_replacement(10, 4);
  CHECK(s.size() == 4);
  std::sort(s.begin(), s.end());
  CHECK(std::unique(s.begin(), s.end()) == s.end());
  auto all = rng.sample_without_replacement(6, 6);
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < 6; ++i) CHECK(all[i] == i);
}
