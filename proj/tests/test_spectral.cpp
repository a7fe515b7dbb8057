#include "test_support.hpp"

#include "wernerlab/ensembles.hpp"
#include "wernerlab/spectral.hpp"

using namespace wltest;

TEST(Schatten, IdentityNorms) {
  for (int d = 1; d <= 5; ++d)
    for (double p : {1.0, 1.5, 2.0, 3.0, 7.0}) {
      EXPECT_TRUE(RelNear(schatten_norm(MultipartiteMatrix::identity({d}), p), std::pow(d, 1.0 / p), 1e-14));
    }
  EXPECT_TRUE(RelNear(schatten_norm(MultipartiteMatrix::identity({4}), kOperatorNorm), 1.0, 1e-14));
}

TEST(Schatten, OperatorNormIsLargestSingularValue) {
  const Matrix m = random_square(5, 3);
  Eigen::JacobiSVD<Matrix> svd(m);
  EXPECT_TRUE(RelNear(schatten_norm(m, kOperatorNorm), svd.singularValues()(0), 1e-14));
  EXPECT_TRUE(RelNear(operator_norm(m), svd.singularValues()(0), 1e-14));
}

TEST(Schatten, TwoNormIsFrobenius) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix m = random_square(3, 100 + s);
    double oracle = 0.0;
    for (Eigen::Index i = 0; i < 3; ++i)
      for (Eigen::Index j = 0; j < 3; ++j) oracle += std::norm(m(i, j));
    EXPECT_TRUE(RelNear(schatten_norm(m, 2.0) * schatten_norm(m, 2.0), oracle, 1e-12));
  }
}

TEST(Schatten, OneNormIsSumOfSingularValuesAndPsdTrace) {
  const Matrix g = random_square(4, 7);
  const Matrix psd = g * g.adjoint();
  EXPECT_TRUE(RelNear(schatten_norm(psd, 1.0), psd.trace().real(), 1e-12));
}

TEST(Schatten, LargeIndexDoesNotOverflow) {
  const Matrix m = 1e200 * Matrix::Identity(3, 3);
  EXPECT_TRUE(RelNear(schatten_norm(m, 50.0) / 1e200, std::pow(3.0, 1.0 / 50.0), 1e-12));
}

TEST(Schatten, RejectsQuasiNorms) {
  const Matrix m = random_square(2, 1);
  EXPECT_THROW(schatten_norm(m, 0.5), std::invalid_argument);
  EXPECT_THROW(schatten_norm(m, std::nan("")), std::invalid_argument);
}

TEST(Schatten, ZeroMatrix) {
  for (double p : {1.0, 2.0, 3.0, kOperatorNorm}) EXPECT_EQ(schatten_norm(Matrix::Zero(3, 3), p), 0.0);
}

TEST(HsInner, Examples) {
  for (int d = 1; d <= 4; ++d) {
    const auto one = MultipartiteMatrix::identity({d});
    EXPECT_EQ(hs_inner(one, one), cplx(d, 0.0));
  }
  Matrix e = Matrix::Zero(2, 2);
  e(0, 1) = 1.0;
  const MultipartiteMatrix e12({2}, e);
  EXPECT_EQ(hs_inner(e12, e12), cplx(1.0, 0.0));
}

TEST(HsInner, ConjugateSymmetricAndNormSquared) {
  const auto a = random_op({2, 2}, 1), b = random_op({2, 2}, 2);
  EXPECT_TRUE(RelNear(std::abs(hs_inner(a, b) - std::conj(hs_inner(b, a))), 0.0, 1e-14));
  const cplx aa = hs_inner(a, a);
  EXPECT_TRUE(RelNear(aa.real(), a.entries().squaredNorm(), 1e-14));
  EXPECT_EQ(aa.imag(), 0.0);
  EXPECT_THROW(hs_inner(a, random_op({4}, 3)), std::invalid_argument);
}

TEST(NumericalRank, Examples) {
  EXPECT_EQ(numerical_rank(Matrix::Zero(4, 4)).numerical_rank, 0);
  const Vector v = random_vec(4, 1), w = random_vec(4, 2);
  EXPECT_EQ(numerical_rank(Matrix(v * w.adjoint())).numerical_rank, 1);
  // Three independent outer products, orthogonalised with QR as the oracle.
  const Matrix g = random_square(6, 3);
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ();
  const Matrix c = q.leftCols(3) * random_square(3, 4) * q.rightCols(3).adjoint();
  const auto prof = numerical_rank(c);
  EXPECT_EQ(prof.numerical_rank, 3);
  Eigen::JacobiSVD<Matrix> svd(c);
  EXPECT_TRUE(MatrixNear(prof.singular_values.cast<cplx>(), svd.singularValues().cast<cplx>(), 1e-12));
}

TEST(NumericalRank, ProfileInvariants) {
  const auto prof = numerical_rank(random_square(5, 9));
  for (Eigen::Index i = 0; i + 1 < prof.singular_values.size(); ++i)
    EXPECT_GE(prof.singular_values(i), prof.singular_values(i + 1));
  EXPECT_GE(prof.singular_values.minCoeff(), 0.0);
  int count = 0;
  for (double s : prof.singular_values)
    if (s > prof.tol_used) ++count;
  EXPECT_EQ(count, prof.numerical_rank);
  // An explicit tolerance is relative to sigma_max.
  Vector d(3);
  d << 1.0, 1e-3, 1e-8;
  const Matrix m = d.asDiagonal();
  EXPECT_EQ(numerical_rank(m).numerical_rank, 3);
  EXPECT_EQ(numerical_rank(m, 1e-5).numerical_rank, 2);
  EXPECT_EQ(numerical_rank(m, 1e-2).numerical_rank, 1);
}

TEST(NormInequalities, OneTwoRankChain) {
  for (const Dims& dims : {Dims{2, 2}, Dims{3, 3}})
    for (int r = 1; r <= 4; ++r)
      for (std::uint64_t s = 0; s < 10; ++s) {
        const auto c = random_matrix(MatrixKind::rank_r, dims, r, Field::complex, 1000 * r + s);
        const double n1 = schatten_norm(c, 1.0), n2 = schatten_norm(c, 2.0);
        EXPECT_LE(n2, n1 + 1e-10);
        EXPECT_LE(n1, std::sqrt(r) * n2 + 1e-10);
        EXPECT_GE(n2 * n2 + 1e-10, std::norm(c.trace()) / r);
      }
}

TEST(Ensembles, KindsAndDeterminism) {
  const Dims dims{2, 3};
  const auto rho = random_matrix(MatrixKind::density, dims, 0, Field::complex, 5);
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
  EXPECT_GE(hermitian_eigenvalues(rho.entries()).minCoeff(), -1e-12);
  const auto h = random_matrix(MatrixKind::hermitian, dims, 0, Field::real, 6);
  EXPECT_TRUE(MatrixNear(h.entries(), h.entries().adjoint(), 0.0));
  EXPECT_EQ(h.entries().imag().norm(), 0.0);
  const auto psd = random_matrix(MatrixKind::psd, dims, 2, Field::complex, 7);
  EXPECT_GE(hermitian_eigenvalues(psd.entries()).minCoeff(), -1e-12);
  EXPECT_EQ(numerical_rank(psd).numerical_rank, 2);
  EXPECT_EQ(numerical_rank(random_matrix(MatrixKind::rank_r, dims, 2, Field::complex, 8)).numerical_rank, 2);
  const auto a = random_matrix(MatrixKind::ginibre, dims, 0, Field::complex, 9);
  const auto b = random_matrix(MatrixKind::ginibre, dims, 0, Field::complex, 9);
  EXPECT_EQ((a.entries() - b.entries()).norm(), 0.0);
  EXPECT_THROW(random_matrix(MatrixKind::rank_r, dims, 7, Field::complex, 1), std::invalid_argument);
  EXPECT_THROW(parse_matrix_kind("wishart"), std::invalid_argument);
  EXPECT_THROW(parse_field("quaternion"), std::invalid_argument);
}

TEST(Ensembles, StructuredRankOnePlusNormal) {
  Rng rng(3);
  const Eigen::Index total = 9;
  const int r = 4;
  const Matrix c = structured_rank1_plus_normal(total, r, Field::complex, rng);
  EXPECT_EQ(numerical_rank(c).numerical_rank, r);
  const Matrix cc = c * c.adjoint() - c.adjoint() * c;
  // Only the rank-one part can break normality; its range is orthogonal to the rest.
  EXPECT_LE(numerical_rank(cc).numerical_rank, 2);
  EXPECT_THROW(structured_rank1_plus_normal(total, 10, Field::complex, rng), std::invalid_argument);
  EXPECT_THROW(structured_rank1_plus_normal(total, 0, Field::complex, rng), std::invalid_argument);
}

TEST(Seeds, DerivedSeedsAreDistinctAndStable) {
  EXPECT_EQ(derive_seed(1, 0), derive_seed(1, 0));
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}
