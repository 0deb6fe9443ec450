#include <random>

#include <gtest/gtest.h>

#include "memberscope/errors.hpp"
#include "memberscope/linalg.hpp"
#include "test_support.hpp"

using namespace memberscope;
using testsupport::random_hermitian;

TEST(HermitianOperator, RejectsNonHermitian) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(HermitianOperator{m}, NotHermitian);
}

TEST(HermitianOperator, RejectsNonSquare) {
  EXPECT_THROW(HermitianOperator{ComplexMatrix::Zero(2, 3)}, DimensionMismatch);
}

TEST(HermitianOperator, SymmetrisesWithinTolerance) {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  m(0, 1) = Complex(0.5, 1e-14);
  m(1, 0) = Complex(0.5, 0.0);
  const HermitianOperator h(m);
  EXPECT_EQ(h.matrix()(0, 1), std::conj(h.matrix()(1, 0)));
  EXPECT_EQ(h.matrix()(0, 0).imag(), 0.0);
}

TEST(HermitianOperator, ArithmeticAndIdentity) {
  const HermitianOperator id = HermitianOperator::identity(3);
  EXPECT_DOUBLE_EQ(id.trace(), 3.0);
  EXPECT_DOUBLE_EQ((id * 2.0 - id).trace(), 3.0);
  EXPECT_THROW(id + HermitianOperator::identity(2), DimensionMismatch);
}

TEST(TensorProduct, KroneckerLayout) {
  Eigen::Matrix2cd a;
  a << 1, 2, 3, 4;
  Eigen::Matrix2cd b;
  b << 0, 1, 1, 0;
  const ComplexMatrix k = tensor_product(a, b);
  ASSERT_EQ(k.rows(), 4);
  EXPECT_EQ(k(0, 1), Complex(1));
  EXPECT_EQ(k(1, 2), Complex(2));
  EXPECT_EQ(k(2, 1), Complex(3));
  EXPECT_EQ(k(3, 2), Complex(4));
  EXPECT_EQ(k(0, 0), Complex(0));
}

TEST(Eigen, ReconstructsAndSortsAscending) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const HermitianOperator h(random_hermitian(rng, 4));
    const HermitianEigen e = eigen_hermitian(h);
    for (Eigen::Index i = 1; i < e.values.size(); ++i) EXPECT_LE(e.values(i - 1), e.values(i));
    const ComplexMatrix back = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    EXPECT_LT(frobenius_distance(back, h.matrix()), 1e-12);
    EXPECT_DOUBLE_EQ(min_eigenvalue(h), e.values(0));
  }
}

TEST(SqrtPsd, SquaresBackAndClampsNoise) {
  std::mt19937_64 rng(11);
  const ComplexMatrix g = random_hermitian(rng, 4);
  const HermitianOperator a(g * g);
  const HermitianOperator s = sqrt_psd(a);
  EXPECT_LT(frobenius_distance(s.matrix() * s.matrix(), a.matrix()), 1e-10);
  EXPECT_GE(min_eigenvalue(s), -1e-12);

  ComplexMatrix noisy = ComplexMatrix::Zero(2, 2);
  noisy(0, 0) = 1.0;
  noisy(1, 1) = -5e-11;
  EXPECT_NO_THROW(sqrt_psd(HermitianOperator(noisy)));
  noisy(1, 1) = -1e-6;
  EXPECT_THROW(sqrt_psd(HermitianOperator(noisy)), NotPositive);
}

TEST(Vectorize, IsometryAndRoundTrip) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const HermitianOperator a(random_hermitian(rng, 4));
    const HermitianOperator b(random_hermitian(rng, 4));
    const RealVector va = vectorize(a);
    ASSERT_EQ(va.size(), 16);
    EXPECT_NEAR(va.dot(vectorize(b)), hs_inner(a, b), 1e-12);
    EXPECT_LT(frobenius_distance(devectorize(va, 4).matrix(), a.matrix()), 1e-13);
  }
  EXPECT_THROW(devectorize(RealVector::Zero(5), 2), DimensionMismatch);
}

TEST(Span, CountsIndependentOperators) {
  std::vector<HermitianOperator> ops;
  ComplexVector e0 = ComplexVector::Zero(2);
  e0(0) = 1;
  ComplexVector e1 = ComplexVector::Zero(2);
  e1(1) = 1;
  ops.push_back(HermitianOperator::projector(e0));
  ops.push_back(HermitianOperator::projector(e1));
  ops.push_back(HermitianOperator::identity(2));
  EXPECT_EQ(span_dimension(ops), 2);
  EXPECT_THROW(span_dimension(std::vector<HermitianOperator>{}), InvalidArgument);
}

TEST(Kernel, OrthonormalTracelessAndOrthogonal) {
  std::mt19937_64 rng(5);
  std::vector<HermitianOperator> ops;
  for (int k = 0; k < 6; ++k) ops.emplace_back(random_hermitian(rng, 4));
  const auto kernel = perturbation_kernel(ops);
  // 16 − 6 random operators − identity constraint.
  ASSERT_EQ(kernel.size(), 9u);
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    EXPECT_NEAR(kernel[i].trace(), 0.0, 1e-12);
    for (const auto& op : ops) EXPECT_NEAR(hs_inner(kernel[i], op), 0.0, 1e-10);
    for (std::size_t j = 0; j < kernel.size(); ++j) {
      EXPECT_NEAR(hs_inner(kernel[i], kernel[j]), i == j ? 1.0 : 0.0, 1e-12);
    }
  }
}
