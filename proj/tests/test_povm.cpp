#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "memberscope/errors.hpp"
#include "memberscope/povm.hpp"
#include "test_support.hpp"

using namespace memberscope;
namespace ts = testsupport;

namespace {

// Every projector of `basis` equals exactly one reference matrix.
void expect_same_projector_set(const ProjectiveBasis& basis, const std::vector<ComplexMatrix>& expected) {
  std::vector<bool> used(expected.size(), false);
  for (const HermitianOperator& p : basis.projectors) {
    int hits = 0;
    for (std::size_t k = 0; k < expected.size(); ++k) {
      if (frobenius_distance(p.matrix(), expected[k]) < 1e-12) {
        EXPECT_FALSE(used[k]);
        used[k] = true;
        ++hits;
      }
    }
    EXPECT_EQ(hits, 1);
  }
}

Povm table1() { return assemble_povm(std::span(table1_settings())); }
Povm table2() { return assemble_povm(std::span(table2_settings())); }

}  // namespace

TEST(WavePlate, UnitaryForAllSettings) {
  for (double mu = -1.0; mu <= 1.0; mu += 0.17) {
    for (double nu : {0.0, std::numbers::pi / 2, std::numbers::pi, 0.7}) {
      const Eigen::Matrix2cd w = waveplate_matrix({mu, nu});
      EXPECT_LT((w * w.adjoint() - Eigen::Matrix2cd::Identity()).norm(), 1e-14);
    }
  }
}

TEST(WavePlate, HalfWaveAtZeroIsPhaseFlip) {
  const Eigen::Matrix2cd w = waveplate_matrix({0.0, std::numbers::pi});
  EXPECT_NEAR(std::abs(w(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(w(1, 1) + 1.0), 0.0, 1e-15);
}

TEST(RotatedBasis, ComputationalBasisAtZeroAngles) {
  expect_same_projector_set(rotated_basis(table1_settings()[0]), ts::reference_basis(1));
  const ProjectiveBasis b = rotated_basis(table1_settings()[0]);
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(b.projectors[j].matrix()(j, j).real(), 1.0, 1e-15);
}

// The half-wave/quarter-wave order used here makes the second angle column
// produce the third reference projector set and vice versa; the union, and so
// every span and kernel statement, is unchanged.
TEST(RotatedBasis, AngleColumnsProduceReferenceSetsSwapped) {
  expect_same_projector_set(rotated_basis(table1_settings()[1]), ts::reference_basis(3));
  expect_same_projector_set(rotated_basis(table1_settings()[2]), ts::reference_basis(2));
}

TEST(RotatedBasis, OrthogonalRankOneResolution) {
  for (const BasisSetting& s : table2_settings()) {
    const ProjectiveBasis b = rotated_basis(s);
    ComplexMatrix sum = ComplexMatrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i) {
      sum += b.projectors[i].matrix();
      for (int j = 0; j < 4; ++j) {
        EXPECT_NEAR(hs_inner(b.projectors[i], b.projectors[j]), i == j ? 1.0 : 0.0, 1e-13);
      }
    }
    EXPECT_LT(frobenius_distance(sum, ComplexMatrix::Identity(4, 4)), 1e-13);
  }
}

TEST(Povm, SpanAndKernelDimensions) {
  const Povm t1 = table1();
  EXPECT_EQ(t1.size(), 12u);
  EXPECT_EQ(t1.span_dimension(), 10);
  EXPECT_EQ(t1.perturbation_kernel().size(), 6u);
  EXPECT_FALSE(t1.informationally_complete());
  const Povm t2 = table2();
  EXPECT_EQ(t2.size(), 36u);
  EXPECT_EQ(t2.span_dimension(), 13);
  EXPECT_EQ(t2.perturbation_kernel().size(), 3u);
}

TEST(Povm, KernelSpanEqualsReferencePerturbations) {
  const std::vector<HermitianOperator> kernel = table1().perturbation_kernel();
  std::vector<ComplexMatrix> kernel_m;
  for (const auto& k : kernel) kernel_m.push_back(k.matrix());
  const std::vector<ComplexMatrix> expected = ts::reference_perturbations();
  for (const ComplexMatrix& m : expected) EXPECT_LE(ts::projection_residual(m, kernel_m), 1e-9);
  for (const ComplexMatrix& k : kernel_m) EXPECT_LE(ts::projection_residual(k, expected), 1e-9);
}

TEST(Povm, ValidatesCompletenessAndPositivity) {
  std::vector<HermitianOperator> half = {HermitianOperator::identity(2) * 0.5};
  EXPECT_THROW(Povm{half}, InvalidArgument);
  ComplexMatrix neg = ComplexMatrix::Identity(2, 2);
  neg(1, 1) = -1.0;
  ComplexMatrix pos = ComplexMatrix::Zero(2, 2);
  pos(1, 1) = 2.0;
  EXPECT_THROW((Povm{{HermitianOperator(neg), HermitianOperator(pos)}}), NotPositive);
  EXPECT_THROW(assemble_povm(std::span<const BasisSetting>{}), InvalidArgument);
}

TEST(Born, ProbabilitiesSumToOneAndMatchTrace) {
  const Povm t2 = table2();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DensityMatrix rho = random_density(seed, 2);
    const RealVector q = born_probabilities(t2, rho);
    EXPECT_NEAR(q.sum(), 1.0, 1e-12);
    EXPECT_GE(q.minCoeff(), 0.0);
    EXPECT_NEAR(q(5), (t2[5].matrix() * rho.matrix()).trace().real(), 1e-14);
  }
}

TEST(Record, CombinedProbabilitiesWeightedPerBasis) {
  MeasurementRecord r;
  r.blocks.push_back(block_from_counts(table1_settings()[0], {1, 1, 1, 1}));
  r.blocks.push_back(block_from_probabilities(table1_settings()[1], {0.5, 0.5, 0, 0}));
  const RealVector c = r.combined_probabilities();
  ASSERT_EQ(c.size(), 8);
  EXPECT_DOUBLE_EQ(c(0), 0.125);
  EXPECT_DOUBLE_EQ(c(4), 0.25);
  EXPECT_NEAR(c.sum(), 1.0, 1e-15);
  EXPECT_EQ(r.settings().size(), 2u);
}

TEST(Record, BlockValidation) {
  EXPECT_THROW(block_from_counts({}, {0, 0, 0, 0}), MalformedRecord);
  EXPECT_THROW(block_from_probabilities({}, {0.5, 0.5, 0.5, 0}), MalformedRecord);
  EXPECT_THROW(block_from_probabilities({}, {1.5, -0.5, 0, 0}), MalformedRecord);
  EXPECT_THROW(MeasurementRecord{}.combined_probabilities(), MalformedRecord);
}

TEST(Simulate, ExactAndSampled) {
  const DensityMatrix w = werner_state(1.0);
  const auto exact = simulate_counts(w, std::span(table1_settings()), 0, 1);
  ASSERT_EQ(exact.blocks.size(), 3u);
  EXPECT_FALSE(exact.blocks[0].counts.has_value());
  EXPECT_NEAR(exact.blocks[0].probabilities[1], 0.5, 1e-14);
  EXPECT_NEAR(exact.blocks[0].probabilities[0], 0.0, 1e-14);

  const auto a = simulate_counts(werner_state(0.8), std::span(table1_settings()), 10000, 7);
  const auto b = simulate_counts(werner_state(0.8), std::span(table1_settings()), 10000, 7);
  ASSERT_TRUE(a.blocks[1].counts.has_value());
  EXPECT_EQ(*a.blocks[1].counts, *b.blocks[1].counts);
  std::uint64_t total = 0;
  for (auto n : *a.blocks[1].counts) total += n;
  EXPECT_EQ(total, 10000u);
  const RealVector q = born_probabilities(assemble_povm(std::span(table1_settings())), werner_state(0.8));
  EXPECT_NEAR(a.combined_probabilities()(5), q(5), 0.01);
}
