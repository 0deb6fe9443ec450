#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "memberscope/errors.hpp"
#include "memberscope/io.hpp"
#include "memberscope/optimizer.hpp"
#include "test_support.hpp"

using namespace memberscope;
namespace ts = testsupport;

TEST(L1, Distance) {
  RealVector p(3), q(3);
  p << 0.5, 0.25, 0.25;
  q << 0.25, 0.25, 0.5;
  EXPECT_DOUBLE_EQ(l1_distance(p, q), 0.5);
  EXPECT_THROW(l1_distance(p, RealVector::Zero(2)), DimensionMismatch);
}

TEST(Validate, RejectsBadTargets) {
  const Povm povm = io::load_povm("table1");
  RealVector p = RealVector::Constant(12, 1.0 / 12);
  EXPECT_NO_THROW(validate({p, povm, {}}));
  EXPECT_THROW(validate({RealVector::Constant(11, 1.0 / 11), povm, {}}), InvalidArgument);
  p(0) += 0.1;
  EXPECT_THROW(validate({p, povm, {}}), InvalidArgument);
  RealVector neg = RealVector::Constant(12, 1.0 / 10);
  neg(0) = neg(1) = -0.1;
  EXPECT_THROW(validate({neg, povm, {}}), InvalidArgument);
}

TEST(Fit, UnconstrainedRealizableIsExact) {
  const Povm povm = io::load_povm("table2");
  const DensityMatrix rho = random_density(17, 3);
  const FitResult r = constrained_l1_fit({born_probabilities(povm, rho), povm, {}});
  EXPECT_EQ(r.status, FitStatus::Converged);
  EXPECT_LE(r.residual, 1e-7);
}

TEST(Fit, AnalyticAnchor) {
  // Ψ⁻ statistics on the three-basis POVM forced to overlap(Ψ⁺) ≥ 0.81: the
  // best achievable ℓ1 distance is 2·(0.81 − 0.27) = 1.08.
  const Povm povm = io::load_povm("table1");
  const RealVector p = born_probabilities(povm, named_state("Psi-").density());
  const FitResult r = constrained_l1_fit(
      {p, povm, {{named_state("Psi+").projector(), 0.81, ConstraintSense::AtLeast}}});
  EXPECT_EQ(r.status, FitStatus::Converged);
  EXPECT_NEAR(r.residual, 1.08, 1e-8);
}

TEST(Fit, EmptyConstraintSetIsInfeasible) {
  const Povm povm = io::load_povm("table1");
  const RealVector p = born_probabilities(povm, DensityMatrix::maximally_mixed(4));
  const FitResult r = constrained_l1_fit(
      {p, povm,
       {{named_state("Psi-").projector(), 0.7, ConstraintSense::AtLeast},
        {named_state("Psi+").projector(), 0.7, ConstraintSense::AtLeast}}});
  EXPECT_EQ(r.status, FitStatus::Infeasible);
  EXPECT_EQ(r.residual, std::numeric_limits<double>::infinity());
}

TEST(Fit, ZeroResidualSoundnessOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const ts::RandomInstance inst = ts::random_fit_instance(seed, true);
    const FitResult r = constrained_l1_fit(inst.problem);
    ASSERT_EQ(r.status, FitStatus::Converged) << "seed " << seed;
    EXPECT_LE(r.residual, 1e-7) << "seed " << seed;
  }
}

TEST(Fit, FeasibilityCertificateOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const ts::RandomInstance inst = ts::random_fit_instance(10'000 + seed, seed % 2 == 0);
    const FitResult r = constrained_l1_fit(inst.problem);
    if (r.status == FitStatus::Infeasible) continue;
    ASSERT_EQ(r.status, FitStatus::Converged) << "seed " << seed;
    EXPECT_EQ(ts::certificate_failure(inst.problem, r), "") << "seed " << seed;
    EXPECT_LE(r.gap_bound, 1e-8) << "seed " << seed;
  }
}

TEST(Fit, AgreesWithReferenceCorpus) {
  const std::vector<ts::CorpusCase> corpus = ts::load_optimizer_corpus();
  ASSERT_EQ(corpus.size(), 20u);
  for (const ts::CorpusCase& c : corpus) {
    const FitResult r = constrained_l1_fit(c.problem);
    if (!c.reference) {
      EXPECT_EQ(r.status, FitStatus::Infeasible) << c.name;
      continue;
    }
    ASSERT_EQ(r.status, FitStatus::Converged) << c.name;
    EXPECT_NEAR(r.residual, *c.reference, 1e-6) << c.name;
  }
}
