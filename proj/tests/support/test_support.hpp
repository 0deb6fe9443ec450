#pragma once

// Shared helpers for the unit and acceptance tests: hand-typed matrices from
// the three-basis POVM, random operators, and the optimizer corpus loader.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "memberscope/linalg.hpp"
#include "memberscope/membership.hpp"
#include "memberscope/optimizer.hpp"
#include "memberscope/povm.hpp"

namespace testsupport {

using memberscope::Complex;
using memberscope::ComplexMatrix;

inline std::filesystem::path data_dir() { return MEMBERSCOPE_DATA_DIR; }
inline std::filesystem::path test_data_dir() { return MEMBERSCOPE_TEST_DATA_DIR; }

/// Row-major 4×4 from 16 complex entries.
ComplexMatrix mat4(std::initializer_list<Complex> entries);

/// Hand-typed basis of the three-basis POVM's perturbation space.
std::vector<ComplexMatrix> reference_perturbations();

/// Hand-typed projector sets of the three-basis POVM, k = 1..3 (entries are
/// small integers times 1/4).
std::vector<ComplexMatrix> reference_basis(int k);

/// Residual of projecting `m` onto span(basis) in the HS inner product.
double projection_residual(const ComplexMatrix& m, const std::vector<ComplexMatrix>& basis);

/// Random Hermitian matrix with i.i.d. Gaussian entries.
ComplexMatrix random_hermitian(std::mt19937_64& rng, Eigen::Index dim = 4);

/// One case of the optimizer corpus with its reference residual (nullopt
/// when the reference solver proved the segment empty).
struct CorpusCase {
  std::string name;
  memberscope::FitProblem problem;
  std::optional<double> reference;
};

std::vector<CorpusCase> load_optimizer_corpus();

/// Random fit instance over one of the builtin POVMs with 0–2 Bell-overlap
/// constraints. Realizable instances take their target from `truth` and
/// place every bound at least 0.01 on the satisfied side of it; the others
/// draw a random probability vector and random bounds.
struct RandomInstance {
  memberscope::FitProblem problem;
  std::optional<memberscope::DensityMatrix> truth;
};
RandomInstance random_fit_instance(std::uint64_t seed, bool realizable);

/// Certificate checks on a converged fit: ρ(b*) ⪰ −tol, every constraint
/// within tol, and the reported residual equal to the recomputed one.
/// Returns an empty string on success, a reason otherwise.
std::string certificate_failure(const memberscope::FitProblem& problem,
                                const memberscope::FitResult& fit, double tol = 1e-9);

/// The two fixture preparations.
memberscope::MeasurementRecord prep1();
memberscope::MeasurementRecord prep2();

/// Runs a shell command; returns the exit status and captured stdout.
struct CommandResult {
  int status = -1;
  std::string out;
};
CommandResult run_command(const std::string& command);

}  // namespace testsupport
