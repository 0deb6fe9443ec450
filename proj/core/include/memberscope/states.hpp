#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "memberscope/linalg.hpp"

namespace memberscope {

/// Two-qubit dimension used throughout the polarization experiment.
inline constexpr Eigen::Index kTwoQubitDim = 4;

/// Trace-one positive semidefinite operator.
///
/// Invariants, checked on construction: trace 1 within 1e-10 and smallest
/// eigenvalue ≥ −1e-10.
class DensityMatrix {
 public:
  explicit DensityMatrix(HermitianOperator op);
  explicit DensityMatrix(const ComplexMatrix& m) : DensityMatrix(HermitianOperator(m)) {}

  static DensityMatrix maximally_mixed(Eigen::Index dim);

  Eigen::Index dim() const noexcept { return op_.dim(); }
  const HermitianOperator& op() const noexcept { return op_; }
  const ComplexMatrix& matrix() const noexcept { return op_.matrix(); }
  double purity() const;

 private:
  HermitianOperator op_;
};

/// Unit-norm state vector (norm checked within 1e-12).
class PureState {
 public:
  explicit PureState(ComplexVector amplitudes);

  /// Rescales to unit norm; throws InvalidArgument on a zero vector.
  static PureState normalized(const ComplexVector& v);

  Eigen::Index dim() const noexcept { return amps_.size(); }
  const ComplexVector& amplitudes() const noexcept { return amps_; }
  HermitianOperator projector() const { return HermitianOperator::projector(amps_); }
  DensityMatrix density() const { return DensityMatrix(projector()); }

 private:
  ComplexVector amps_;
};

/// Coefficients of ρ − I/d over the Gell-Mann basis.
struct BlochVector {
  RealVector b;
};

/// HS-orthonormal traceless Hermitian basis of d×d operators (the standard
/// generalized Gell-Mann matrices scaled by 1/√2).
///
/// Ordering: symmetric pairs (j<k, row-major), antisymmetric pairs (same
/// order), then the d−1 diagonal elements.
class GellMannBasis {
 public:
  explicit GellMannBasis(Eigen::Index dim);

  static const GellMannBasis& two_qubit();

  Eigen::Index dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return gammas_.size(); }
  const HermitianOperator& operator[](std::size_t i) const { return gammas_[i]; }
  const std::vector<HermitianOperator>& elements() const noexcept { return gammas_; }

 private:
  Eigen::Index dim_;
  std::vector<HermitianOperator> gammas_;
};

enum class BellLabel { PsiMinus, PsiPlus, PhiMinus, PhiPlus };

PureState bell_state(BellLabel label);

/// Named two-qubit states: "Psi-", "Psi+", "Phi-", "Phi+", "00", "01",
/// "10", "11" (also "HH", "HV", "VH", "VV"). Throws InvalidArgument.
PureState named_state(std::string_view name);

/// Canonical names of the eight reference states the three-basis POVM handles.
const std::vector<std::string>& standard_reference_names();

/// ρ = I/d + Σ b_i Γ_i. Throws NotPositive when an eigenvalue < −1e-10.
DensityMatrix bloch_to_density(const BlochVector& b, const GellMannBasis& basis);
DensityMatrix bloch_to_density(const BlochVector& b);

/// Unchecked variant: the Hermitian operator I/d + Σ b_i Γ_i.
HermitianOperator bloch_to_operator(const RealVector& b, const GellMannBasis& basis);

BlochVector density_to_bloch(const DensityMatrix& rho, const GellMannBasis& basis);
BlochVector density_to_bloch(const DensityMatrix& rho);

/// F(ρ,σ) = tr √(√ρ σ √ρ), computed as the nuclear norm of √ρ √σ and
/// clipped to [0, 1].
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// √⟨φ|ρ|φ⟩.
double fidelity_pure(const DensityMatrix& rho, const PureState& phi);

double bures_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// p|Ψ⁻⟩⟨Ψ⁻| + (1−p) I/4.
DensityMatrix werner_state(double p);

/// Random density matrix of the given rank from a complex Ginibre draw.
/// Deterministic per seed.
DensityMatrix random_density(std::uint64_t seed, int rank, Eigen::Index dim = kTwoQubitDim);

/// Haar-random pure state, deterministic per seed.
PureState random_pure_state(std::uint64_t seed, Eigen::Index dim = kTwoQubitDim);

}  // namespace memberscope
