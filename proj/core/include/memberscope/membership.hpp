#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "memberscope/optimizer.hpp"
#include "memberscope/povm.hpp"
#include "memberscope/states.hpp"

namespace memberscope {

/// Pure reference state σ = |φ⟩⟨φ| with fidelity threshold ε ∈ [0, 1].
struct ReferenceSpec {
  PureState phi;
  double epsilon = 0.0;
  std::string label;

  ReferenceSpec(PureState phi, double epsilon, std::string label = {});
  static ReferenceSpec named(const std::string& name, double epsilon);
};

enum class Side { AtLeast, Below };

/// One cell of a partition: one side flag per reference.
struct Segment {
  std::vector<Side> sides;

  /// Bit k set ⇔ reference k is Below; id 0 is the all-AtLeast cell.
  std::uint32_t id() const;
  static Segment from_id(std::uint32_t id, std::size_t references);
};

/// 2ⁿ-cell partition from n ≤ 8 pure references.
class Partition {
 public:
  static constexpr std::size_t kMaxReferences = 8;

  explicit Partition(std::vector<ReferenceSpec> refs);

  const std::vector<ReferenceSpec>& references() const noexcept { return refs_; }
  std::size_t size() const noexcept { return refs_.size(); }
  std::uint32_t segment_count() const noexcept { return 1u << refs_.size(); }
  Segment segment(std::uint32_t id) const { return Segment::from_id(id, refs_.size()); }

  /// Segment containing ρ, computed directly from the fidelities.
  Segment classify(const DensityMatrix& rho) const;

  /// Human-readable label such as "F(Psi-)>=0.5 & F(Psi+)<0.5".
  std::string describe(const Segment& s) const;

 private:
  std::vector<ReferenceSpec> refs_;
};

/// Diagram position of a two-reference cell, reference 0 on the
/// horizontal axis: "top-right", "bottom-right", "top-left", "bottom-left".
std::string quadrant_name(const Segment& s);

struct SolvabilityCheck {
  bool solvable = true;
  /// Largest violation over the kernel basis that was tested.
  double max_violation = 0.0;
  /// HS-normalised perturbation with the largest violation, if any violates.
  std::optional<HermitianOperator> witness;
  /// Violation of `witness`.
  double witness_violation = 0.0;
  std::size_t kernel_dimension = 0;
};

/// Checks √σ Δ √σ = 0 (Frobenius ≤ tol) for every kernel basis element Δ.
SolvabilityCheck solvable_general(const Povm& povm, const DensityMatrix& sigma,
                                  double tol = 1e-10);

/// Pure-state reduction: |⟨φ|Δ|φ⟩| ≤ tol for every kernel basis element.
/// The witness is the normalised projection of |φ⟩⟨φ| onto the kernel,
/// which maximises |⟨φ|Δ|φ⟩| over unit-norm Δ.
SolvabilityCheck solvable_pure(const Povm& povm, const PureState& phi, double tol = 1e-10);

struct BellConditions {
  bool minus_ok = false;
  bool plus_ok = false;
};

/// Δ₂₂ + Δ₃₃ ∓ 2 Re Δ₂₃ = 0 within 1e-10 (1-based indices), i.e.
/// ⟨Ψ∓|Δ|Ψ∓⟩ = 0 scaled by two.
BellConditions bell_delta_conditions(const HermitianOperator& delta);

/// Two-outcome POVM {σ, I − σ}.
Povm minimal_pure_povm(const PureState& phi);

/// tr[|φ_k⟩⟨φ_k| ρ] ≥ ε_k² for AtLeast and ≤ ε_k² for Below (closed
/// relaxation of the open set).
std::vector<LinearConstraint> segment_linear_constraints(const Partition& partition,
                                                         const Segment& segment);

struct DecisionPolicy {
  /// Residual at or below which a segment reproduces the data.
  double fit_tol = 1e-7;
  /// Required separation between the best and second-best residual.
  double reject_tol = 1e-4;
  FitOptions fit;
};

/// Default fit tolerance, honouring MEMBERSCOPE_FIT_TOL when set.
DecisionPolicy default_policy();

struct SegmentFit {
  Segment segment;
  FitResult fit;
};

struct MembershipDecision {
  /// Id of the containing segment, empty when inconclusive.
  std::optional<std::uint32_t> verdict;
  std::vector<SegmentFit> fits;

  bool conclusive() const noexcept { return verdict.has_value(); }
};

/// Throws UnsolvablePovm unless the POVM solves every reference.
void require_solvable(const Povm& povm, const Partition& partition);

/// Fits every segment against the combined probability vector and applies
/// the policy. Throws UnsolvablePovm or MalformedRecord.
MembershipDecision decide(const RealVector& probabilities, const Povm& povm,
                          const Partition& partition, const DecisionPolicy& policy = {});
MembershipDecision decide(const MeasurementRecord& record, const Povm& povm,
                          const Partition& partition, const DecisionPolicy& policy = {});

struct SweepCell {
  std::vector<double> epsilons;
  MembershipDecision decision;
};

/// One decision per threshold vector; references keep their states, only
/// their ε change.
std::vector<SweepCell> sweep(const MeasurementRecord& record, const Povm& povm,
                             const std::vector<PureState>& references,
                             const std::vector<std::string>& labels,
                             const std::vector<std::vector<double>>& thresholds,
                             const DecisionPolicy& policy = {});

/// Cartesian grid over (Ψ⁻, Ψ⁺) thresholds, ε⁻ major.
std::vector<SweepCell> sweep(const MeasurementRecord& record, const Povm& povm,
                             const std::vector<double>& eps_minus_grid,
                             const std::vector<double>& eps_plus_grid,
                             const DecisionPolicy& policy = {});

/// Bell-state fidelities F = √⟨φ|ρ|φ⟩ reconstructed from the zz, xx and yy
/// correlators: ⟨Ψ±|ρ|Ψ±⟩ = (1 − c_zz ± (c_xx + c_yy))/4 and
/// ⟨Φ±|ρ|Φ±⟩ = (1 + c_zz ± (c_xx − c_yy))/4. Keys "Psi-", "Psi+", "Phi-",
/// "Phi+". Blocks are matched to correlators by their projectors; throws
/// MalformedRecord if one of the three is missing.
std::map<std::string, double> overlap_estimates(const MeasurementRecord& record);

}  // namespace memberscope
