#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "memberscope/linalg.hpp"
#include "memberscope/states.hpp"

namespace memberscope {

/// Wave plate with rotation angle `mu` and phase shift `nu`, both radians.
struct WavePlate {
  double mu = 0.0;
  double nu = 0.0;
};

/// Jones matrix of a wave plate:
///   [cos²μ + e^{iν} sin²μ      ½(1 − e^{iν}) sin 2μ ]
///   [½(1 − e^{iν}) sin 2μ      sin²μ + e^{iν} cos²μ ]
Eigen::Matrix2cd waveplate_matrix(const WavePlate& w);

/// Local basis rotation of one photon with half-wave angle `theta` and
/// quarter-wave angle `phi`: A = W(θ, π)* · W(φ, π/2)*.
Eigen::Matrix2cd local_rotation(double theta, double phi);

/// Half-wave (θ) and quarter-wave (φ) angles for both photons, radians.
struct BasisSetting {
  double theta1 = 0.0;
  double phi1 = 0.0;
  double theta2 = 0.0;
  double phi2 = 0.0;

  bool approx_equal(const BasisSetting& o, double tol = 1e-9) const;
};

/// Outcome order used everywhere: HH, HV, VH, VV.
inline constexpr std::array<const char*, 4> kOutcomeLabels = {"HH", "HV", "VH", "VV"};

/// Four rank-one projectors of a rotated product basis, in HH, HV, VH, VV order.
struct ProjectiveBasis {
  BasisSetting setting;
  std::array<HermitianOperator, 4> projectors;
};

ProjectiveBasis rotated_basis(const BasisSetting& s);

/// Positive operators summing to the identity.
///
/// Elements carry their weights. When the POVM was assembled from rotated
/// product bases, `settings()` lists them and element 4k+j is outcome j of
/// basis k.
class Povm {
 public:
  /// Validates PSD (1e-10) and completeness (1e-10); throws otherwise.
  explicit Povm(std::vector<HermitianOperator> elements,
                std::vector<BasisSetting> settings = {});

  std::size_t size() const noexcept { return elements_.size(); }
  Eigen::Index dim() const noexcept { return elements_.front().dim(); }
  const HermitianOperator& operator[](std::size_t i) const { return elements_[i]; }
  const std::vector<HermitianOperator>& elements() const noexcept { return elements_; }
  const std::vector<BasisSetting>& settings() const noexcept { return settings_; }
  bool has_settings() const noexcept { return !settings_.empty(); }

  int span_dimension() const { return memberscope::span_dimension(elements_); }
  bool informationally_complete() const;
  std::vector<HermitianOperator> perturbation_kernel() const {
    return memberscope::perturbation_kernel(elements_);
  }

 private:
  std::vector<HermitianOperator> elements_;
  std::vector<BasisSetting> settings_;
};

/// m bases → 4m elements, each projector weighted 1/m.
Povm assemble_povm(std::span<const ProjectiveBasis> bases);
Povm assemble_povm(std::span<const BasisSetting> settings);

/// q_i = tr[E_i ρ], small negatives (≥ −1e-12) clamped to zero.
RealVector born_probabilities(const Povm& povm, const DensityMatrix& rho);

/// One basis worth of data: counts, probabilities, or both (probabilities
/// are always populated; counts only when the source was integer counts).
struct BasisBlock {
  BasisSetting setting;
  std::optional<std::array<std::uint64_t, 4>> counts;
  std::array<double, 4> probabilities{};
  std::string name;
};

/// Measured or simulated coincidence data, one block per basis.
struct MeasurementRecord {
  std::vector<BasisBlock> blocks;
  std::string label;
  std::optional<std::uint64_t> shots;
  std::string timestamp;

  std::vector<BasisSetting> settings() const;

  /// Concatenated per-basis probabilities weighted by 1/m, so the vector
  /// sums to one and lines up with assemble_povm's element order.
  RealVector combined_probabilities() const;
};

/// Builds a block from counts, normalising by the total. Throws
/// MalformedRecord on a zero total.
BasisBlock block_from_counts(const BasisSetting& s, const std::array<std::uint64_t, 4>& counts,
                             std::string name = {});

/// Builds a block from probabilities. Entries must be ≥ 0 and sum to one
/// within `sum_tol`; they are renormalised exactly.
BasisBlock block_from_probabilities(const BasisSetting& s, const std::array<double, 4>& p,
                                    double sum_tol = 1e-9, std::string name = {});

/// Multinomial sampling of each basis. shots_per_basis == 0 emits exact
/// Born probabilities. Deterministic per seed.
MeasurementRecord simulate_counts(const DensityMatrix& rho, std::span<const BasisSetting> bases,
                                  std::uint64_t shots_per_basis, std::uint64_t seed);

/// Angle sets of the three-basis and nine-basis POVMs.
const std::vector<BasisSetting>& table1_settings();
const std::vector<BasisSetting>& table2_settings();

}  // namespace memberscope
