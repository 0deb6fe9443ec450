#include "memberscope/povm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "memberscope/errors.hpp"

namespace memberscope {

namespace {

constexpr double kPovmTol = 1e-10;
constexpr double kBornClamp = 1e-12;

}  // namespace

Eigen::Matrix2cd waveplate_matrix(const WavePlate& w) {
  const Complex phase = std::polar(1.0, w.nu);
  const double c = std::cos(w.mu);
  const double s = std::sin(w.mu);
  const Complex off = 0.5 * (1.0 - phase) * std::sin(2.0 * w.mu);
  Eigen::Matrix2cd m;
  m << c * c + phase * s * s, off,
       off, s * s + phase * c * c;
  return m;
}

Eigen::Matrix2cd local_rotation(double theta, double phi) {
  const double pi = std::numbers::pi;
  return waveplate_matrix({theta, pi}).adjoint() * waveplate_matrix({phi, pi / 2.0}).adjoint();
}

bool BasisSetting::approx_equal(const BasisSetting& o, double tol) const {
  return std::abs(theta1 - o.theta1) <= tol && std::abs(phi1 - o.phi1) <= tol &&
         std::abs(theta2 - o.theta2) <= tol && std::abs(phi2 - o.phi2) <= tol;
}

ProjectiveBasis rotated_basis(const BasisSetting& s) {
  const ComplexMatrix rot =
      tensor_product(local_rotation(s.theta1, s.phi1), local_rotation(s.theta2, s.phi2));
  ProjectiveBasis basis{s, {}};
  for (Eigen::Index k = 0; k < 4; ++k) {
    // Column k of the rotation is the image of |i⟩⊗|j⟩ with k = 2i + j.
    basis.projectors[static_cast<std::size_t>(k)] = HermitianOperator::projector(rot.col(k));
  }
  return basis;
}

Povm::Povm(std::vector<HermitianOperator> elements, std::vector<BasisSetting> settings)
    : elements_(std::move(elements)), settings_(std::move(settings)) {
  if (elements_.empty()) throw InvalidArgument("POVM needs at least one element");
  const Eigen::Index d = elements_.front().dim();
  ComplexMatrix total = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (elements_[i].dim() != d) throw DimensionMismatch("POVM elements differ in dimension");
    if (min_eigenvalue(elements_[i]) < -kPovmTol) {
      throw NotPositive("POVM element " + std::to_string(i) + " is not positive");
    }
    total += elements_[i].matrix();
  }
  const double defect = (total - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (defect > kPovmTol) {
    throw InvalidArgument("POVM elements do not sum to the identity (max deviation " +
                          std::to_string(defect) + ")");
  }
  if (!settings_.empty() && settings_.size() * 4 != elements_.size()) {
    throw InvalidArgument("POVM basis settings do not match the element count");
  }
}

bool Povm::informationally_complete() const {
  const auto d = static_cast<int>(dim());
  return span_dimension() == d * d;
}

Povm assemble_povm(std::span<const ProjectiveBasis> bases) {
  if (bases.empty()) throw InvalidArgument("assemble_povm: no bases given");
  const Eigen::Index d = bases.front().projectors.front().dim();
  const double weight = 1.0 / static_cast<double>(bases.size());
  std::vector<HermitianOperator> elements;
  std::vector<BasisSetting> settings;
  elements.reserve(bases.size() * 4);
  for (const ProjectiveBasis& b : bases) {
    for (const HermitianOperator& p : b.projectors) {
      if (p.dim() != d) throw DimensionMismatch("assemble_povm: bases differ in dimension");
      elements.push_back(p * weight);
    }
    settings.push_back(b.setting);
  }
  return Povm(std::move(elements), std::move(settings));
}

Povm assemble_povm(std::span<const BasisSetting> settings) {
  std::vector<ProjectiveBasis> bases;
  bases.reserve(settings.size());
  for (const BasisSetting& s : settings) bases.push_back(rotated_basis(s));
  return assemble_povm(bases);
}

RealVector born_probabilities(const Povm& povm, const DensityMatrix& rho) {
  if (povm.dim() != rho.dim()) throw DimensionMismatch("born_probabilities: dimension mismatch");
  RealVector q(static_cast<Eigen::Index>(povm.size()));
  for (std::size_t i = 0; i < povm.size(); ++i) {
    double v = hs_inner(povm[i], rho.op());
    if (v < 0.0 && v >= -kBornClamp) v = 0.0;
    q(static_cast<Eigen::Index>(i)) = v;
  }
  return q;
}

std::vector<BasisSetting> MeasurementRecord::settings() const {
  std::vector<BasisSetting> out;
  out.reserve(blocks.size());
  for (const BasisBlock& b : blocks) out.push_back(b.setting);
  return out;
}

RealVector MeasurementRecord::combined_probabilities() const {
  if (blocks.empty()) throw MalformedRecord("measurement record has no basis blocks");
  const double weight = 1.0 / static_cast<double>(blocks.size());
  RealVector p(static_cast<Eigen::Index>(blocks.size() * 4));
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    for (std::size_t j = 0; j < 4; ++j) {
      p(static_cast<Eigen::Index>(4 * k + j)) = weight * blocks[k].probabilities[j];
    }
  }
  return p;
}

BasisBlock block_from_counts(const BasisSetting& s, const std::array<std::uint64_t, 4>& counts,
                             std::string name) {
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += c;
  if (total == 0) throw MalformedRecord("basis block has zero total counts");
  BasisBlock block{s, counts, {}, std::move(name)};
  for (std::size_t j = 0; j < 4; ++j) {
    block.probabilities[j] = static_cast<double>(counts[j]) / static_cast<double>(total);
  }
  return block;
}

BasisBlock block_from_probabilities(const BasisSetting& s, const std::array<double, 4>& p,
                                    double sum_tol, std::string name) {
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw MalformedRecord("probabilities must be finite and non-negative");
    }
    total += v;
  }
  // The slack keeps a transcribed sum of exactly 1 − sum_tol inside the window
  // despite decimal-to-binary rounding.
  if (std::abs(total - 1.0) > sum_tol + 64 * std::numeric_limits<double>::epsilon()) {
    throw MalformedRecord("basis probabilities sum to " + std::to_string(total));
  }
  BasisBlock block{s, std::nullopt, {}, std::move(name)};
  // Blocks already normalised to rounding are kept bit-for-bit so that
  // write/read cycles are exact; dividing again would drift by an ulp.
  const double scale = std::abs(total - 1.0) <= 8 * std::numeric_limits<double>::epsilon()
                           ? 1.0
                           : total;
  for (std::size_t j = 0; j < 4; ++j) block.probabilities[j] = p[j] / scale;
  return block;
}

MeasurementRecord simulate_counts(const DensityMatrix& rho, std::span<const BasisSetting> bases,
                                  std::uint64_t shots_per_basis, std::uint64_t seed) {
  MeasurementRecord record;
  std::mt19937_64 rng(seed);
  for (const BasisSetting& s : bases) {
    const ProjectiveBasis basis = rotated_basis(s);
    std::array<double, 4> exact{};
    for (std::size_t j = 0; j < 4; ++j) {
      exact[j] = std::max(0.0, hs_inner(basis.projectors[j], rho.op()));
    }
    double total = exact[0] + exact[1] + exact[2] + exact[3];
    for (double& v : exact) v /= total;

    if (shots_per_basis == 0) {
      record.blocks.push_back(block_from_probabilities(s, exact, 1e-9));
      continue;
    }
    // Multinomial draw as a chain of conditional binomials.
    std::array<std::uint64_t, 4> counts{};
    std::uint64_t remaining = shots_per_basis;
    double mass_left = 1.0;
    for (std::size_t j = 0; j < 3; ++j) {
      const double p = mass_left > 0.0 ? std::clamp(exact[j] / mass_left, 0.0, 1.0) : 0.0;
      std::binomial_distribution<std::uint64_t> draw(remaining, p);
      counts[j] = draw(rng);
      remaining -= counts[j];
      mass_left -= exact[j];
    }
    counts[3] = remaining;
    record.blocks.push_back(block_from_counts(s, counts));
  }
  record.shots = shots_per_basis;
  return record;
}

const std::vector<BasisSetting>& table1_settings() {
  constexpr double pi = std::numbers::pi;
  static const std::vector<BasisSetting> settings = {
      {0.0, 0.0, 0.0, 0.0},
      {pi / 8, pi / 4, pi / 8, pi / 4},
      {pi / 8, 0.0, pi / 8, 0.0},
  };
  return settings;
}

const std::vector<BasisSetting>& table2_settings() {
  constexpr double pi = std::numbers::pi;
  static const std::vector<BasisSetting> settings = {
      {0.0, 0.0, 0.0, 0.0},
      {pi / 8, pi / 4, pi / 8, pi / 4},
      {0.0, pi / 4, 0.0, pi / 4},
      {0.0, pi / 8, 0.0, pi / 4},
      {0.0, pi / 8, 0.0, 0.0},
      {pi / 4, pi / 8, 0.0, 0.0},
      {pi / 4, pi / 8, 0.0, pi / 4},
      {pi / 4, pi / 8, 0.0, pi / 8},
      {pi / 4, pi / 8, pi / 4, pi / 8},
  };
  return settings;
}

}  // namespace memberscope
