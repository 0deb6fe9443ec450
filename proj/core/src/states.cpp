#include "memberscope/states.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SVD>

#include "memberscope/errors.hpp"

namespace memberscope {

namespace {

constexpr double kTraceTol = 1e-10;
constexpr double kNormTol = 1e-12;

ComplexMatrix ginibre(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = Complex(re, im);
    }
  }
  return g;
}

}  // namespace

DensityMatrix::DensityMatrix(HermitianOperator op) : op_(std::move(op)) {
  const double tr = op_.trace();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw InvalidArgument("density matrix trace is " + std::to_string(tr) + ", expected 1");
  }
  const double lmin = min_eigenvalue(op_);
  if (lmin < -kPsdTol) {
    throw NotPositive("density matrix has eigenvalue " + std::to_string(lmin));
  }
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
  return DensityMatrix(HermitianOperator::identity(dim) * (1.0 / static_cast<double>(dim)));
}

double DensityMatrix::purity() const { return hs_inner(op_, op_); }

PureState::PureState(ComplexVector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw InvalidArgument("pure state needs at least one amplitude");
  if (std::abs(amps_.norm() - 1.0) > kNormTol) {
    throw InvalidArgument("pure state is not normalized (norm " +
                          std::to_string(amps_.norm()) + ")");
  }
}

PureState PureState::normalized(const ComplexVector& v) {
  const double n = v.norm();
  if (n == 0.0 || !std::isfinite(n)) throw InvalidArgument("cannot normalize a zero vector");
  return PureState(v / n);
}

GellMannBasis::GellMannBasis(Eigen::Index dim) : dim_(dim) {
  if (dim < 2) throw InvalidArgument("Gell-Mann basis needs dim >= 2");
  const double inv_root2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index k = j + 1; k < dim; ++k) {
      ComplexMatrix s = ComplexMatrix::Zero(dim, dim);
      s(j, k) = s(k, j) = inv_root2;
      gammas_.emplace_back(s);
    }
  }
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index k = j + 1; k < dim; ++k) {
      ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
      a(j, k) = Complex(0.0, -inv_root2);
      a(k, j) = Complex(0.0, inv_root2);
      gammas_.emplace_back(a);
    }
  }
  for (Eigen::Index l = 1; l < dim; ++l) {
    const double ld = static_cast<double>(l);
    const double scale = 1.0 / std::sqrt(ld * (ld + 1.0));
    ComplexMatrix g = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index j = 0; j < l; ++j) g(j, j) = scale;
    g(l, l) = -ld * scale;
    gammas_.emplace_back(g);
  }
}

const GellMannBasis& GellMannBasis::two_qubit() {
  static const GellMannBasis basis(kTwoQubitDim);
  return basis;
}

PureState bell_state(BellLabel label) {
  const double h = 1.0 / std::sqrt(2.0);
  ComplexVector v = ComplexVector::Zero(4);
  switch (label) {
    case BellLabel::PsiMinus: v(1) = h; v(2) = -h; break;
    case BellLabel::PsiPlus:  v(1) = h; v(2) = h;  break;
    case BellLabel::PhiMinus: v(0) = h; v(3) = -h; break;
    case BellLabel::PhiPlus:  v(0) = h; v(3) = h;  break;
  }
  return PureState(v);
}

PureState named_state(std::string_view name) {
  if (name == "Psi-" || name == "psi-") return bell_state(BellLabel::PsiMinus);
  if (name == "Psi+" || name == "psi+") return bell_state(BellLabel::PsiPlus);
  if (name == "Phi-" || name == "phi-") return bell_state(BellLabel::PhiMinus);
  if (name == "Phi+" || name == "phi+") return bell_state(BellLabel::PhiPlus);
  static constexpr std::string_view kBits[] = {"00", "01", "10", "11"};
  static constexpr std::string_view kPol[] = {"HH", "HV", "VH", "VV"};
  for (int i = 0; i < 4; ++i) {
    if (name == kBits[i] || name == kPol[i]) {
      ComplexVector v = ComplexVector::Zero(4);
      v(i) = 1.0;
      return PureState(v);
    }
  }
  throw InvalidArgument("unknown state name '" + std::string(name) + "'");
}

const std::vector<std::string>& standard_reference_names() {
  static const std::vector<std::string> names = {"00",   "01",   "10",   "11",
                                                 "Phi-", "Phi+", "Psi-", "Psi+"};
  return names;
}

HermitianOperator bloch_to_operator(const RealVector& b, const GellMannBasis& basis) {
  if (static_cast<std::size_t>(b.size()) != basis.size()) {
    throw DimensionMismatch("Bloch vector has " + std::to_string(b.size()) +
                            " entries, basis has " + std::to_string(basis.size()));
  }
  const Eigen::Index d = basis.dim();
  ComplexMatrix m = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    m += b(static_cast<Eigen::Index>(i)) * basis[i].matrix();
  }
  return HermitianOperator(m);
}

DensityMatrix bloch_to_density(const BlochVector& b, const GellMannBasis& basis) {
  return DensityMatrix(bloch_to_operator(b.b, basis));
}

DensityMatrix bloch_to_density(const BlochVector& b) {
  return bloch_to_density(b, GellMannBasis::two_qubit());
}

BlochVector density_to_bloch(const DensityMatrix& rho, const GellMannBasis& basis) {
  if (rho.dim() != basis.dim()) throw DimensionMismatch("density_to_bloch: dimension mismatch");
  RealVector b(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    b(static_cast<Eigen::Index>(i)) = hs_inner(basis[i], rho.op());
  }
  return {b};
}

BlochVector density_to_bloch(const DensityMatrix& rho) {
  return density_to_bloch(rho, GellMannBasis::two_qubit());
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionMismatch("fidelity: dimension mismatch");
  // The eigenvalues of √ρ σ √ρ are the squared singular values of √ρ √σ.
  // Taking the singular values directly avoids square-rooting eigenvalue
  // noise (~1e-17 becomes ~3e-9) when the product is rank-deficient.
  const ComplexMatrix m = sqrt_psd(rho.op()).matrix() * sqrt_psd(sigma.op()).matrix();
  const double f = Eigen::JacobiSVD<ComplexMatrix>(m).singularValues().sum();
  return std::clamp(f, 0.0, 1.0);
}

double fidelity_pure(const DensityMatrix& rho, const PureState& phi) {
  if (rho.dim() != phi.dim()) throw DimensionMismatch("fidelity_pure: dimension mismatch");
  const ComplexVector& v = phi.amplitudes();
  const double overlap = (v.adjoint() * rho.matrix() * v)(0, 0).real();
  return std::sqrt(std::clamp(overlap, 0.0, 1.0));
}

double bures_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * fidelity(rho, sigma)));
}

DensityMatrix werner_state(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument("Werner parameter must lie in [0,1], got " + std::to_string(p));
  }
  const HermitianOperator singlet = bell_state(BellLabel::PsiMinus).projector();
  return DensityMatrix(singlet * p + HermitianOperator::identity(4) * ((1.0 - p) / 4.0));
}

DensityMatrix random_density(std::uint64_t seed, int rank, Eigen::Index dim) {
  if (rank < 1 || rank > dim) {
    throw InvalidArgument("random_density: rank " + std::to_string(rank) + " outside [1," +
                          std::to_string(dim) + "]");
  }
  const ComplexMatrix g = ginibre(seed, dim, rank);
  const ComplexMatrix m = g * g.adjoint();
  return DensityMatrix(HermitianOperator(m / m.trace().real()));
}

PureState random_pure_state(std::uint64_t seed, Eigen::Index dim) {
  return PureState::normalized(ginibre(seed, dim, 1).col(0));
}

}  // namespace memberscope
