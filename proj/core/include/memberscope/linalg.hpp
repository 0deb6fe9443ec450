#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace memberscope {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Entrywise absolute tolerance for accepting a matrix as Hermitian.
inline constexpr double kHermitianTol = 1e-12;
/// Eigenvalues in [-kPsdTol, 0) are treated as float noise and clamped.
inline constexpr double kPsdTol = 1e-10;
/// Relative singular-value cutoff for ranks and null spaces.
inline constexpr double kRankTol = 1e-10;

/// A square complex matrix known to equal its conjugate transpose.
///
/// Construction checks the Hermitian property entrywise within
/// kHermitianTol and stores the exactly-symmetrised matrix, so downstream
/// code can rely on an exact Hermitian representation.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(const ComplexMatrix& m);

  static HermitianOperator identity(Eigen::Index dim);
  static HermitianOperator projector(const ComplexVector& v);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return m_; }
  double trace() const { return m_.trace().real(); }

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator-(const HermitianOperator& o) const;
  HermitianOperator operator*(double s) const;

 private:
  ComplexMatrix m_;
};

/// Eigen-decomposition a = V diag(values) V*, eigenvalues ascending.
struct HermitianEigen {
  RealVector values;
  ComplexMatrix vectors;
};

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// tr[a b]; real for Hermitian operands.
double hs_inner(const HermitianOperator& a, const HermitianOperator& b);

HermitianEigen eigen_hermitian(const HermitianOperator& a);

/// Validates Hermiticity first; throws NotHermitian otherwise.
HermitianEigen eigen_hermitian(const ComplexMatrix& a);

/// Unique PSD square root. Eigenvalues in [-kPsdTol, d·eps·‖a‖] are clamped
/// to zero, anything more negative throws NotPositive.
HermitianOperator sqrt_psd(const HermitianOperator& a);

/// Smallest eigenvalue of a Hermitian operator.
double min_eigenvalue(const HermitianOperator& a);

/// Real coordinates of a Hermitian operator over the orthonormal basis
/// {E_kk} ∪ {(E_jk+E_kj)/√2} ∪ {i(E_jk−E_kj)/√2}, j<k. The Hilbert–Schmidt
/// inner product becomes the Euclidean dot product.
RealVector vectorize(const HermitianOperator& a);
HermitianOperator devectorize(const RealVector& coords, Eigen::Index dim);

/// Dimension of the real linear span of `ops`. Singular values below
/// tol·σ_max of the stacked coordinates count as zero.
int span_dimension(std::span<const HermitianOperator> ops, double tol = kRankTol);

/// Hilbert–Schmidt-orthonormal basis of
/// {Δ Hermitian : tr Δ = 0, tr[Δ E_j] = 0 for all j}.
std::vector<HermitianOperator> perturbation_kernel(std::span<const HermitianOperator> ops,
                                                   double tol = kRankTol);

/// Frobenius norm of a − b.
double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace memberscope
