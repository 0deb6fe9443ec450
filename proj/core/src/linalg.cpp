#include "memberscope/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "memberscope/errors.hpp"

namespace memberscope {

namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": dimension " + std::to_string(a) + " vs " +
                            std::to_string(b));
  }
}

void require_hermitian(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionMismatch("operator must be square and non-empty");
  }
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = r; c < m.cols(); ++c) {
      if (std::abs(m(r, c) - std::conj(m(c, r))) > kHermitianTol) {
        throw NotHermitian("matrix is not Hermitian at (" + std::to_string(r) + "," +
                           std::to_string(c) + ")");
      }
    }
  }
}

// Stacks the real coordinates of every operator as a row.
RealMatrix stacked_coordinates(std::span<const HermitianOperator> ops) {
  const Eigen::Index d = ops.front().dim();
  RealMatrix rows(static_cast<Eigen::Index>(ops.size()), d * d);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    require_same_dim(ops[i].dim(), d, "operator list");
    rows.row(static_cast<Eigen::Index>(i)) = vectorize(ops[i]).transpose();
  }
  return rows;
}

}  // namespace

HermitianOperator::HermitianOperator(const ComplexMatrix& m) {
  require_hermitian(m);
  m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::identity(Eigen::Index dim) {
  return HermitianOperator(ComplexMatrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::projector(const ComplexVector& v) {
  return HermitianOperator(v * v.adjoint());
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  require_same_dim(dim(), o.dim(), "operator sum");
  HermitianOperator r;
  r.m_ = m_ + o.m_;
  return r;
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
  require_same_dim(dim(), o.dim(), "operator difference");
  HermitianOperator r;
  r.m_ = m_ - o.m_;
  return r;
}

HermitianOperator HermitianOperator::operator*(double s) const {
  HermitianOperator r;
  r.m_ = m_ * s;
  return r;
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double hs_inner(const HermitianOperator& a, const HermitianOperator& b) {
  require_same_dim(a.dim(), b.dim(), "hs_inner");
  // tr[ab] = Σ_ij a_ij b_ji = Σ_ij a_ij conj(b_ij) for Hermitian b.
  return (a.matrix().array() * b.matrix().conjugate().array()).sum().real();
}

HermitianEigen eigen_hermitian(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error("Hermitian eigen-decomposition failed to converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

HermitianEigen eigen_hermitian(const ComplexMatrix& a) {
  return eigen_hermitian(HermitianOperator(a));
}

HermitianOperator sqrt_psd(const HermitianOperator& a) {
  auto [values, vectors] = eigen_hermitian(a);
  if (values(0) < -kPsdTol) {
    throw NotPositive("sqrt_psd: eigenvalue " + std::to_string(values(0)) +
                      " below -1e-10");
  }
  // Eigenvalues below the solver's resolution (~d·eps·‖a‖) are noise; their
  // square roots (~1e-8) would otherwise leak into fidelities.
  const double floor = static_cast<double>(a.dim()) * std::numeric_limits<double>::epsilon() *
                       values.cwiseAbs().maxCoeff();
  RealVector roots = values.unaryExpr([floor](double v) { return v <= floor ? 0.0 : std::sqrt(v); });
  return HermitianOperator(vectors * roots.asDiagonal() * vectors.adjoint());
}

double min_eigenvalue(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

RealVector vectorize(const HermitianOperator& a) {
  const Eigen::Index d = a.dim();
  const ComplexMatrix& m = a.matrix();
  const double root2 = std::sqrt(2.0);
  RealVector coords(d * d);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < d; ++i) coords(k++) = m(i, i).real();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      coords(k++) = root2 * m(i, j).real();
      coords(k++) = root2 * m(i, j).imag();
    }
  }
  return coords;
}

HermitianOperator devectorize(const RealVector& coords, Eigen::Index dim) {
  if (coords.size() != dim * dim) {
    throw DimensionMismatch("devectorize: expected " + std::to_string(dim * dim) +
                            " coordinates, got " + std::to_string(coords.size()));
  }
  const double inv_root2 = 1.0 / std::sqrt(2.0);
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < dim; ++i) m(i, i) = coords(k++);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = i + 1; j < dim; ++j) {
      const double sym = coords(k++) * inv_root2;
      const double anti = coords(k++) * inv_root2;
      m(i, j) = Complex(sym, anti);
      m(j, i) = Complex(sym, -anti);
    }
  }
  return HermitianOperator(m);
}

int span_dimension(std::span<const HermitianOperator> ops, double tol) {
  if (ops.empty()) throw InvalidArgument("span_dimension: empty operator list");
  const RealMatrix rows = stacked_coordinates(ops);
  Eigen::JacobiSVD<RealMatrix> svd(rows);
  const RealVector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cutoff = tol * sv(0);
  return static_cast<int>((sv.array() > cutoff).count());
}

std::vector<HermitianOperator> perturbation_kernel(std::span<const HermitianOperator> ops,
                                                   double tol) {
  if (ops.empty()) throw InvalidArgument("perturbation_kernel: empty operator list");
  const Eigen::Index d = ops.front().dim();

  std::vector<HermitianOperator> constraints(ops.begin(), ops.end());
  constraints.push_back(HermitianOperator::identity(d));
  const RealMatrix rows = stacked_coordinates(constraints);

  Eigen::JacobiSVD<RealMatrix> svd(rows, Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  const double cutoff = tol * sv(0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;

  const RealMatrix& v = svd.matrixV();
  std::vector<HermitianOperator> kernel;
  kernel.reserve(static_cast<std::size_t>(v.cols() - rank));
  for (Eigen::Index c = rank; c < v.cols(); ++c) kernel.push_back(devectorize(v.col(c), d));
  return kernel;
}

double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a.rows(), b.rows(), "frobenius_distance");
  return (a - b).norm();
}

}  // namespace memberscope
