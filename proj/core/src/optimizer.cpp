#include "memberscope/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "memberscope/errors.hpp"

namespace memberscope {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCertificateTol = 1e-9;
// Phase-I optimum above this means the constraint set is empty.
constexpr double kInfeasibleSlack = 8e-10;
// Relaxation applied when the feasible set has no usable interior.
constexpr double kThinRelaxation = 2e-10;
constexpr double kArmijo = 0.01;
constexpr double kBacktrack = 0.5;
constexpr double kMuShrink = 10.0;

// Convex program in variables x:
//   minimise  wᵀx + Σ_i |r_i(x)|,   r(x) = l1_offset − l1_map·x
//   subject to ineq_offset + ineq_map·x ≥ 0,  mat_offset + Σ_j x_j mat_terms[j] ⪰ 0.
// Each |r_i| is carried as an epigraph variable eliminated in closed form.
struct BarrierProgram {
  Eigen::Index n = 0;
  RealVector cost;
  RealMatrix l1_map;
  RealVector l1_offset;
  RealMatrix ineq_map;
  RealVector ineq_offset;
  ComplexMatrix mat_offset;
  std::vector<ComplexMatrix> mat_terms;

  // Barrier degree: 2 per ℓ1 term, 1 per scalar inequality, d for the cone.
  double degree() const {
    return 2.0 * static_cast<double>(l1_offset.size()) +
           static_cast<double>(ineq_offset.size()) + static_cast<double>(mat_offset.rows());
  }
};

struct Evaluation {
  bool feasible = false;
  double value = kInf;
  RealVector grad;
  RealMatrix hess;
};

ComplexMatrix matrix_at(const BarrierProgram& prog, const RealVector& x) {
  ComplexMatrix m = prog.mat_offset;
  for (Eigen::Index j = 0; j < prog.n; ++j) {
    if (x(j) != 0.0) m += x(j) * prog.mat_terms[static_cast<std::size_t>(j)];
  }
  return m;
}

Evaluation evaluate(const BarrierProgram& prog, const RealVector& x, double mu, bool derivs) {
  Evaluation ev;
  const RealVector slack = prog.ineq_offset + prog.ineq_map * x;
  if (slack.size() > 0 && !(slack.minCoeff() > 0.0)) return ev;

  const ComplexMatrix m = matrix_at(prog, x);
  Eigen::LLT<ComplexMatrix> chol(m);
  if (chol.info() != Eigen::Success) return ev;
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double diag = chol.matrixLLT()(i, i).real();
    if (!(diag > 0.0)) return ev;
    logdet += 2.0 * std::log(diag);
  }

  const RealVector r = prog.l1_offset - prog.l1_map * x;
  RealVector dphi(r.size());
  RealVector ddphi(r.size());
  double value = prog.cost.dot(x);
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    // min_t  t − μ log(t² − r²)  is attained at t = μ + √(μ² + r²).
    const double s = std::hypot(mu, r(i));
    const double t = mu + s;
    value += t - mu * std::log(2.0 * mu * t);
    dphi(i) = r(i) / t;
    ddphi(i) = mu / (s * t);
  }
  for (Eigen::Index k = 0; k < slack.size(); ++k) value -= mu * std::log(slack(k));
  value -= mu * logdet;

  ev.feasible = std::isfinite(value);
  ev.value = value;
  if (!derivs || !ev.feasible) return ev;

  const Eigen::Index n = prog.n;
  ev.grad = prog.cost - prog.l1_map.transpose() * dphi;
  ev.hess = prog.l1_map.transpose() * ddphi.asDiagonal() * prog.l1_map;
  if (slack.size() > 0) {
    const RealVector inv = slack.cwiseInverse();
    ev.grad -= mu * (prog.ineq_map.transpose() * inv);
    ev.hess += mu * prog.ineq_map.transpose() * inv.cwiseAbs2().asDiagonal() * prog.ineq_map;
  }
  std::vector<ComplexMatrix> solved(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    solved[static_cast<std::size_t>(j)] = chol.solve(prog.mat_terms[static_cast<std::size_t>(j)]);
    ev.grad(j) -= mu * solved[static_cast<std::size_t>(j)].trace().real();
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index l = j; l < n; ++l) {
      const ComplexMatrix& a = solved[static_cast<std::size_t>(j)];
      const ComplexMatrix& b = solved[static_cast<std::size_t>(l)];
      // tr[AB] without forming the product.
      const double h = mu * (a.array() * b.transpose().array()).sum().real();
      ev.hess(j, l) += h;
      if (l != j) ev.hess(l, j) += h;
    }
  }
  return ev;
}

// Newton direction with symmetric Jacobi scaling; the Hessian mixes
// curvatures of order 1/μ and μ once the fit is nearly exact.
RealVector newton_direction(const RealMatrix& hess, const RealVector& grad) {
  const RealVector diag = hess.diagonal().cwiseMax(1e-300);
  const RealVector scale = diag.cwiseSqrt().cwiseInverse();
  const RealMatrix scaled = scale.asDiagonal() * hess * scale.asDiagonal();
  const RealVector rhs = -(scale.asDiagonal() * grad);
  Eigen::LDLT<RealMatrix> ldlt(scaled);
  RealVector step;
  if (ldlt.info() == Eigen::Success) step = ldlt.solve(rhs);
  if (step.size() == 0 || !step.allFinite() || rhs.dot(step) <= 0.0) {
    Eigen::JacobiSVD<RealMatrix> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-14);
    step = svd.solve(rhs);
  }
  return scale.asDiagonal() * step;
}

enum class CenterOutcome { Centered, Stalled, Budget };

// Minimises the barrier objective at fixed μ starting from a feasible x.
CenterOutcome center(const BarrierProgram& prog, RealVector& x, double mu, int& budget) {
  while (true) {
    if (budget <= 0) return CenterOutcome::Budget;
    --budget;
    const Evaluation ev = evaluate(prog, x, mu, true);
    const RealVector step = newton_direction(ev.hess, ev.grad);
    const double decrement = -ev.grad.dot(step);
    if (!(decrement > 0.0) || decrement / 2.0 <= 1e-14) return CenterOutcome::Centered;

    double t = 1.0;
    bool accepted = false;
    while (t > 1e-20) {
      const RealVector trial = x + t * step;
      const Evaluation next = evaluate(prog, trial, mu, false);
      if (next.feasible && next.value <= ev.value - kArmijo * t * decrement) {
        x = trial;
        accepted = true;
        break;
      }
      t *= kBacktrack;
    }
    // Rounding dominates the Armijo test close to the centre.
    if (!accepted) return decrement < 1e-9 ? CenterOutcome::Centered : CenterOutcome::Stalled;
  }
}

// Affine model of the fit in Bloch coordinates b:
//   q(b) = q0 + Q b,  constraint slack_k(b) = h0_k + a_kᵀ b,  ρ(b) = I/d + Σ b_j Γ_j.
struct AffineModel {
  RealVector q0;
  RealMatrix q_map;
  RealVector h0;
  RealMatrix h_map;
};

AffineModel build_model(const FitProblem& problem, const GellMannBasis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  const auto d = static_cast<double>(basis.dim());
  const auto count = static_cast<Eigen::Index>(problem.povm.size());
  const auto k_count = static_cast<Eigen::Index>(problem.constraints.size());
  AffineModel model{RealVector(count), RealMatrix(count, n), RealVector(k_count),
                    RealMatrix(k_count, n)};
  for (Eigen::Index i = 0; i < count; ++i) {
    const HermitianOperator& e = problem.povm[static_cast<std::size_t>(i)];
    model.q0(i) = e.trace() / d;
    for (Eigen::Index j = 0; j < n; ++j) {
      model.q_map(i, j) = hs_inner(e, basis[static_cast<std::size_t>(j)]);
    }
  }
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const LinearConstraint& c = problem.constraints[static_cast<std::size_t>(k)];
    const double sign = c.sense == ConstraintSense::AtLeast ? 1.0 : -1.0;
    model.h0(k) = sign * (c.op.trace() / d - c.bound);
    for (Eigen::Index j = 0; j < n; ++j) {
      model.h_map(k, j) = sign * hs_inner(c.op, basis[static_cast<std::size_t>(j)]);
    }
  }
  return model;
}

struct PathResult {
  RealVector x;
  int iterations = 0;
  bool budget_exhausted = false;
  double final_mu = 0.0;
};

// Follows the central path from a strictly feasible x until degree·μ ≤ gap.
// `stop_early` is polled after every centring step.
template <typename StopEarly>
PathResult follow_path(const BarrierProgram& prog, RealVector x, double mu0, double gap,
                       int budget, StopEarly stop_early) {
  PathResult out;
  const int start_budget = budget;
  double mu = mu0;
  while (true) {
    const CenterOutcome outcome = center(prog, x, mu, budget);
    out.final_mu = mu;
    if (outcome == CenterOutcome::Budget) {
      out.budget_exhausted = true;
      break;
    }
    if (stop_early(x)) break;
    if (prog.degree() * mu <= gap) break;
    mu /= kMuShrink;
  }
  out.x = std::move(x);
  out.iterations = start_budget - budget;
  return out;
}

}  // namespace

double LinearConstraint::slack(const HermitianOperator& rho) const {
  const double value = hs_inner(op, rho);
  return sense == ConstraintSense::AtLeast ? value - bound : bound - value;
}

void validate(const FitProblem& problem) {
  const RealVector& p = problem.target;
  if (static_cast<std::size_t>(p.size()) != problem.povm.size()) {
    throw InvalidArgument("fit target has " + std::to_string(p.size()) +
                          " entries but the POVM has " + std::to_string(problem.povm.size()) +
                          " elements");
  }
  if (!p.allFinite() || p.minCoeff() < 0.0) {
    throw InvalidArgument("fit target must be finite and non-negative");
  }
  if (std::abs(p.sum() - 1.0) > 1e-9) {
    throw InvalidArgument("fit target sums to " + std::to_string(p.sum()));
  }
  for (const LinearConstraint& c : problem.constraints) {
    if (c.op.dim() != problem.povm.dim()) {
      throw DimensionMismatch("constraint operator dimension differs from the POVM");
    }
  }
}

std::string to_string(FitStatus status) {
  switch (status) {
    case FitStatus::Converged: return "converged";
    case FitStatus::Infeasible: return "infeasible";
    case FitStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

double l1_distance(const RealVector& p, const RealVector& q) {
  if (p.size() != q.size()) {
    throw DimensionMismatch("l1_distance: lengths " + std::to_string(p.size()) + " and " +
                            std::to_string(q.size()));
  }
  return (p - q).cwiseAbs().sum();
}

FitResult constrained_l1_fit(const FitProblem& problem, const FitOptions& options) {
  validate(problem);
  const Eigen::Index d = problem.povm.dim();
  const GellMannBasis basis(d);
  const auto n = static_cast<Eigen::Index>(basis.size());
  const AffineModel model = build_model(problem, basis);

  // Rotate to coordinates whose leading block spans the row space of Q and
  // whose trailing block is exactly invisible to the data. Keeping those
  // columns exactly zero separates the O(1/μ) and O(μ) curvatures.
  Eigen::JacobiSVD<RealMatrix> svd(model.q_map, Eigen::ComputeFullV);
  const RealMatrix rot = svd.matrixV();
  const RealVector& sv = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > kRankTol * std::max(sv(0), 1e-300)) ++rank;
  RealMatrix data_map = model.q_map * rot;
  data_map.rightCols(n - rank).setZero();

  std::vector<ComplexMatrix> gamma_rot(static_cast<std::size_t>(n),
                                       ComplexMatrix::Zero(d, d));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      gamma_rot[static_cast<std::size_t>(j)] += rot(i, j) * basis[static_cast<std::size_t>(i)].matrix();
    }
  }
  const ComplexMatrix mixed = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  const RealMatrix constraint_map = model.h_map * rot;
  const auto k_count = model.h0.size();

  int budget = options.max_iter;
  FitResult result;

  // Phase I: minimise s subject to slack_k + s ≥ 0 and ρ(b) + sI ⪰ 0.
  BarrierProgram phase1;
  phase1.n = n + 1;
  phase1.cost = RealVector::Zero(n + 1);
  phase1.cost(n) = 1.0;
  phase1.l1_map = RealMatrix(0, n + 1);
  phase1.l1_offset = RealVector(0);
  phase1.ineq_map = RealMatrix(k_count, n + 1);
  phase1.ineq_map.leftCols(n) = constraint_map;
  phase1.ineq_map.col(n).setOnes();
  phase1.ineq_offset = model.h0;
  phase1.mat_offset = mixed;
  phase1.mat_terms = gamma_rot;
  phase1.mat_terms.push_back(ComplexMatrix::Identity(d, d));

  RealVector x1 = RealVector::Zero(n + 1);
  double worst = -1.0 / static_cast<double>(d);
  if (k_count > 0) worst = std::max(worst, (-model.h0).maxCoeff());
  x1(n) = std::max(worst, 0.0) + 1.0;

  const PathResult p1 = follow_path(phase1, x1, 1.0, 1e-13, budget,
                                    [n](const RealVector& x) { return x(n) < 0.0; });
  budget -= p1.iterations;
  result.iterations += p1.iterations;
  const double phase1_slack = p1.x(n);

  result.b_star.b = RealVector::Zero(n);
  if (p1.budget_exhausted && phase1_slack >= 0.0) {
    result.status = FitStatus::IterationLimit;
    result.residual = kInf;
    return result;
  }
  if (phase1_slack > kInfeasibleSlack) {
    result.status = FitStatus::Infeasible;
    result.residual = kInf;
    result.gap_bound = 0.0;
    return result;
  }

  // Phase II on the (possibly slightly relaxed) feasible set.
  double relax = 0.0;
  RealVector start = p1.x.head(n);
  if (phase1_slack >= 0.0) {
    relax = phase1_slack + kThinRelaxation;
  }

  BarrierProgram phase2;
  phase2.n = n;
  phase2.cost = RealVector::Zero(n);
  phase2.l1_map = data_map;
  phase2.l1_offset = problem.target - model.q0;
  phase2.ineq_map = constraint_map;
  phase2.ineq_offset = model.h0.array() + relax;
  phase2.mat_offset = mixed + relax * ComplexMatrix::Identity(d, d);
  phase2.mat_terms = gamma_rot;

  const double mu0 = 0.1;
  const PathResult p2 =
      follow_path(phase2, start, mu0, options.tol, budget, [](const RealVector&) { return false; });
  result.iterations += p2.iterations;

  const RealVector b = rot * p2.x;
  result.b_star.b = b;
  const HermitianOperator rho = bloch_to_operator(b, basis);
  RealVector q(static_cast<Eigen::Index>(problem.povm.size()));
  for (std::size_t i = 0; i < problem.povm.size(); ++i) {
    q(static_cast<Eigen::Index>(i)) = hs_inner(problem.povm[i], rho);
  }
  result.residual = l1_distance(problem.target, q);
  result.gap_bound = phase2.degree() * p2.final_mu;
  result.min_eigenvalue = min_eigenvalue(rho);
  double violation = 0.0;
  for (const LinearConstraint& c : problem.constraints) {
    violation = std::max(violation, -c.slack(rho));
  }
  result.max_violation = violation;

  const bool certified =
      result.min_eigenvalue >= -kCertificateTol && violation <= kCertificateTol;
  const bool reached_gap = result.gap_bound <= std::max(options.tol, 1e-9);
  result.status = (certified && reached_gap && !p2.budget_exhausted) ? FitStatus::Converged
                                                                     : FitStatus::IterationLimit;
  return result;
}

}  // namespace memberscope
