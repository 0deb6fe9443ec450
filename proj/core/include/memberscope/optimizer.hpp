#pragma once

#include <string>
#include <vector>

#include "memberscope/linalg.hpp"
#include "memberscope/povm.hpp"
#include "memberscope/states.hpp"

namespace memberscope {

enum class ConstraintSense { AtLeast, AtMost };

/// tr[op · ρ] ≥ bound (AtLeast) or ≤ bound (AtMost).
struct LinearConstraint {
  HermitianOperator op;
  double bound = 0.0;
  ConstraintSense sense = ConstraintSense::AtLeast;

  /// Signed slack; non-negative when ρ satisfies the constraint.
  double slack(const HermitianOperator& rho) const;
};

/// Minimise Σ|p_i − tr[E_i ρ(b)]| over Bloch vectors b with ρ(b) ⪰ 0 and
/// every linear constraint satisfied.
struct FitProblem {
  RealVector target;
  Povm povm;
  std::vector<LinearConstraint> constraints;
};

/// Throws InvalidArgument unless target ≥ 0, sums to 1 within 1e-9 and has
/// one entry per POVM element.
void validate(const FitProblem& problem);

enum class FitStatus { Converged, Infeasible, IterationLimit };

std::string to_string(FitStatus status);

struct FitResult {
  BlochVector b_star;
  /// l1_distance(p, born_probabilities(E, ρ(b_star))), or +∞ if infeasible.
  double residual = 0.0;
  FitStatus status = FitStatus::Converged;
  int iterations = 0;
  /// Upper bound on residual − global minimum at termination.
  double gap_bound = 0.0;
  double min_eigenvalue = 0.0;
  /// Largest constraint violation (0 when all are satisfied).
  double max_violation = 0.0;
};

struct FitOptions {
  /// Target optimality gap; also the feasibility slack used when deciding
  /// the constraint set is empty.
  double tol = 1e-10;
  /// Budget of Newton iterations across both solver phases.
  int max_iter = 5000;
};

double l1_distance(const RealVector& p, const RealVector& q);

/// Globally solves the convex ℓ1 fit with a log-barrier interior-point
/// method on the epigraph form.
FitResult constrained_l1_fit(const FitProblem& problem, const FitOptions& options = {});

}  // namespace memberscope
