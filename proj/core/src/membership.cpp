#include "memberscope/membership.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "memberscope/errors.hpp"

namespace memberscope {

namespace {

constexpr double kBellTol = 1e-10;

std::string format_threshold(double eps) {
  std::ostringstream os;
  os << eps;
  return os.str();
}

ComplexMatrix pauli(char axis) {
  ComplexMatrix m(2, 2);
  switch (axis) {
    case 'x': m << 0, 1, 1, 0; break;
    case 'y': m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

}  // namespace

ReferenceSpec::ReferenceSpec(PureState phi_in, double eps, std::string label_in)
    : phi(std::move(phi_in)), epsilon(eps), label(std::move(label_in)) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw InvalidArgument("fidelity threshold must lie in [0,1], got " +
                          std::to_string(epsilon));
  }
}

ReferenceSpec ReferenceSpec::named(const std::string& name, double eps) {
  return ReferenceSpec(named_state(name), eps, name);
}

std::uint32_t Segment::id() const {
  std::uint32_t id = 0;
  for (std::size_t k = 0; k < sides.size(); ++k) {
    if (sides[k] == Side::Below) id |= 1u << k;
  }
  return id;
}

Segment Segment::from_id(std::uint32_t id, std::size_t references) {
  Segment s;
  s.sides.reserve(references);
  for (std::size_t k = 0; k < references; ++k) {
    s.sides.push_back((id >> k) & 1u ? Side::Below : Side::AtLeast);
  }
  return s;
}

Partition::Partition(std::vector<ReferenceSpec> refs) : refs_(std::move(refs)) {
  if (refs_.empty() || refs_.size() > kMaxReferences) {
    throw InvalidArgument("a partition needs between 1 and 8 references");
  }
  const Eigen::Index d = refs_.front().phi.dim();
  for (std::size_t k = 0; k < refs_.size(); ++k) {
    if (refs_[k].phi.dim() != d) throw DimensionMismatch("references differ in dimension");
    if (refs_[k].label.empty()) refs_[k].label = "ref" + std::to_string(k);
  }
}

Segment Partition::classify(const DensityMatrix& rho) const {
  Segment s;
  for (const ReferenceSpec& r : refs_) {
    s.sides.push_back(fidelity(rho, r.phi.density()) >= r.epsilon ? Side::AtLeast : Side::Below);
  }
  return s;
}

std::string Partition::describe(const Segment& s) const {
  std::string out;
  for (std::size_t k = 0; k < refs_.size(); ++k) {
    if (k) out += " & ";
    out += "F(" + refs_[k].label + ")";
    out += s.sides[k] == Side::AtLeast ? ">=" : "<";
    out += format_threshold(refs_[k].epsilon);
  }
  return out;
}

std::string quadrant_name(const Segment& s) {
  if (s.sides.size() != 2) return {};
  const bool right = s.sides[0] == Side::AtLeast;
  const bool top = s.sides[1] == Side::AtLeast;
  return std::string(top ? "top" : "bottom") + "-" + (right ? "right" : "left");
}

SolvabilityCheck solvable_general(const Povm& povm, const DensityMatrix& sigma, double tol) {
  if (povm.dim() != sigma.dim()) throw DimensionMismatch("solvable_general: dimension mismatch");
  const std::vector<HermitianOperator> kernel = povm.perturbation_kernel();
  const ComplexMatrix root = sqrt_psd(sigma.op()).matrix();
  SolvabilityCheck check;
  check.kernel_dimension = kernel.size();
  for (const HermitianOperator& delta : kernel) {
    const double v = (root * delta.matrix() * root).norm();
    if (v > check.max_violation) {
      check.max_violation = v;
      if (v > tol) {
        check.witness = delta;
        check.witness_violation = v;
      }
    }
  }
  check.solvable = check.max_violation <= tol;
  return check;
}

SolvabilityCheck solvable_pure(const Povm& povm, const PureState& phi, double tol) {
  if (povm.dim() != phi.dim()) throw DimensionMismatch("solvable_pure: dimension mismatch");
  const std::vector<HermitianOperator> kernel = povm.perturbation_kernel();
  const ComplexVector& v = phi.amplitudes();
  SolvabilityCheck check;
  check.kernel_dimension = kernel.size();

  ComplexMatrix projection = ComplexMatrix::Zero(phi.dim(), phi.dim());
  for (const HermitianOperator& delta : kernel) {
    const double value = (v.adjoint() * delta.matrix() * v)(0, 0).real();
    check.max_violation = std::max(check.max_violation, std::abs(value));
    // ⟨φ|Δ|φ⟩ = tr[Δ |φ⟩⟨φ|] is the kernel coordinate of the projector.
    projection += value * delta.matrix();
  }
  check.solvable = check.max_violation <= tol;
  if (!check.solvable) {
    const double norm = projection.norm();
    HermitianOperator witness(projection / norm);
    check.witness_violation = std::abs((v.adjoint() * witness.matrix() * v)(0, 0).real());
    check.witness = std::move(witness);
  }
  return check;
}

BellConditions bell_delta_conditions(const HermitianOperator& delta) {
  if (delta.dim() != 4) throw DimensionMismatch("bell_delta_conditions needs a 4x4 operator");
  const ComplexMatrix& m = delta.matrix();
  const double diag = m(1, 1).real() + m(2, 2).real();
  const double cross = 2.0 * m(1, 2).real();
  return {std::abs(diag - cross) <= kBellTol, std::abs(diag + cross) <= kBellTol};
}

Povm minimal_pure_povm(const PureState& phi) {
  const HermitianOperator sigma = phi.projector();
  return Povm({sigma, HermitianOperator::identity(phi.dim()) - sigma});
}

std::vector<LinearConstraint> segment_linear_constraints(const Partition& partition,
                                                         const Segment& segment) {
  if (segment.sides.size() != partition.size()) {
    throw InvalidArgument("segment has " + std::to_string(segment.sides.size()) +
                          " sides for a partition of " + std::to_string(partition.size()));
  }
  std::vector<LinearConstraint> out;
  out.reserve(partition.size());
  for (std::size_t k = 0; k < partition.size(); ++k) {
    const ReferenceSpec& r = partition.references()[k];
    out.push_back({r.phi.projector(), r.epsilon * r.epsilon,
                   segment.sides[k] == Side::AtLeast ? ConstraintSense::AtLeast
                                                     : ConstraintSense::AtMost});
  }
  return out;
}

DecisionPolicy default_policy() {
  DecisionPolicy policy;
  if (const char* env = std::getenv("MEMBERSCOPE_FIT_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0)) {
      throw InvalidArgument(std::string("MEMBERSCOPE_FIT_TOL is not a positive number: ") + env);
    }
    policy.fit_tol = v;
  }
  return policy;
}

void require_solvable(const Povm& povm, const Partition& partition) {
  for (const ReferenceSpec& r : partition.references()) {
    const SolvabilityCheck check = solvable_pure(povm, r.phi);
    if (!check.solvable) {
      throw UnsolvablePovm("POVM cannot conclusively decide fidelity with " + r.label +
                           ": a perturbation has <phi|D|phi> = " +
                           std::to_string(check.witness_violation));
    }
  }
}

MembershipDecision decide(const RealVector& probabilities, const Povm& povm,
                          const Partition& partition, const DecisionPolicy& policy) {
  if (static_cast<std::size_t>(probabilities.size()) != povm.size()) {
    throw MalformedRecord("probability vector has " + std::to_string(probabilities.size()) +
                          " entries, POVM has " + std::to_string(povm.size()));
  }
  require_solvable(povm, partition);

  MembershipDecision decision;
  decision.fits.reserve(partition.segment_count());
  FitProblem problem{probabilities, povm, {}};
  for (std::uint32_t id = 0; id < partition.segment_count(); ++id) {
    Segment segment = partition.segment(id);
    problem.constraints = segment_linear_constraints(partition, segment);
    decision.fits.push_back({std::move(segment), constrained_l1_fit(problem, policy.fit)});
  }

  constexpr double inf = std::numeric_limits<double>::infinity();
  double best = inf;
  double second = inf;
  std::optional<std::uint32_t> best_id;
  std::size_t passing = 0;
  for (std::uint32_t id = 0; id < decision.fits.size(); ++id) {
    const FitResult& fit = decision.fits[id].fit;
    const double r = fit.status == FitStatus::Infeasible ? inf : fit.residual;
    if (r <= policy.fit_tol) ++passing;
    if (r < best) {
      second = best;
      best = r;
      best_id = id;
    } else if (r < second) {
      second = r;
    }
  }
  if (passing == 1 && second - best >= policy.reject_tol) decision.verdict = best_id;
  return decision;
}

MembershipDecision decide(const MeasurementRecord& record, const Povm& povm,
                          const Partition& partition, const DecisionPolicy& policy) {
  // An unsolvable POVM is the more fundamental failure; report it first.
  require_solvable(povm, partition);
  if (povm.has_settings()) {
    const std::vector<BasisSetting>& expected = povm.settings();
    if (expected.size() != record.blocks.size()) {
      throw MalformedRecord("record has " + std::to_string(record.blocks.size()) +
                            " bases, POVM expects " + std::to_string(expected.size()));
    }
    for (std::size_t k = 0; k < expected.size(); ++k) {
      if (!record.blocks[k].setting.approx_equal(expected[k])) {
        throw MalformedRecord("basis " + std::to_string(k) +
                              " of the record does not match the POVM's angle setting");
      }
    }
  } else if (record.blocks.size() * 4 != povm.size()) {
    throw MalformedRecord("record does not match the POVM element count");
  }
  return decide(record.combined_probabilities(), povm, partition, policy);
}

std::vector<SweepCell> sweep(const MeasurementRecord& record, const Povm& povm,
                             const std::vector<PureState>& references,
                             const std::vector<std::string>& labels,
                             const std::vector<std::vector<double>>& thresholds,
                             const DecisionPolicy& policy) {
  std::vector<SweepCell> cells;
  cells.reserve(thresholds.size());
  for (const std::vector<double>& eps : thresholds) {
    if (eps.size() != references.size()) {
      throw InvalidArgument("threshold vector length does not match the reference count");
    }
    std::vector<ReferenceSpec> refs;
    for (std::size_t k = 0; k < references.size(); ++k) {
      refs.emplace_back(references[k], eps[k], k < labels.size() ? labels[k] : std::string{});
    }
    cells.push_back({eps, decide(record, povm, Partition(std::move(refs)), policy)});
  }
  return cells;
}

std::vector<SweepCell> sweep(const MeasurementRecord& record, const Povm& povm,
                             const std::vector<double>& eps_minus_grid,
                             const std::vector<double>& eps_plus_grid,
                             const DecisionPolicy& policy) {
  std::vector<std::vector<double>> thresholds;
  for (double em : eps_minus_grid) {
    for (double ep : eps_plus_grid) thresholds.push_back({em, ep});
  }
  return sweep(record, povm,
               {bell_state(BellLabel::PsiMinus), bell_state(BellLabel::PsiPlus)},
               {"Psi-", "Psi+"}, thresholds, policy);
}

std::map<std::string, double> overlap_estimates(const MeasurementRecord& record) {
  // Identify each block's correlator σ_a⊗σ_a from its projectors rather than
  // from table positions, so any ordering of the three bases works.
  std::map<char, double> correlator;
  static constexpr double kSigns[4] = {1.0, -1.0, -1.0, 1.0};
  for (const BasisBlock& block : record.blocks) {
    const ProjectiveBasis basis = rotated_basis(block.setting);
    ComplexMatrix observable = ComplexMatrix::Zero(4, 4);
    for (std::size_t j = 0; j < 4; ++j) observable += kSigns[j] * basis.projectors[j].matrix();
    for (char axis : {'x', 'y', 'z'}) {
      const ComplexMatrix target = tensor_product(pauli(axis), pauli(axis));
      if ((observable - target).cwiseAbs().maxCoeff() < 1e-9) {
        double c = 0.0;
        for (std::size_t j = 0; j < 4; ++j) c += kSigns[j] * block.probabilities[j];
        correlator[axis] = c;
      }
    }
  }
  for (char axis : {'x', 'y', 'z'}) {
    if (!correlator.count(axis)) {
      throw MalformedRecord(std::string("record has no basis measuring the ") + axis + axis +
                            " correlator");
    }
  }
  const double czz = correlator['z'];
  const double cxx = correlator['x'];
  const double cyy = correlator['y'];
  auto to_fidelity = [](double overlap) { return std::sqrt(std::clamp(overlap, 0.0, 1.0)); };
  return {
      {"Psi-", to_fidelity((1.0 - czz - (cxx + cyy)) / 4.0)},
      {"Psi+", to_fidelity((1.0 - czz + (cxx + cyy)) / 4.0)},
      {"Phi-", to_fidelity((1.0 + czz - (cxx - cyy)) / 4.0)},
      {"Phi+", to_fidelity((1.0 + czz + (cxx - cyy)) / 4.0)},
  };
}

}  // namespace memberscope
