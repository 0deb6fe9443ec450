#pragma once

#include <string>
#include <vector>

#include "memberscope/membership.hpp"
#include "memberscope/povm.hpp"

namespace memberscope::report {

std::string version();

/// Span/kernel summary plus per-reference solvability.
struct PovmCheck {
  int span_dimension = 0;
  int full_dimension = 0;
  bool informationally_complete = false;
  std::size_t kernel_dimension = 0;

  struct Reference {
    std::string name;
    bool solvable = false;
    double violation = 0.0;
  };
  std::vector<Reference> references;

  bool all_solvable() const;
};

/// Checks the eight standard two-qubit references (or none for other
/// dimensions).
PovmCheck check_povm(const Povm& povm);

std::string povm_check_json(const PovmCheck& check, const std::string& povm_spec);
std::string povm_check_text(const PovmCheck& check, const std::string& povm_spec);

/// Where the inputs came from, echoed into reports.
struct Inputs {
  std::string data;
  std::string povm;
};

/// Deterministic JSON: inputs, partition, per-segment residuals, verdict and
/// solver diagnostics. Infinite residuals (empty segments) are null.
std::string decision_json(const MembershipDecision& decision, const Partition& partition,
                          const DecisionPolicy& policy, const Inputs& inputs);

/// Verdict label, or "inconclusive".
std::string verdict_label(const MembershipDecision& decision, const Partition& partition);

/// One row per cell: epsilons, verdict, residuals.
std::string sweep_json(const std::vector<SweepCell>& cells, const std::vector<std::string>& labels,
                       const DecisionPolicy& policy, const Inputs& inputs);

/// Grid of unit-square panels over (F(ref0), F(ref1)) with dashed threshold
/// lines and the verdict cell shaded. Two-reference sweeps only.
std::string sweep_svg(const std::vector<SweepCell>& cells, const std::vector<std::string>& labels);

}  // namespace memberscope::report
