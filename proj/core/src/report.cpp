#include "memberscope/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "memberscope/errors.hpp"

namespace memberscope::report {

using nlohmann::json;

namespace {

json residual_value(const FitResult& fit) {
  if (fit.status == FitStatus::Infeasible || !std::isfinite(fit.residual)) return nullptr;
  return fit.residual;
}

json fits_json(const MembershipDecision& decision, const Partition& partition) {
  json rows = json::array();
  for (const SegmentFit& f : decision.fits) {
    json row = {{"segment", f.segment.id()},
                {"label", partition.describe(f.segment)},
                {"residual", residual_value(f.fit)},
                {"status", to_string(f.fit.status)},
                {"iterations", f.fit.iterations},
                {"gap_bound", f.fit.gap_bound},
                {"min_eigenvalue", f.fit.min_eigenvalue},
                {"max_violation", f.fit.max_violation}};
    if (partition.size() == 2) row["quadrant"] = quadrant_name(f.segment);
    rows.push_back(std::move(row));
  }
  return rows;
}

json policy_json(const DecisionPolicy& policy) {
  return {{"fit_tol", policy.fit_tol},
          {"reject_tol", policy.reject_tol},
          {"solver_tol", policy.fit.tol},
          {"max_iter", policy.fit.max_iter}};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string version() { return MEMBERSCOPE_VERSION; }

bool PovmCheck::all_solvable() const {
  for (const Reference& r : references) {
    if (!r.solvable) return false;
  }
  return true;
}

PovmCheck check_povm(const Povm& povm) {
  PovmCheck check;
  const Eigen::Index d = povm.dim();
  check.span_dimension = povm.span_dimension();
  check.full_dimension = static_cast<int>(d * d);
  check.informationally_complete = check.span_dimension == check.full_dimension;
  check.kernel_dimension = povm.perturbation_kernel().size();
  if (d == kTwoQubitDim) {
    for (const std::string& name : standard_reference_names()) {
      const SolvabilityCheck s = solvable_pure(povm, named_state(name));
      check.references.push_back({name, s.solvable, s.solvable ? s.max_violation
                                                                : s.witness_violation});
    }
  }
  return check;
}

std::string povm_check_json(const PovmCheck& check, const std::string& povm_spec) {
  json refs = json::array();
  for (const auto& r : check.references) {
    refs.push_back({{"name", r.name}, {"solvable", r.solvable}, {"violation", r.violation}});
  }
  const json doc = {{"tool", "memberscope"},
                    {"version", version()},
                    {"povm", povm_spec},
                    {"span_dimension", check.span_dimension},
                    {"full_dimension", check.full_dimension},
                    {"informationally_complete", check.informationally_complete},
                    {"perturbation_dimension", check.kernel_dimension},
                    {"references", std::move(refs)}};
  return doc.dump(2) + "\n";
}

std::string povm_check_text(const PovmCheck& check, const std::string& povm_spec) {
  std::ostringstream os;
  os << "POVM " << povm_spec << "\n"
     << "  span dimension:          " << check.span_dimension << " of " << check.full_dimension
     << "\n"
     << "  informationally complete: " << (check.informationally_complete ? "yes" : "no") << "\n"
     << "  perturbation dimension:   " << check.kernel_dimension << "\n";
  for (const auto& r : check.references) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "  %-6s %-10s (max |<phi|D|phi>| = %.3g)\n", r.name.c_str(),
                  r.solvable ? "solvable" : "UNSOLVABLE", r.violation);
    os << buf;
  }
  return os.str();
}

std::string verdict_label(const MembershipDecision& decision, const Partition& partition) {
  if (!decision.verdict) return "inconclusive";
  return partition.describe(partition.segment(*decision.verdict));
}

std::string decision_json(const MembershipDecision& decision, const Partition& partition,
                          const DecisionPolicy& policy, const Inputs& inputs) {
  json refs = json::array();
  for (const ReferenceSpec& r : partition.references()) {
    json amps = json::array();
    for (Eigen::Index i = 0; i < r.phi.dim(); ++i) {
      amps.push_back({r.phi.amplitudes()(i).real(), r.phi.amplitudes()(i).imag()});
    }
    refs.push_back({{"label", r.label}, {"epsilon", r.epsilon}, {"amplitudes", std::move(amps)}});
  }
  json verdict = nullptr;
  if (decision.verdict) {
    const Segment s = partition.segment(*decision.verdict);
    verdict = {{"segment", *decision.verdict}, {"label", partition.describe(s)}};
    if (partition.size() == 2) verdict["quadrant"] = quadrant_name(s);
  }
  const json doc = {{"tool", "memberscope"},
                    {"version", version()},
                    {"inputs", {{"data", inputs.data}, {"povm", inputs.povm}}},
                    {"references", std::move(refs)},
                    {"policy", policy_json(policy)},
                    {"conclusive", decision.conclusive()},
                    {"verdict", std::move(verdict)},
                    {"segments", fits_json(decision, partition)}};
  return doc.dump(2) + "\n";
}

std::string sweep_json(const std::vector<SweepCell>& cells, const std::vector<std::string>& labels,
                       const DecisionPolicy& policy, const Inputs& inputs) {
  json rows = json::array();
  for (const SweepCell& c : cells) {
    std::vector<ReferenceSpec> refs;
    for (std::size_t k = 0; k < c.epsilons.size(); ++k) {
      refs.emplace_back(named_state("00"), c.epsilons[k], k < labels.size() ? labels[k] : "");
    }
    const Partition partition(std::move(refs));
    json residuals = json::array();
    for (const SegmentFit& f : c.decision.fits) residuals.push_back(residual_value(f.fit));
    json row = {{"epsilons", c.epsilons},
                {"conclusive", c.decision.conclusive()},
                {"verdict", verdict_label(c.decision, partition)},
                {"residuals", std::move(residuals)}};
    if (partition.size() == 2) {
      row["quadrant"] = c.decision.verdict
                            ? json(quadrant_name(partition.segment(*c.decision.verdict)))
                            : json(nullptr);
    }
    rows.push_back(std::move(row));
  }
  json segment_labels = json::array();
  if (!cells.empty()) {
    for (const SegmentFit& f : cells.front().decision.fits) {
      std::string l;
      for (std::size_t k = 0; k < f.segment.sides.size(); ++k) {
        if (k) l += " & ";
        l += (k < labels.size() ? labels[k] : "ref" + std::to_string(k));
        l += f.segment.sides[k] == Side::AtLeast ? " above" : " below";
      }
      segment_labels.push_back(std::move(l));
    }
  }
  const json doc = {{"tool", "memberscope"},
                    {"version", version()},
                    {"inputs", {{"data", inputs.data}, {"povm", inputs.povm}}},
                    {"references", labels},
                    {"policy", policy_json(policy)},
                    {"segments", std::move(segment_labels)},
                    {"cells", std::move(rows)}};
  return doc.dump(2) + "\n";
}

std::string sweep_svg(const std::vector<SweepCell>& cells, const std::vector<std::string>& labels) {
  constexpr int kSide = 180;
  constexpr int kMargin = 40;
  constexpr int kPerRow = 4;
  constexpr int kPanel = kSide + 2 * kMargin;
  for (const SweepCell& c : cells) {
    if (c.epsilons.size() != 2) throw InvalidArgument("SVG output needs exactly two references");
  }
  const std::string xl = labels.size() > 0 ? labels[0] : "ref0";
  const std::string yl = labels.size() > 1 ? labels[1] : "ref1";
  const int n = static_cast<int>(cells.size());
  const int cols = std::max(1, std::min(n, kPerRow));
  const int rows = std::max(1, (n + kPerRow - 1) / kPerRow);

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cols * kPanel << "\" height=\""
     << rows * kPanel << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i < n; ++i) {
    const SweepCell& c = cells[i];
    const int ox = (i % kPerRow) * kPanel + kMargin;
    const int oy = (i / kPerRow) * kPanel + kMargin;
    auto px = [&](double f) { return fmt(ox + f * kSide); };
    auto py = [&](double f) { return fmt(oy + (1.0 - f) * kSide); };
    const double ex = c.epsilons[0];
    const double ey = c.epsilons[1];

    os << "<g>\n";
    if (c.decision.verdict) {
      const Segment s = Segment::from_id(*c.decision.verdict, 2);
      const double x0 = s.sides[0] == Side::AtLeast ? ex : 0.0;
      const double x1 = s.sides[0] == Side::AtLeast ? 1.0 : ex;
      const double y0 = s.sides[1] == Side::AtLeast ? ey : 0.0;
      const double y1 = s.sides[1] == Side::AtLeast ? 1.0 : ey;
      os << "  <rect x=\"" << px(x0) << "\" y=\"" << py(y1) << "\" width=\""
         << fmt((x1 - x0) * kSide) << "\" height=\"" << fmt((y1 - y0) * kSide)
         << "\" fill=\"#7fa7d9\" fill-opacity=\"0.6\"/>\n";
    }
    os << "  <rect x=\"" << ox << "\" y=\"" << oy << "\" width=\"" << kSide << "\" height=\""
       << kSide << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "  <line x1=\"" << px(ex) << "\" y1=\"" << py(0) << "\" x2=\"" << px(ex) << "\" y2=\""
       << py(1) << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
    os << "  <line x1=\"" << px(0) << "\" y1=\"" << py(ey) << "\" x2=\"" << px(1) << "\" y2=\""
       << py(ey) << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
    os << "  <text x=\"" << px(0.5) << "\" y=\"" << fmt(oy + kSide + 28.0)
       << "\" text-anchor=\"middle\">F(" << xml_escape(xl) << ")</text>\n";
    os << "  <text x=\"" << fmt(ox - 26.0) << "\" y=\"" << py(0.5)
       << "\" text-anchor=\"middle\" transform=\"rotate(-90 " << fmt(ox - 26.0) << " "
       << py(0.5) << ")\">F(" << xml_escape(yl) << ")</text>\n";
    os << "  <text x=\"" << px(0) << "\" y=\"" << fmt(oy + kSide + 13.0)
       << "\" text-anchor=\"middle\">0</text>\n";
    os << "  <text x=\"" << px(1) << "\" y=\"" << fmt(oy + kSide + 13.0)
       << "\" text-anchor=\"middle\">1</text>\n";
    os << "  <text x=\"" << px(0.5) << "\" y=\"" << fmt(oy - 10.0)
       << "\" text-anchor=\"middle\">eps = (" << fmt(ex) << ", " << fmt(ey) << ")"
       << (c.decision.verdict ? "" : " inconclusive") << "</text>\n";
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace memberscope::report
