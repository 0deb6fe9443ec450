// memberscope — command-line front end.
//
// Exit codes: 0 conclusive / success, 2 inconclusive, 1 any error
// (including a POVM that cannot decide the requested partition).

#include <cctype>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "memberscope/errors.hpp"
#include "memberscope/io.hpp"
#include "memberscope/membership.hpp"
#include "memberscope/report.hpp"

namespace ms = memberscope;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInconclusive = 2;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    ms::io::write_file_atomic(out_path, text);
  }
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::logic_error&) {
      throw ms::InvalidArgument(what + ": not a number: \"" + cell + "\"");
    }
  }
  if (out.empty()) throw ms::InvalidArgument(what + ": empty list");
  return out;
}

struct PolicyFlags {
  std::optional<double> fit_tol;
  std::optional<double> reject_tol;

  void add(CLI::App* app) {
    app->add_option("--fit-tol", fit_tol,
                     "Residual at or below which a segment fits (default 1e-7, or "
                     "MEMBERSCOPE_FIT_TOL)")
        ->check(CLI::PositiveNumber);
    app->add_option("--reject-tol", reject_tol,
                    "Required gap between best and second-best residual (default 1e-4)")
        ->check(CLI::PositiveNumber);
  }

  ms::DecisionPolicy resolve() const {
    ms::DecisionPolicy policy = ms::default_policy();
    if (fit_tol) policy.fit_tol = *fit_tol;
    if (reject_tol) policy.reject_tol = *reject_tol;
    return policy;
  }
};

struct RefFlags {
  std::vector<std::string> refs;

  std::vector<ms::PureState> states() const {
    std::vector<ms::PureState> out;
    for (const std::string& r : refs) out.push_back(ms::io::parse_reference(r));
    return out;
  }
};

int run_povm_check(const std::string& spec, bool as_json, const std::string& out) {
  const ms::Povm povm = ms::io::load_povm(spec);
  const ms::report::PovmCheck check = ms::report::check_povm(povm);
  emit(as_json ? ms::report::povm_check_json(check, spec) : ms::report::povm_check_text(check, spec),
       out);
  return kExitOk;
}

int run_solve(const std::string& data, const std::string& povm_spec, const RefFlags& refs,
              const std::vector<double>& eps, const PolicyFlags& flags, const std::string& out) {
  if (refs.refs.empty() || refs.refs.size() != eps.size()) {
    throw ms::InvalidArgument("give one --eps per --ref (got " + std::to_string(refs.refs.size()) +
                              " references, " + std::to_string(eps.size()) + " thresholds)");
  }
  const ms::DecisionPolicy policy = flags.resolve();
  const ms::MeasurementRecord record = ms::io::load_experiment(data);
  const ms::Povm povm = ms::io::load_povm(povm_spec);
  const std::vector<ms::PureState> states = refs.states();
  std::vector<ms::ReferenceSpec> specs;
  for (std::size_t k = 0; k < states.size(); ++k) specs.emplace_back(states[k], eps[k], refs.refs[k]);
  const ms::Partition partition(std::move(specs));

  const ms::MembershipDecision decision = ms::decide(record, povm, partition, policy);
  emit(ms::report::decision_json(decision, partition, policy, {data, povm_spec}), out);
  std::cerr << "verdict: " << ms::report::verdict_label(decision, partition) << "\n";
  return decision.conclusive() ? kExitOk : kExitInconclusive;
}

int run_sweep(const std::string& data, const std::string& povm_spec, RefFlags refs,
              const std::vector<std::string>& grid, const std::string& grid_minus,
              const std::string& grid_plus, const PolicyFlags& flags, const std::string& out,
              const std::string& svg) {
  if (refs.refs.empty()) refs.refs = {"Psi-", "Psi+"};
  const std::size_t n = refs.refs.size();

  std::vector<std::vector<double>> thresholds;
  for (const std::string& g : grid) {
    std::stringstream ss(g);
    std::string tuple;
    while (std::getline(ss, tuple, ';')) {
      std::vector<double> eps = parse_list(tuple, "--grid");
      if (eps.size() != n) {
        throw ms::InvalidArgument("--grid entry \"" + tuple + "\" needs " + std::to_string(n) +
                                  " thresholds");
      }
      thresholds.push_back(std::move(eps));
    }
  }
  if (!grid_minus.empty() || !grid_plus.empty()) {
    if (grid_minus.empty() || grid_plus.empty() || n != 2) {
      throw ms::InvalidArgument("--grid-minus and --grid-plus go together, with two references");
    }
    for (double a : parse_list(grid_minus, "--grid-minus")) {
      for (double b : parse_list(grid_plus, "--grid-plus")) thresholds.push_back({a, b});
    }
  }
  if (thresholds.empty()) throw ms::InvalidArgument("no thresholds: pass --grid or --grid-minus/--grid-plus");

  const ms::DecisionPolicy policy = flags.resolve();
  const ms::MeasurementRecord record = ms::io::load_experiment(data);
  const ms::Povm povm = ms::io::load_povm(povm_spec);
  const std::vector<ms::SweepCell> cells =
      ms::sweep(record, povm, refs.states(), refs.refs, thresholds, policy);

  emit(ms::report::sweep_json(cells, refs.refs, policy, {data, povm_spec}), out);
  if (!svg.empty()) ms::io::write_file_atomic(svg, ms::report::sweep_svg(cells, refs.refs));
  for (const ms::SweepCell& c : cells) {
    if (!c.decision.conclusive()) return kExitInconclusive;
  }
  return kExitOk;
}

int run_simulate(const std::string& state_spec, const std::string& povm_spec, std::uint64_t shots,
                 std::uint64_t seed, const std::string& out, const std::string& label,
                 const std::string& unit) {
  const ms::DensityMatrix rho = ms::io::parse_state_spec(state_spec);
  const ms::Povm povm = ms::io::load_povm(povm_spec);
  if (!povm.has_settings()) {
    throw ms::InvalidArgument("simulate needs a POVM given by wave-plate settings");
  }
  ms::MeasurementRecord record = ms::simulate_counts(rho, povm.settings(), shots, seed);
  record.label = label.empty() ? state_spec : label;
  emit(ms::io::experiment_to_json(record, ms::io::parse_angle_unit(unit)), out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decide fidelity-membership of two-photon states from incomplete measurements"};
  app.set_version_flag("--version", ms::report::version());
  app.require_subcommand(1);

  // povm check
  CLI::App* povm_cmd = app.add_subcommand("povm", "Inspect a measurement");
  povm_cmd->require_subcommand(1);
  CLI::App* check_cmd = povm_cmd->add_subcommand("check", "Span, perturbations and solvability");
  std::string check_spec;
  bool check_json = false;
  std::string check_out;
  check_cmd->add_option("spec", check_spec, "table1 | table2 | minimal-psi-minus | POVM file")
      ->required();
  check_cmd->add_flag("--json", check_json, "Emit JSON instead of text");
  check_cmd->add_option("-o,--output", check_out, "Write to a file instead of stdout");

  // solve
  CLI::App* solve_cmd = app.add_subcommand("solve", "Decide the segment containing the data");
  std::string data;
  std::string povm_spec = "table1";
  RefFlags solve_refs;
  std::vector<double> solve_eps;
  PolicyFlags solve_policy;
  std::string solve_out;
  solve_cmd->add_option("--data", data, "Experiment file (.json or .csv)")->required();
  solve_cmd->add_option("--povm", povm_spec, "POVM builtin or file")->capture_default_str();
  solve_cmd->add_option("--ref", solve_refs.refs, "Reference state (Psi-, Phi+, 01, vec:...)")
      ->required();
  solve_cmd->add_option("--eps", solve_eps, "Fidelity threshold, one per --ref")->required();
  solve_policy.add(solve_cmd);
  solve_cmd->add_option("-o,--output", solve_out, "Write the report to a file");

  // sweep
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Decide over a grid of thresholds");
  std::string sweep_data;
  std::string sweep_povm = "table1";
  RefFlags sweep_refs;
  std::vector<std::string> grid;
  std::string grid_minus;
  std::string grid_plus;
  PolicyFlags sweep_policy;
  std::string sweep_out;
  std::string svg;
  sweep_cmd->add_option("--data", sweep_data, "Experiment file (.json or .csv)")->required();
  sweep_cmd->add_option("--povm", sweep_povm, "POVM builtin or file")->capture_default_str();
  sweep_cmd->add_option("--ref", sweep_refs.refs, "Reference states (default Psi- Psi+)");
  sweep_cmd->add_option("--grid", grid,
                        "Threshold tuples, e.g. \"0.5,0.5;0.6,0.4\" (repeatable)");
  sweep_cmd->add_option("--grid-minus", grid_minus, "Comma list for the first reference");
  sweep_cmd->add_option("--grid-plus", grid_plus, "Comma list for the second reference");
  sweep_policy.add(sweep_cmd);
  sweep_cmd->add_option("-o,--output", sweep_out, "Write the grid report to a file");
  sweep_cmd->add_option("--svg", svg, "Write a partition diagram");

  // simulate
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Sample coincidence counts for a state");
  std::string state_spec;
  std::string sim_povm = "table1";
  std::uint64_t shots = 0;
  std::uint64_t seed = 1;
  std::string sim_out;
  std::string label;
  std::string unit = "radians";
  sim_cmd->add_option("--state", state_spec,
                      "Psi-, werner:<p>, mixed, density:<file>, bloch:<b1,...,b15>")
      ->required();
  sim_cmd->add_option("--povm", sim_povm, "POVM builtin or file with angle settings")
      ->capture_default_str();
  sim_cmd->add_option("--shots", shots, "Shots per basis; 0 writes exact probabilities")
      ->capture_default_str();
  sim_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
  sim_cmd->add_option("-o,--output", sim_out, "Experiment file to write");
  sim_cmd->add_option("--label", label, "Label stored in the file");
  sim_cmd->add_option("--angle-unit", unit, "radians | pi_fractions")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (*check_cmd) return run_povm_check(check_spec, check_json, check_out);
    if (*solve_cmd) return run_solve(data, povm_spec, solve_refs, solve_eps, solve_policy, solve_out);
    if (*sweep_cmd) {
      return run_sweep(sweep_data, sweep_povm, sweep_refs, grid, grid_minus, grid_plus,
                       sweep_policy, sweep_out, svg);
    }
    if (*sim_cmd) return run_simulate(state_spec, sim_povm, shots, seed, sim_out, label, unit);
  } catch (const ms::UnsolvablePovm& e) {
    std::cerr << "memberscope: unsolvable: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "memberscope: error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
