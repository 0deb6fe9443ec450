#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "memberscope/membership.hpp"
#include "memberscope/povm.hpp"
#include "memberscope/states.hpp"

namespace memberscope::io {

enum class AngleUnit { Radians, PiFractions };

std::string to_string(AngleUnit unit);
AngleUnit parse_angle_unit(const std::string& text);

/// Experiment file, JSON form:
///
///   {
///     "format": "memberscope-experiment", "version": 1,
///     "angle_unit": "radians" | "pi_fractions",
///     "label": "...", "shots": 24000, "timestamp": "...",     (optional)
///     "bases": [
///       {"name": "B1", "theta1": 0, "phi1": 0, "theta2": 0, "phi2": 0,
///        "probabilities": {"HH": .., "HV": .., "VH": .., "VV": ..}}
///       ... or "counts" with non-negative integers instead
///     ]
///   }
///
/// Probabilities must sum to one within 1e-6 and are renormalised; counts
/// are divided by their block total. `where` prefixes diagnostics.
MeasurementRecord parse_experiment_json(std::string_view text,
                                        const std::string& where = "<input>");

/// CSV count table. Header `basis,theta1,phi1,theta2,phi2,HH,HV,VH,VV`;
/// an optional leading `# angle_unit=pi_fractions` line (radians otherwise).
/// Integer cells are read as counts, anything else as probabilities.
MeasurementRecord parse_experiment_csv(std::string_view text,
                                       const std::string& where = "<input>");

/// Dispatches on the extension: `.csv` is CSV, everything else JSON.
MeasurementRecord load_experiment(const std::filesystem::path& path);

/// Canonical JSON. Probabilities are written with round-trip precision;
/// counts are written instead when every block carries them.
std::string experiment_to_json(const MeasurementRecord& record,
                               AngleUnit unit = AngleUnit::Radians);
void save_experiment(const std::filesystem::path& path, const MeasurementRecord& record,
                     AngleUnit unit = AngleUnit::Radians);

/// POVM file, JSON form. Either a list of angle settings
///
///   {"format": "memberscope-povm", "version": 1, "name": "...",
///    "angle_unit": "pi_fractions", "bases": [{"theta1": ..}, ...]}
///
/// or explicit operators under "elements": [{"re": [[..]], "im": [[..]]}].
Povm parse_povm_json(std::string_view text, const std::string& where = "<input>");

/// Builtins: `table1`, `table2`, `minimal-psi-minus`; otherwise a path.
Povm load_povm(const std::string& spec);
std::vector<std::string> builtin_povm_names();

/// Angle-setting POVM file contents.
std::string povm_to_json(const std::vector<BasisSetting>& settings, const std::string& name,
                         AngleUnit unit = AngleUnit::PiFractions);

/// State specs accepted by the simulator:
///   Psi-, Psi+, Phi-, Phi+, 00, ..., HV, ...   pure named states
///   werner:<p>                                 p Ψ⁻ + (1 − p) I/4, p ∈ [0, 1]
///   mixed                                      I/4
///   density:<file>                             JSON {"re": [[..]], "im": [[..]]}
///   bloch:<b1>,<b2>,...,<b15>                  I/4 + Σ b_i Γ_i
DensityMatrix parse_state_spec(const std::string& spec);

/// Reference specs: a named state, or `vec:` followed by `;`-separated
/// amplitudes, each `re` or `re,im` (normalised on parse).
PureState parse_reference(const std::string& spec);

std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace memberscope::io
