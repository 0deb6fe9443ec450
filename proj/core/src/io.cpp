#include "memberscope/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "memberscope/errors.hpp"

namespace memberscope::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kExperimentFormat = "memberscope-experiment";
constexpr const char* kPovmFormat = "memberscope-povm";
constexpr int kFormatVersion = 1;
constexpr double kProbabilitySumTol = 1e-6;

json parse_json(std::string_view text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Byte offset → line:column for the diagnostic.
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SchemaError(where + ":" + std::to_string(line) + ":" + std::to_string(col),
                      "invalid JSON");
  }
}

std::string field(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(field(where, key), "missing required field");
  return *it;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) throw SchemaError(field(where, it.key()), "unknown field");
  }
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw SchemaError(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw SchemaError(where, "expected a finite number");
  return x;
}

std::string string_field(const json& v, const std::string& where) {
  if (!v.is_string()) throw SchemaError(where, "expected a string");
  return v.get<std::string>();
}

void check_header(const json& doc, const char* format, const std::string& where) {
  if (!doc.is_object()) throw SchemaError(where, "top level must be an object");
  const std::string f = string_field(require(doc, "format", where), field(where, "format"));
  if (f != format) {
    throw SchemaError(field(where, "format"),
                      "expected \"" + std::string(format) + "\", got \"" + f + "\"");
  }
  const json& version = require(doc, "version", where);
  if (!version.is_number_integer() || version.get<int>() != kFormatVersion) {
    throw SchemaError(field(where, "version"), "unsupported version (expected 1)");
  }
}

double angle_scale(AngleUnit unit) {
  return unit == AngleUnit::PiFractions ? std::numbers::pi : 1.0;
}

AngleUnit unit_field(const json& doc, const std::string& where) {
  const json& u = require(doc, "angle_unit", where);
  try {
    return parse_angle_unit(string_field(u, field(where, "angle_unit")));
  } catch (const InvalidArgument& e) {
    throw SchemaError(field(where, "angle_unit"), e.what());
  }
}

BasisSetting setting_from_json(const json& b, AngleUnit unit, const std::string& where) {
  const double s = angle_scale(unit);
  return {number(require(b, "theta1", where), field(where, "theta1")) * s,
          number(require(b, "phi1", where), field(where, "phi1")) * s,
          number(require(b, "theta2", where), field(where, "theta2")) * s,
          number(require(b, "phi2", where), field(where, "phi2")) * s};
}

json setting_to_json(const BasisSetting& s, AngleUnit unit) {
  const double k = angle_scale(unit);
  return {{"theta1", s.theta1 / k}, {"phi1", s.phi1 / k}, {"theta2", s.theta2 / k},
          {"phi2", s.phi2 / k}};
}

BasisBlock block_from_json(const json& b, AngleUnit unit, const std::string& where) {
  if (!b.is_object()) throw SchemaError(where, "basis entry must be an object");
  reject_unknown(b, {"name", "theta1", "phi1", "theta2", "phi2", "counts", "probabilities"},
                 where);
  const BasisSetting setting = setting_from_json(b, unit, where);
  std::string name;
  if (b.contains("name")) name = string_field(b["name"], field(where, "name"));

  const bool has_counts = b.contains("counts");
  const bool has_probs = b.contains("probabilities");
  if (has_counts == has_probs) {
    throw SchemaError(where, "exactly one of \"counts\" and \"probabilities\" is required");
  }
  const std::string key = has_counts ? "counts" : "probabilities";
  const std::string base = field(where, key);
  const json& values = b[key];
  if (!values.is_object()) throw SchemaError(base, "expected an object keyed HH, HV, VH, VV");
  reject_unknown(values, {"HH", "HV", "VH", "VV"}, base);

  try {
    if (has_counts) {
      std::array<std::uint64_t, 4> counts{};
      for (std::size_t j = 0; j < 4; ++j) {
        const std::string label = kOutcomeLabels[j];
        const json& v = require(values, label, base);
        if (!v.is_number_integer()) throw SchemaError(field(base, label), "expected an integer");
        if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
          throw SchemaError(field(base, label), "counts must be non-negative");
        }
        counts[j] = v.get<std::uint64_t>();
      }
      return block_from_counts(setting, counts, std::move(name));
    }
    std::array<double, 4> p{};
    for (std::size_t j = 0; j < 4; ++j) {
      const std::string label = kOutcomeLabels[j];
      p[j] = number(require(values, label, base), field(base, label));
      if (p[j] < 0.0) throw SchemaError(field(base, label), "probabilities must be non-negative");
    }
    return block_from_probabilities(setting, p, kProbabilitySumTol, std::move(name));
  } catch (const MalformedRecord& e) {
    throw SchemaError(base, e.what());
  }
}

ComplexMatrix matrix_from_json(const json& m, const std::string& where) {
  if (!m.is_object()) throw SchemaError(where, "expected {\"re\": [[..]], \"im\": [[..]]}");
  reject_unknown(m, {"re", "im", "weight"}, where);
  auto read = [&](const json& rows, const std::string& at) {
    if (!rows.is_array() || rows.empty()) throw SchemaError(at, "expected a square array");
    const std::size_t n = rows.size();
    RealMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string row_at = at + "[" + std::to_string(i) + "]";
      if (!rows[i].is_array() || rows[i].size() != n) {
        throw SchemaError(row_at, "expected " + std::to_string(n) + " entries");
      }
      for (std::size_t j = 0; j < n; ++j) {
        out(i, j) = number(rows[i][j], row_at + "[" + std::to_string(j) + "]");
      }
    }
    return out;
  };
  const RealMatrix re = read(require(m, "re", where), field(where, "re"));
  ComplexMatrix out = re.cast<Complex>();
  if (m.contains("im")) {
    const RealMatrix im = read(m["im"], field(where, "im"));
    if (im.rows() != re.rows()) throw SchemaError(field(where, "im"), "shape differs from re");
    out += Complex(0, 1) * im.cast<Complex>();
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

double parse_number_arg(const std::string& s, const std::string& what) {
  double v = 0.0;
  if (!parse_double(s, v)) throw InvalidArgument(what + ": not a number: \"" + s + "\"");
  return v;
}

bool is_count(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

std::string to_string(AngleUnit unit) {
  return unit == AngleUnit::PiFractions ? "pi_fractions" : "radians";
}

AngleUnit parse_angle_unit(const std::string& text) {
  if (text == "radians") return AngleUnit::Radians;
  if (text == "pi_fractions") return AngleUnit::PiFractions;
  throw InvalidArgument("angle_unit must be \"radians\" or \"pi_fractions\", got \"" + text + "\"");
}

MeasurementRecord parse_experiment_json(std::string_view text, const std::string& where) {
  const json doc = parse_json(text, where);
  check_header(doc, kExperimentFormat, where);
  reject_unknown(doc,
                 {"format", "version", "angle_unit", "label", "shots", "timestamp", "bases",
                  "description"},
                 where);
  const AngleUnit unit = unit_field(doc, where);

  MeasurementRecord record;
  if (doc.contains("label")) record.label = string_field(doc["label"], field(where, "label"));
  if (doc.contains("timestamp")) {
    record.timestamp = string_field(doc["timestamp"], field(where, "timestamp"));
  }
  if (doc.contains("shots")) {
    const json& s = doc["shots"];
    if (!s.is_number_unsigned()) {
      throw SchemaError(field(where, "shots"), "expected a non-negative integer");
    }
    record.shots = s.get<std::uint64_t>();
  }

  const json& bases = require(doc, "bases", where);
  if (!bases.is_array() || bases.empty()) {
    throw SchemaError(field(where, "bases"), "expected a non-empty array");
  }
  for (std::size_t k = 0; k < bases.size(); ++k) {
    record.blocks.push_back(
        block_from_json(bases[k], unit, field(where, "bases") + "[" + std::to_string(k) + "]"));
  }
  return record;
}

MeasurementRecord parse_experiment_csv(std::string_view text, const std::string& where) {
  static const std::vector<std::string> kHeader = {"basis", "theta1", "phi1", "theta2", "phi2",
                                                   "HH",    "HV",     "VH",   "VV"};
  MeasurementRecord record;
  AngleUnit unit = AngleUnit::Radians;
  bool header_seen = false;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string at = where + ":" + std::to_string(line_no);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const std::string body = trim(std::string_view(t).substr(1));
      if (body.rfind("angle_unit=", 0) == 0) {
        if (header_seen) throw SchemaError(at, "angle_unit must precede the header");
        try {
          unit = parse_angle_unit(trim(std::string_view(body).substr(11)));
        } catch (const InvalidArgument& e) {
          throw SchemaError(at, e.what());
        }
      }
      continue;
    }
    const std::vector<std::string> cells = split(t, ',');
    if (!header_seen) {
      if (cells != kHeader) {
        throw SchemaError(at, "expected header basis,theta1,phi1,theta2,phi2,HH,HV,VH,VV");
      }
      header_seen = true;
      continue;
    }
    if (cells.size() != kHeader.size()) {
      throw SchemaError(at, "expected 9 cells, got " + std::to_string(cells.size()));
    }
    double angles[4];
    for (std::size_t i = 0; i < 4; ++i) {
      if (!parse_double(cells[1 + i], angles[i])) {
        throw SchemaError(at + " (" + kHeader[1 + i] + ")", "not a number: \"" + cells[1 + i] + "\"");
      }
      angles[i] *= angle_scale(unit);
    }
    const BasisSetting setting{angles[0], angles[1], angles[2], angles[3]};
    const bool counts_row =
        std::all_of(cells.begin() + 5, cells.end(), [](const std::string& c) { return is_count(c); });
    try {
      if (counts_row) {
        std::array<std::uint64_t, 4> counts{};
        for (std::size_t j = 0; j < 4; ++j) {
          const std::string& c = cells[5 + j];
          const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), counts[j]);
          if (ec != std::errc() || ptr != c.data() + c.size()) {
            throw SchemaError(at + " (" + kHeader[5 + j] + ")", "count out of range");
          }
        }
        record.blocks.push_back(block_from_counts(setting, counts, cells[0]));
      } else {
        std::array<double, 4> p{};
        for (std::size_t j = 0; j < 4; ++j) {
          if (!parse_double(cells[5 + j], p[j])) {
            throw SchemaError(at + " (" + kHeader[5 + j] + ")",
                              "not a number: \"" + cells[5 + j] + "\"");
          }
          if (p[j] < 0.0) {
            throw SchemaError(at + " (" + kHeader[5 + j] + ")", "value must be non-negative");
          }
        }
        record.blocks.push_back(
            block_from_probabilities(setting, p, kProbabilitySumTol, cells[0]));
      }
    } catch (const MalformedRecord& e) {
      throw SchemaError(at, e.what());
    }
  }
  if (!header_seen) throw SchemaError(where, "missing CSV header");
  if (record.blocks.empty()) throw SchemaError(where, "no basis rows");
  return record;
}

MeasurementRecord load_experiment(const fs::path& path) {
  const std::string text = read_file(path);
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".csv") return parse_experiment_csv(text, path.string());
  return parse_experiment_json(text, path.string());
}

std::string experiment_to_json(const MeasurementRecord& record, AngleUnit unit) {
  const bool all_counts = std::all_of(record.blocks.begin(), record.blocks.end(),
                                      [](const BasisBlock& b) { return b.counts.has_value(); });
  json doc = {{"format", kExperimentFormat},
              {"version", kFormatVersion},
              {"angle_unit", to_string(unit)}};
  if (!record.label.empty()) doc["label"] = record.label;
  if (record.shots) doc["shots"] = *record.shots;
  if (!record.timestamp.empty()) doc["timestamp"] = record.timestamp;
  json bases = json::array();
  for (std::size_t k = 0; k < record.blocks.size(); ++k) {
    const BasisBlock& b = record.blocks[k];
    json entry = setting_to_json(b.setting, unit);
    entry["name"] = b.name.empty() ? "B" + std::to_string(k + 1) : b.name;
    json values = json::object();
    for (std::size_t j = 0; j < 4; ++j) {
      if (all_counts) {
        values[kOutcomeLabels[j]] = (*b.counts)[j];
      } else {
        values[kOutcomeLabels[j]] = b.probabilities[j];
      }
    }
    entry[all_counts ? "counts" : "probabilities"] = std::move(values);
    bases.push_back(std::move(entry));
  }
  doc["bases"] = std::move(bases);
  return doc.dump(2) + "\n";
}

void save_experiment(const fs::path& path, const MeasurementRecord& record, AngleUnit unit) {
  write_file_atomic(path, experiment_to_json(record, unit));
}

Povm parse_povm_json(std::string_view text, const std::string& where) {
  const json doc = parse_json(text, where);
  check_header(doc, kPovmFormat, where);
  reject_unknown(doc, {"format", "version", "name", "angle_unit", "bases", "elements", "description"},
                 where);
  const bool has_bases = doc.contains("bases");
  if (has_bases == doc.contains("elements")) {
    throw SchemaError(where, "exactly one of \"bases\" and \"elements\" is required");
  }
  if (has_bases) {
    const AngleUnit unit = unit_field(doc, where);
    const json& bases = doc["bases"];
    if (!bases.is_array() || bases.empty()) {
      throw SchemaError(field(where, "bases"), "expected a non-empty array");
    }
    std::vector<BasisSetting> settings;
    for (std::size_t k = 0; k < bases.size(); ++k) {
      const std::string at = field(where, "bases") + "[" + std::to_string(k) + "]";
      if (!bases[k].is_object()) throw SchemaError(at, "basis entry must be an object");
      reject_unknown(bases[k], {"name", "theta1", "phi1", "theta2", "phi2"}, at);
      settings.push_back(setting_from_json(bases[k], unit, at));
    }
    return assemble_povm(settings);
  }
  const json& elements = doc["elements"];
  if (!elements.is_array() || elements.empty()) {
    throw SchemaError(field(where, "elements"), "expected a non-empty array");
  }
  std::vector<HermitianOperator> ops;
  for (std::size_t k = 0; k < elements.size(); ++k) {
    const std::string at = field(where, "elements") + "[" + std::to_string(k) + "]";
    ComplexMatrix m = matrix_from_json(elements[k], at);
    if (elements[k].contains("weight")) m *= number(elements[k]["weight"], field(at, "weight"));
    try {
      ops.emplace_back(m);
    } catch (const Error& e) {
      throw SchemaError(at, e.what());
    }
  }
  try {
    return Povm(std::move(ops));
  } catch (const Error& e) {
    throw SchemaError(field(where, "elements"), e.what());
  }
}

std::vector<std::string> builtin_povm_names() { return {"table1", "table2", "minimal-psi-minus"}; }

Povm load_povm(const std::string& spec) {
  if (spec == "table1") return assemble_povm(table1_settings());
  if (spec == "table2") return assemble_povm(table2_settings());
  if (spec == "minimal-psi-minus") return minimal_pure_povm(bell_state(BellLabel::PsiMinus));
  if (!fs::exists(spec)) {
    throw InvalidArgument("unknown POVM \"" + spec +
                          "\": not a builtin (table1, table2, minimal-psi-minus) or a file");
  }
  return parse_povm_json(read_file(spec), spec);
}

std::string povm_to_json(const std::vector<BasisSetting>& settings, const std::string& name,
                         AngleUnit unit) {
  json bases = json::array();
  for (std::size_t k = 0; k < settings.size(); ++k) {
    json entry = setting_to_json(settings[k], unit);
    entry["name"] = "B" + std::to_string(k + 1);
    bases.push_back(std::move(entry));
  }
  const json doc = {{"format", kPovmFormat}, {"version", kFormatVersion}, {"name", name},
                    {"angle_unit", to_string(unit)}, {"bases", std::move(bases)}};
  return doc.dump(2) + "\n";
}

DensityMatrix parse_state_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "werner") {
    const double p = parse_number_arg(arg, "werner");
    return werner_state(p);
  }
  if (spec == "mixed") return DensityMatrix::maximally_mixed(kTwoQubitDim);
  if (kind == "density") {
    const json doc = parse_json(read_file(arg), arg);
    return DensityMatrix(matrix_from_json(doc, arg));
  }
  if (kind == "bloch") {
    const std::vector<std::string> cells = split(arg, ',');
    const GellMannBasis& basis = GellMannBasis::two_qubit();
    if (cells.size() != basis.size()) {
      throw InvalidArgument("bloch vector needs " + std::to_string(basis.size()) +
                            " components, got " + std::to_string(cells.size()));
    }
    BlochVector b{RealVector(cells.size())};
    for (std::size_t i = 0; i < cells.size(); ++i) b.b(i) = parse_number_arg(cells[i], "bloch");
    return bloch_to_density(b, basis);
  }
  return named_state(spec).density();
}

PureState parse_reference(const std::string& spec) {
  if (spec.rfind("vec:", 0) != 0) return named_state(spec);
  const std::vector<std::string> amps = split(std::string_view(spec).substr(4), ';');
  ComplexVector v(amps.size());
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const std::vector<std::string> parts = split(amps[i], ',');
    if (parts.empty() || parts.size() > 2) {
      throw InvalidArgument("amplitude " + std::to_string(i) + " must be \"re\" or \"re,im\"");
    }
    const double re = parse_number_arg(parts[0], "amplitude");
    const double im = parts.size() == 2 ? parse_number_arg(parts[1], "amplitude") : 0.0;
    v(i) = Complex(re, im);
  }
  return PureState::normalized(v);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  std::random_device rd;
  fs::path tmp = path;
  tmp += ".tmp-" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot move output into place at " + path.string());
  }
}

}  // namespace memberscope::io
