#pragma once

// Scenario files, presets, data export and the run/sweep drivers behind the
// command-line tool.
//
// Config format: one `key = value` per line, `#` starts a comment. Keys:
//   name
//   params.<field>          frequencies as `<x>gamma31`, `2pi*<x>MHz` or rad/s;
//                           length_L as `<x>m`, `<x>cm`, `<x>mm` or metres
//   oracle.extent           `<x>gamma31` (bare numbers are gamma31 multiples)
//   oracle.n_points, oracle.window (none | tukey:<alpha>),
//   oracle.force_phi_unity, oracle.ideal_rect, oracle.dispersion (linear | dispersive)
//   outputs.<label>.quantity, .format (csv | json), .t_max_ns, .stride

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sswm/analysis.hpp"
#include "sswm/oracle.hpp"
#include "sswm/params.hpp"

namespace sswm {

enum class Quantity {
  Chi5Spectrum,  // |chi5| over (delta2, delta3)
  RateNumeric,   // oracle R_cc(tau12, tau13)
  RateAnalytic,  // closed form for the operating regime
  CondTau12,     // oracle conditional rate along tau12
  CondTau13,     // oracle conditional rate along tau13
};

std::string to_string(Quantity q);
Quantity parse_quantity(std::string_view s);

enum class Format { Csv, Json };

std::string to_string(Format f);
Format parse_format(std::string_view s);

struct OutputSpec {
  std::string label;
  Quantity quantity = Quantity::RateNumeric;
  Format format = Format::Csv;
  /// Upper time bound of exported samples; 0 picks one from the decay rates.
  double t_max_ns = 0.0;
  /// Keep every stride-th sample; 0 picks one giving at most 256 per axis.
  int stride = 0;

  bool operator==(const OutputSpec&) const = default;
};

struct Scenario {
  std::string name;
  SystemParams params;
  OracleConfig oracle;
  std::vector<OutputSpec> outputs;
};

bool same_params(const SystemParams& a, const SystemParams& b);
bool same_oracle(const OracleConfig& a, const OracleConfig& b);
bool operator==(const Scenario& a, const Scenario& b);

/// Parses config text. Throws ConfigError naming the key and line.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Text that parse_scenario maps back to an identical Scenario.
std::string serialize(const Scenario& s);

/// Frequency in gamma31 units from `<x>gamma31`, `2pi*<x>MHz` or rad/s.
double parse_frequency(std::string_view text, double gamma31_si);
/// Angular frequency in rad/s from the same forms.
double parse_angular_frequency(std::string_view text, double gamma31_si);
/// Length in metres from `<x>m`, `<x>cm`, `<x>mm` or a bare number.
double parse_length(std::string_view text);

/// Directory holding the shipped preset files.
std::filesystem::path scenario_dir();
/// A path to an existing file, or a preset name looked up in scenario_dir().
std::filesystem::path resolve_scenario(const std::string& name_or_path);
std::vector<std::string> list_scenarios();

/// Parameters that run_sweep can vary.
const std::vector<std::string>& sweepable_parameters();
/// Sets one named parameter (internal units). Throws ValidationError for
/// unknown names.
void set_parameter(SystemParams& p, const std::string& name, double value);
double get_parameter(const SystemParams& p, const std::string& name);
/// Parameter names accepted by set_parameter (sweepable ones plus rates).
const std::vector<std::string>& settable_parameters();
/// Parses a sweep value for `name` (frequency syntax for frequencies).
double parse_parameter_value(const std::string& name, std::string_view text, double gamma31_si);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<Format> format;
  std::string file_suffix;
};

struct RunResult {
  std::optional<ObservableReport> report;
  std::vector<Resonance> resonances;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
};

RunResult run_scenario(const Scenario& s, const RunOptions& opt);

struct SweepRow {
  double value = 0.0;
  ObservableReport report;
};

struct SweepResult {
  std::string parameter;
  std::vector<SweepRow> rows;
  std::vector<std::filesystem::path> files;
  std::filesystem::path summary;
};

/// Runs `s` once per value of `parameter`; writes the per-value outputs
/// (suffixed by the value index) and a summary CSV of fitted observables.
SweepResult run_sweep(const Scenario& s, const std::string& parameter,
                      const std::vector<double>& values, const RunOptions& opt);

/// Human-readable summary lines.
void print_report(std::ostream& os, const Scenario& s, const RunResult& r);

/// Writers used by run_scenario; deterministic byte-for-byte.
void write_grid_csv(std::ostream& os, const std::string& scenario, std::uint64_t hash,
                    const RateGrid& g, Eigen::Index stride, double t_max);
void write_trace_csv(std::ostream& os, const std::string& scenario, std::uint64_t hash,
                     double normalization, const TimeTrace& tr, Eigen::Index stride, double t_max);

}  // namespace sswm
