#include "sswm/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>

#include "sswm/errors.hpp"
#include "sswm/wavepacket.hpp"

#ifndef SSWM_SCENARIO_DIR
#define SSWM_SCENARIO_DIR "scenarios"
#endif

namespace sswm {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool ends_with_ci(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && lower(s.substr(s.size() - suffix.size())) == suffix;
}

double parse_number(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ValidationError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

long parse_integer(std::string_view text) {
  text = trim(text);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError("not an integer: '" + std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  throw ValidationError("not a boolean: '" + std::string(text) + "'");
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(h));
  return buf;
}

enum class Kind { Frequency, AngularFrequency, Length, Plain };

struct ParamField {
  const char* key;
  Kind kind;
  bool required;
};

const std::vector<ParamField>& param_fields() {
  static const std::vector<ParamField> fields = {
      {"gamma31", Kind::AngularFrequency, true},
      {"gamma21", Kind::Frequency, true},
      {"gamma41", Kind::Frequency, true},
      {"gamma42", Kind::Frequency, false},
      {"gamma51", Kind::Frequency, true},
      {"gamma52", Kind::Frequency, false},
      {"gamma53", Kind::Frequency, false},
      {"gamma54", Kind::Frequency, false},
      {"omega_p", Kind::Frequency, false},
      {"omega_c1", Kind::Frequency, true},
      {"omega_c2", Kind::Frequency, true},
      {"delta_p", Kind::Frequency, true},
      {"delta_c1", Kind::Frequency, false},
      {"delta_c2", Kind::Frequency, false},
      {"length_L", Kind::Length, true},
      {"optical_depth", Kind::Plain, true},
      {"omega21", Kind::AngularFrequency, false},
      {"omega31", Kind::AngularFrequency, false},
      {"dipole_scale", Kind::Plain, false},
      {"gamma_e3", Kind::Frequency, false},
  };
  return fields;
}

void assign(SystemParams& p, const std::string& key, double v) {
  if (key == "gamma31") p.gamma31_si = v;
  else if (key == "omega21") p.omega21 = v;
  else if (key == "omega31") p.omega31 = v;
  else if (key == "dipole_scale") p.dipole_scale = v;
  else if (key == "gamma_e3") p.gamma_e3 = v;
  else set_parameter(p, key, v);
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

}  // namespace

std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::Chi5Spectrum: return "chi5_spectrum";
    case Quantity::RateNumeric: return "rate_numeric";
    case Quantity::RateAnalytic: return "rate_analytic";
    case Quantity::CondTau12: return "cond_tau12";
    case Quantity::CondTau13: return "cond_tau13";
  }
  return "unknown";
}

Quantity parse_quantity(std::string_view s) {
  for (Quantity q : {Quantity::Chi5Spectrum, Quantity::RateNumeric, Quantity::RateAnalytic,
                     Quantity::CondTau12, Quantity::CondTau13}) {
    if (to_string(q) == trim(s)) return q;
  }
  throw ValidationError("unknown quantity '" + std::string(s) + "'");
}

std::string to_string(Format f) { return f == Format::Csv ? "csv" : "json"; }

Format parse_format(std::string_view s) {
  const std::string t = lower(trim(s));
  if (t == "csv") return Format::Csv;
  if (t == "json") return Format::Json;
  throw ValidationError("unknown format '" + std::string(s) + "'");
}

double parse_angular_frequency(std::string_view text, double gamma31_si) {
  text = trim(text);
  if (ends_with_ci(text, "gamma31")) {
    return parse_number(text.substr(0, text.size() - 7)) * gamma31_si;
  }
  if (lower(text.substr(0, 4)) == "2pi*" && ends_with_ci(text, "mhz")) {
    return 2.0 * kPi * 1e6 * parse_number(text.substr(4, text.size() - 7));
  }
  return parse_number(text);
}

double parse_frequency(std::string_view text, double gamma31_si) {
  text = trim(text);
  if (ends_with_ci(text, "gamma31")) return parse_number(text.substr(0, text.size() - 7));
  return parse_angular_frequency(text, gamma31_si) / gamma31_si;
}

double parse_length(std::string_view text) {
  text = trim(text);
  if (ends_with_ci(text, "mm")) return 1e-3 * parse_number(text.substr(0, text.size() - 2));
  if (ends_with_ci(text, "cm")) return 1e-2 * parse_number(text.substr(0, text.size() - 2));
  if (ends_with_ci(text, "m")) return parse_number(text.substr(0, text.size() - 1));
  return parse_number(text);
}

const std::vector<std::string>& sweepable_parameters() {
  static const std::vector<std::string> names = {"omega_c1", "omega_c2", "optical_depth", "delta_p"};
  return names;
}

const std::vector<std::string>& settable_parameters() {
  static const std::vector<std::string> names = {
      "omega_c1", "omega_c2", "optical_depth", "delta_p", "omega_p", "gamma21", "gamma41",
      "gamma42",  "gamma51",  "gamma52",       "gamma53", "gamma54", "delta_c1", "delta_c2",
      "length_L"};
  return names;
}

void set_parameter(SystemParams& p, const std::string& name, double v) {
  if (name == "omega_c1") p.omega_c1 = v;
  else if (name == "omega_c2") p.omega_c2 = v;
  else if (name == "omega_p") p.omega_p = v;
  else if (name == "optical_depth") p.optical_depth = v;
  else if (name == "delta_p") p.delta_p = v;
  else if (name == "delta_c1") p.delta_c1 = v;
  else if (name == "delta_c2") p.delta_c2 = v;
  else if (name == "gamma21") p.gamma21 = v;
  else if (name == "gamma41") p.gamma41 = v;
  else if (name == "gamma42") p.gamma42 = v;
  else if (name == "gamma51") p.gamma51 = v;
  else if (name == "gamma52") p.gamma52 = v;
  else if (name == "gamma53") p.gamma53 = v;
  else if (name == "gamma54") p.gamma54 = v;
  else if (name == "length_L") p.length_L = v;
  else throw ValidationError("unknown parameter '" + name + "'");
}

double get_parameter(const SystemParams& p, const std::string& name) {
  if (name == "omega_c1") return p.omega_c1.real();
  if (name == "omega_c2") return p.omega_c2.real();
  if (name == "omega_p") return p.omega_p.real();
  if (name == "optical_depth") return p.optical_depth;
  if (name == "delta_p") return p.delta_p;
  if (name == "delta_c1") return p.delta_c1;
  if (name == "delta_c2") return p.delta_c2;
  if (name == "gamma21") return p.gamma21;
  if (name == "gamma41") return p.gamma41;
  if (name == "gamma42") return p.gamma42;
  if (name == "gamma51") return p.gamma51;
  if (name == "gamma52") return p.gamma52;
  if (name == "gamma53") return p.gamma53;
  if (name == "gamma54") return p.gamma54;
  if (name == "length_L") return p.length_L;
  throw ValidationError("unknown parameter '" + name + "'");
}

double parse_parameter_value(const std::string& name, std::string_view text, double gamma31_si) {
  if (name == "optical_depth") return parse_number(text);
  if (name == "length_L") return parse_length(text);
  get_parameter(SystemParams{}, name);
  return parse_frequency(text, gamma31_si);
}

bool same_params(const SystemParams& a, const SystemParams& b) {
  return param_hash(a) == param_hash(b);
}

bool same_oracle(const OracleConfig& a, const OracleConfig& b) {
  return a.extent == b.extent && a.n_points == b.n_points && a.window.kind == b.window.kind &&
         a.window.alpha == b.window.alpha && a.force_phi_unity == b.force_phi_unity &&
         a.ideal_rect == b.ideal_rect && a.dispersion == b.dispersion;
}

bool operator==(const Scenario& a, const Scenario& b) {
  return a.name == b.name && same_params(a.params, b.params) && same_oracle(a.oracle, b.oracle) &&
         a.outputs == b.outputs;
}

Scenario parse_scenario(std::string_view text) {
  std::map<std::string, Entry> entries;
  std::vector<std::string> output_labels;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("", line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("", line_no, "empty key");
    if (value.empty()) throw ConfigError(key, line_no, "empty value");
    if (entries.count(key)) throw ConfigError(key, line_no, "duplicate key");
    entries[key] = {value, line_no, false};
    if (key.rfind("outputs.", 0) == 0) {
      const auto dot = key.find('.', 8);
      if (dot == std::string::npos) throw ConfigError(key, line_no, "expected outputs.<label>.<field>");
      const std::string label = key.substr(8, dot - 8);
      if (std::find(output_labels.begin(), output_labels.end(), label) == output_labels.end()) {
        output_labels.push_back(label);
      }
    }
  }

  auto take = [&](const std::string& key) -> Entry* {
    auto it = entries.find(key);
    if (it == entries.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  };
  auto convert = [](const std::string& key, const Entry& e, auto&& fn) {
    try {
      return fn(e.value);
    } catch (const ValidationError& err) {
      throw ConfigError(key, e.line, err.what());
    }
  };

  Scenario s;
  const Entry* name = take("name");
  if (!name) throw ConfigError("name", 0, "missing required key");
  s.name = name->value;
  for (char c : s.name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) {
      throw ConfigError("name", name->line, "name may hold letters, digits, '_', '-' and '.' only");
    }
  }

  // gamma31 first: every other frequency is expressed relative to it.
  for (const auto& f : param_fields()) {
    const std::string key = std::string("params.") + f.key;
    Entry* e = take(key);
    if (!e) {
      if (f.required) throw ConfigError(key, 0, "missing required key");
      continue;
    }
    const double g31 = s.params.gamma31_si;
    const double v = convert(key, *e, [&](const std::string& t) {
      switch (f.kind) {
        case Kind::Frequency: return parse_frequency(t, g31);
        case Kind::AngularFrequency:
          if (std::string_view(f.key) == "gamma31" && ends_with_ci(t, "gamma31")) {
            throw ValidationError("gamma31 must be given in rad/s or 2pi*<x>MHz");
          }
          return parse_angular_frequency(t, g31);
        case Kind::Length: return parse_length(t);
        case Kind::Plain: return parse_number(t);
      }
      return 0.0;
    });
    assign(s.params, f.key, v);
  }
  try {
    s.params.validate();
  } catch (const ValidationError& err) {
    throw ConfigError("params", 0, err.what());
  }

  if (Entry* e = take("oracle.extent")) {
    s.oracle.extent = convert("oracle.extent", *e, [](const std::string& t) {
      return ends_with_ci(t, "gamma31") ? parse_number(std::string_view(t).substr(0, t.size() - 7))
                                        : parse_number(t);
    });
  }
  if (Entry* e = take("oracle.n_points")) {
    s.oracle.n_points = convert("oracle.n_points", *e, [](const std::string& t) { return parse_integer(t); });
  }
  if (Entry* e = take("oracle.window")) {
    s.oracle.window = convert("oracle.window", *e, [](const std::string& t) {
      const std::string l = lower(t);
      if (l == "none") return Window{};
      if (l.rfind("tukey:", 0) == 0) return Window{WindowKind::Tukey, parse_number(std::string_view(l).substr(6))};
      throw ValidationError("expected 'none' or 'tukey:<alpha>'");
    });
  }
  if (Entry* e = take("oracle.force_phi_unity")) {
    s.oracle.force_phi_unity = convert("oracle.force_phi_unity", *e, [](const std::string& t) { return parse_bool(t); });
  }
  if (Entry* e = take("oracle.ideal_rect")) {
    s.oracle.ideal_rect = convert("oracle.ideal_rect", *e, [](const std::string& t) { return parse_bool(t); });
  }
  if (Entry* e = take("oracle.dispersion")) {
    s.oracle.dispersion = convert("oracle.dispersion", *e, [](const std::string& t) {
      const std::string l = lower(t);
      if (l == "linear") return PhaseMatching::Linear;
      if (l == "dispersive") return PhaseMatching::Dispersive;
      throw ValidationError("expected 'linear' or 'dispersive'");
    });
  }
  try {
    s.oracle.validate();
  } catch (const ValidationError& err) {
    throw ConfigError("oracle", 0, err.what());
  }

  for (const auto& label : output_labels) {
    OutputSpec o;
    o.label = label;
    const std::string prefix = "outputs." + label + ".";
    Entry* q = take(prefix + "quantity");
    if (!q) throw ConfigError(prefix + "quantity", 0, "missing required key");
    o.quantity = convert(prefix + "quantity", *q, [](const std::string& t) { return parse_quantity(t); });
    if (Entry* e = take(prefix + "format")) {
      o.format = convert(prefix + "format", *e, [](const std::string& t) { return parse_format(t); });
    }
    if (Entry* e = take(prefix + "t_max_ns")) {
      o.t_max_ns = convert(prefix + "t_max_ns", *e, [](const std::string& t) {
        const double v = parse_number(t);
        if (v < 0.0) throw ValidationError("must be non-negative");
        return v;
      });
    }
    if (Entry* e = take(prefix + "stride")) {
      o.stride = static_cast<int>(convert(prefix + "stride", *e, [](const std::string& t) {
        const long v = parse_integer(t);
        if (v < 0) throw ValidationError("must be non-negative");
        return v;
      }));
    }
    s.outputs.push_back(o);
  }

  for (const auto& [key, e] : entries) {
    if (!e.used) throw ConfigError(key, e.line, "unknown key");
  }
  return s;
}

Scenario load_scenario(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string serialize(const Scenario& s) {
  std::ostringstream os;
  const SystemParams& p = s.params;
  os << "name = " << s.name << "\n";
  os << "params.gamma31 = " << num(p.gamma31_si) << "\n";
  for (const auto& f : param_fields()) {
    const std::string key = f.key;
    if (key == "gamma31") continue;
    std::string value;
    if (key == "omega21") {
      if (!p.omega21) continue;
      value = num(*p.omega21);
    } else if (key == "omega31") {
      value = num(p.omega31);
    } else if (key == "dipole_scale") {
      value = num(p.dipole_scale);
    } else if (key == "gamma_e3") {
      if (!p.gamma_e3) continue;
      value = num(*p.gamma_e3) + "gamma31";
    } else if (f.kind == Kind::Length) {
      value = num(get_parameter(p, key)) + "m";
    } else if (f.kind == Kind::Plain) {
      value = num(get_parameter(p, key));
    } else {
      value = num(get_parameter(p, key)) + "gamma31";
    }
    os << "params." << key << " = " << value << "\n";
  }
  const OracleConfig& o = s.oracle;
  os << "oracle.extent = " << num(o.extent) << "gamma31\n";
  os << "oracle.n_points = " << o.n_points << "\n";
  os << "oracle.window = "
     << (o.window.kind == WindowKind::None ? std::string("none") : "tukey:" + num(o.window.alpha)) << "\n";
  os << "oracle.force_phi_unity = " << (o.force_phi_unity ? "true" : "false") << "\n";
  os << "oracle.ideal_rect = " << (o.ideal_rect ? "true" : "false") << "\n";
  os << "oracle.dispersion = " << (o.dispersion == PhaseMatching::Linear ? "linear" : "dispersive") << "\n";
  for (const auto& out : s.outputs) {
    const std::string prefix = "outputs." + out.label + ".";
    os << prefix << "quantity = " << to_string(out.quantity) << "\n";
    os << prefix << "format = " << to_string(out.format) << "\n";
    os << prefix << "t_max_ns = " << num(out.t_max_ns) << "\n";
    os << prefix << "stride = " << out.stride << "\n";
  }
  return os.str();
}

fs::path scenario_dir() {
  if (const char* env = std::getenv("SSWM_SCENARIO_DIR"); env && *env) return env;
  return SSWM_SCENARIO_DIR;
}

fs::path resolve_scenario(const std::string& name_or_path) {
  const fs::path direct(name_or_path);
  if (fs::is_regular_file(direct)) return direct;
  const fs::path preset = scenario_dir() / (name_or_path + ".cfg");
  if (fs::is_regular_file(preset)) return preset;
  throw ConfigError("scenario", 0, "no scenario file or preset named '" + name_or_path + "'");
}

std::vector<std::string> list_scenarios() {
  std::vector<std::string> names;
  const fs::path dir = scenario_dir();
  if (!fs::is_directory(dir)) return names;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".cfg") names.push_back(e.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

namespace {

std::vector<Eigen::Index> select(const Eigen::VectorXd& axis, double t0, double t1, Eigen::Index stride) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < axis.size(); ++i) {
    if (axis[i] >= t0 && axis[i] <= t1) idx.push_back(i);
  }
  if (stride <= 0) stride = std::max<Eigen::Index>(1, (Eigen::Index(idx.size()) + 255) / 256);
  std::vector<Eigen::Index> out;
  for (std::size_t k = 0; k < idx.size(); k += static_cast<std::size_t>(stride)) out.push_back(idx[k]);
  return out;
}

void header(std::ostream& os, const std::string& scenario, std::uint64_t hash, double normalization) {
  os << "# scenario: " << scenario << "\n";
  os << "# param_hash: " << hex(hash) << "\n";
  os << "# normalization: " << num(normalization) << "\n";
}

nlohmann::json grid_json(const std::string& scenario, std::uint64_t hash, const RateGrid& g,
                         Eigen::Index stride, double t_max) {
  const auto rows = select(g.tau12_axis, 0.0, t_max, stride);
  const auto cols = select(g.tau13_axis, 0.0, t_max, stride);
  nlohmann::json j;
  j["scenario"] = scenario;
  j["param_hash"] = hex(hash);
  j["normalization"] = g.normalization;
  auto& a12 = j["tau12_s"] = nlohmann::json::array();
  for (auto i : rows) a12.push_back(g.tau12_axis[i]);
  auto& a13 = j["tau13_s"] = nlohmann::json::array();
  for (auto c : cols) a13.push_back(g.tau13_axis[c]);
  auto& vals = j["values"] = nlohmann::json::array();
  for (auto i : rows) {
    nlohmann::json row = nlohmann::json::array();
    for (auto c : cols) row.push_back(g.values(i, c));
    vals.push_back(std::move(row));
  }
  return j;
}

nlohmann::json trace_json(const std::string& scenario, std::uint64_t hash, double normalization,
                          const TimeTrace& tr, Eigen::Index stride, double t_max) {
  nlohmann::json j;
  j["scenario"] = scenario;
  j["param_hash"] = hex(hash);
  j["normalization"] = normalization;
  auto& t = j["t_s"] = nlohmann::json::array();
  auto& v = j["values"] = nlohmann::json::array();
  for (auto i : select(tr.t_axis, 0.0, t_max, stride)) {
    t.push_back(tr.t_axis[i]);
    v.push_back(tr.values[i]);
  }
  return j;
}

void write_spectrum(std::ostream& os, Format f, const std::string& scenario, const SpectralGrid<double>& g,
                    Eigen::Index stride) {
  const Eigen::MatrixXd mag = g.values.cwiseAbs();
  const double peak = mag.maxCoeff();
  const double inf = std::numeric_limits<double>::infinity();
  const auto rows = select(g.delta2_axis, -inf, inf, stride);
  const auto cols = select(g.delta3_axis, -inf, inf, stride);
  if (f == Format::Json) {
    nlohmann::json j;
    j["scenario"] = scenario;
    j["param_hash"] = hex(g.param_hash);
    j["normalization"] = peak;
    auto& d2 = j["delta2_gamma31"] = nlohmann::json::array();
    for (auto i : rows) d2.push_back(g.delta2_axis[i]);
    auto& d3 = j["delta3_gamma31"] = nlohmann::json::array();
    for (auto c : cols) d3.push_back(g.delta3_axis[c]);
    auto& vals = j["abs_chi5"] = nlohmann::json::array();
    for (auto i : rows) {
      nlohmann::json row = nlohmann::json::array();
      for (auto c : cols) row.push_back(mag(i, c) / peak);
      vals.push_back(std::move(row));
    }
    os << j.dump(1) << "\n";
    return;
  }
  header(os, scenario, g.param_hash, peak);
  os << "delta2_gamma31,delta3_gamma31,abs_chi5\n";
  for (auto i : rows) {
    for (auto c : cols) os << num(g.delta2_axis[i]) << "," << num(g.delta3_axis[c]) << "," << num(mag(i, c) / peak) << "\n";
  }
}

double auto_t_max(const DerivedFrequencies& d, const SystemParams& p) {
  double t = 8.0 / (2.0 * std::min(d.gamma_e1, d.gamma_e2));
  if (d.regime != Regime::Chi5Dominated) t = std::max(t, 1.5 * p.to_internal_time(d.group_delay));
  return p.to_seconds(t);
}

RateGrid analytic_grid(const SystemParams& p, const OracleConfig& cfg, const RateGrid& numeric, double t_max) {
  const TriphotonModel m(p);
  Eigen::VectorXd ax12 = numeric.tau12_axis;
  Eigen::VectorXd ax13 = numeric.tau13_axis;
  const bool chi5 = m.derived().regime == Regime::Chi5Dominated;
  RateGrid g = evaluate_grid(ax12, ax13, [&](double a, double b) {
    if (a < 0.0 || b < 0.0 || a > t_max || b > t_max) return 0.0;
    return chi5 ? m.rcc_chi5(a, b) : m.rcc_hybrid(a, b, cfg.ideal_rect);
  });
  normalize_peak(g);
  return g;
}

}  // namespace

void write_grid_csv(std::ostream& os, const std::string& scenario, std::uint64_t hash, const RateGrid& g,
                    Eigen::Index stride, double t_max) {
  header(os, scenario, hash, g.normalization);
  os << "tau12_s,tau13_s,value\n";
  const auto rows = select(g.tau12_axis, 0.0, t_max, stride);
  const auto cols = select(g.tau13_axis, 0.0, t_max, stride);
  for (auto i : rows) {
    for (auto c : cols) os << num(g.tau12_axis[i]) << "," << num(g.tau13_axis[c]) << "," << num(g.values(i, c)) << "\n";
  }
}

void write_trace_csv(std::ostream& os, const std::string& scenario, std::uint64_t hash, double normalization,
                     const TimeTrace& tr, Eigen::Index stride, double t_max) {
  header(os, scenario, hash, normalization);
  os << "t_s,value\n";
  for (auto i : select(tr.t_axis, 0.0, t_max, stride)) os << num(tr.t_axis[i]) << "," << num(tr.values[i]) << "\n";
}

RunResult run_scenario(const Scenario& s, const RunOptions& opt) {
  RunResult res;
  const SystemParams& p = s.params;
  const DerivedFrequencies d = derive(p);
  const std::uint64_t hash = param_hash(p);
  fs::create_directories(opt.out_dir);

  auto open = [&](const OutputSpec& o, Format f) {
    const fs::path path = opt.out_dir / (s.name + opt.file_suffix + "_" + o.label + (f == Format::Csv ? ".csv" : ".json"));
    res.files.push_back(path);
    auto os = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*os) throw Error("cannot write " + path.string());
    return os;
  };

  const bool needs_time =
      std::any_of(s.outputs.begin(), s.outputs.end(), [](const OutputSpec& o) { return o.quantity != Quantity::Chi5Spectrum; });

  if (std::any_of(s.outputs.begin(), s.outputs.end(), [](const OutputSpec& o) { return o.quantity == Quantity::Chi5Spectrum; })) {
    const double extent = s.oracle.extent > 0.0 ? s.oracle.extent : default_extent(d);
    const SpectralGrid<double> g = spectral_grid(p, extent, s.oracle.n_points, PhaseMatching::Unity);
    res.resonances = find_resonances(g);
    res.warnings.insert(res.warnings.end(), g.warnings.begin(), g.warnings.end());
    for (const auto& o : s.outputs) {
      if (o.quantity != Quantity::Chi5Spectrum) continue;
      const Format f = opt.format.value_or(o.format);
      write_spectrum(*open(o, f), f, s.name, g, o.stride);
    }
  }
  if (!needs_time) return res;

  const FourierOracle oracle(p, s.oracle);
  res.warnings.insert(res.warnings.end(), oracle.warnings().begin(), oracle.warnings().end());
  const RateGrid rate = oracle.rate(true);
  res.report = observe(rate, d);

  for (const auto& o : s.outputs) {
    if (o.quantity == Quantity::Chi5Spectrum) continue;
    const Format f = opt.format.value_or(o.format);
    const double t_max = o.t_max_ns > 0.0 ? o.t_max_ns * 1e-9 : auto_t_max(d, p);
    auto os = open(o, f);
    switch (o.quantity) {
      case Quantity::RateNumeric:
      case Quantity::RateAnalytic: {
        const RateGrid g = o.quantity == Quantity::RateNumeric ? rate : analytic_grid(p, s.oracle, rate, t_max);
        if (f == Format::Json) *os << grid_json(s.name, hash, g, o.stride, t_max).dump(1) << "\n";
        else write_grid_csv(*os, s.name, hash, g, o.stride, t_max);
        break;
      }
      case Quantity::CondTau12:
      case Quantity::CondTau13: {
        const TimeTrace tr = oracle.conditional(o.quantity == Quantity::CondTau12 ? Conditional::Tau12 : Conditional::Tau13);
        const Eigen::Index stride = o.stride > 0 ? o.stride : 1;
        if (f == Format::Json) *os << trace_json(s.name, hash, 1.0, tr, stride, t_max).dump(1) << "\n";
        else write_trace_csv(*os, s.name, hash, 1.0, tr, stride, t_max);
        break;
      }
      case Quantity::Chi5Spectrum:
        break;
    }
  }
  return res;
}

SweepResult run_sweep(const Scenario& s, const std::string& parameter, const std::vector<double>& values,
                      const RunOptions& opt) {
  const auto& names = sweepable_parameters();
  if (std::find(names.begin(), names.end(), parameter) == names.end()) {
    throw ValidationError("parameter '" + parameter + "' cannot be swept");
  }
  if (values.empty()) throw ValidationError("sweep needs at least one value");

  SweepResult out;
  out.parameter = parameter;
  for (std::size_t i = 0; i < values.size(); ++i) {
    Scenario run = s;
    set_parameter(run.params, parameter, values[i]);
    RunOptions ro = opt;
    ro.file_suffix = opt.file_suffix + "_" + parameter + "-" + std::to_string(i);
    RunResult r = run_scenario(run, ro);
    out.files.insert(out.files.end(), r.files.begin(), r.files.end());
    out.rows.push_back({values[i], r.report.value_or(ObservableReport{})});
  }

  fs::create_directories(opt.out_dir);
  out.summary = opt.out_dir / (s.name + opt.file_suffix + "_sweep_" + parameter + ".csv");
  std::ofstream os(out.summary, std::ios::binary);
  if (!os) throw Error("cannot write " + out.summary.string());
  header(os, s.name, param_hash(s.params), 1.0);
  const std::string unit = parameter == "optical_depth" ? "" : "_gamma31";
  os << parameter << unit
     << ",period12_s,period13_s,tau_c_12_s,tau_c_13_s,factorizability_residual,ordering_violation_mass,precursor_detected\n";
  for (const auto& row : out.rows) {
    const auto& r = row.report;
    os << num(row.value) << "," << num(r.period12) << "," << num(r.period13) << "," << num(r.tau_c_12) << ","
       << num(r.tau_c_13) << "," << num(r.factorizability_residual) << "," << num(r.ordering_violation_mass) << ","
       << (r.precursor_detected ? 1 : 0) << "\n";
  }
  return out;
}

void print_report(std::ostream& os, const Scenario& s, const RunResult& r) {
  const DerivedFrequencies d = derive(s.params);
  char buf[256];
  os << "scenario " << s.name << " (param hash " << hex(param_hash(s.params)) << ")\n";
  std::snprintf(buf, sizeof buf,
                "  regime %s; Omega_e1 = %.4g, Omega_e2 = %.4g, gamma_e1 = %.4g, gamma_e2 = %.4g (gamma31 units)\n",
                to_string(d.regime).c_str(), d.omega_e1, d.omega_e2, d.gamma_e1, d.gamma_e2);
  os << buf;
  if (!r.resonances.empty()) {
    os << "  " << r.resonances.size() << " spectral peaks:";
    for (const auto& pk : r.resonances) {
      std::snprintf(buf, sizeof buf, " (%.3g, %.3g)", pk.delta2, pk.delta3);
      os << buf;
    }
    os << "\n";
  }
  if (r.report) {
    const auto& rep = *r.report;
    std::snprintf(buf, sizeof buf, "  tau12: period %.4g ns, coherence %.4g ns\n", rep.period12 * 1e9,
                  rep.tau_c_12 * 1e9);
    os << buf;
    std::snprintf(buf, sizeof buf, "  %s: period %.4g ns, coherence %.4g ns\n", rep.second_axis.c_str(),
                  rep.period13 * 1e9, rep.tau_c_13 * 1e9);
    os << buf;
    std::snprintf(buf, sizeof buf, "  factorizability residual %.4g, ordering violation %.3g, precursor %s\n",
                  rep.factorizability_residual, rep.ordering_violation_mass, rep.precursor_detected ? "yes" : "no");
    os << buf;
    for (const auto& n : rep.notes) os << "  note: " << n << "\n";
  }
  for (const auto& w : r.warnings) os << "  warning: " << w << "\n";
  for (const auto& f : r.files) os << "  wrote " << f.string() << "\n";
}

}  // namespace sswm
