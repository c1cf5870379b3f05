// Command-line front end: simulate, sweep, acceptance, list-scenarios.
//
// Exit codes: 0 success, 1 acceptance failure, 2 configuration error,
// 3 compute error.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "sswm/acceptance.hpp"
#include "sswm/errors.hpp"
#include "sswm/scenario.hpp"

namespace {

constexpr int kExitAcceptanceFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCompute = 3;

struct CommonFlags {
  std::string scenario;
  std::string out;
  std::string format;
  bool ideal_rect = false;
  bool force_phi_unity = false;
  long grid_n = 0;
  std::string extent;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--scenario", f.scenario, "preset name or config file")->required();
  cmd->add_option("--out", f.out, "output directory (default $SSWM_OUT_DIR or .)");
  cmd->add_option("--format", f.format, "override output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--ideal-rect", f.ideal_rect, "drop EIT loss from the phase mismatch");
  cmd->add_flag("--force-phi-unity", f.force_phi_unity, "replace the detuning function by 1");
  cmd->add_option("--grid-n", f.grid_n, "oracle points per axis (power of two >= 256)");
  cmd->add_option("--extent", f.extent, "oracle half-width, e.g. 256gamma31");
}

// Loads the scenario and applies command-line overrides; config problems
// surface as ConfigError or ValidationError.
sswm::Scenario prepare(const CommonFlags& f, sswm::RunOptions& run) {
  sswm::Scenario s = sswm::load_scenario(sswm::resolve_scenario(f.scenario));
  if (f.ideal_rect) s.oracle.ideal_rect = true;
  if (f.force_phi_unity) s.oracle.force_phi_unity = true;
  if (f.grid_n > 0) s.oracle.n_points = f.grid_n;
  if (!f.extent.empty()) s.oracle.extent = sswm::parse_frequency(f.extent, s.params.gamma31_si);
  s.oracle.validate();

  if (!f.out.empty()) {
    run.out_dir = f.out;
  } else if (const char* env = std::getenv("SSWM_OUT_DIR"); env && *env) {
    run.out_dir = env;
  }
  if (!f.format.empty()) run.format = sswm::parse_format(f.format);
  return s;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Triphoton wavepacket simulator for spontaneous six-wave mixing"};
  app.require_subcommand(1);

  CommonFlags sim_flags;
  CLI::App* simulate = app.add_subcommand("simulate", "run one scenario and write its outputs");
  add_common(simulate, sim_flags);

  CommonFlags sweep_flags;
  std::string sweep_param;
  std::string sweep_values;
  CLI::App* sweep = app.add_subcommand("sweep", "run a scenario over values of one parameter");
  add_common(sweep, sweep_flags);
  sweep->add_option("--param", sweep_param, "omega_c1 | omega_c2 | optical_depth | delta_p")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values, e.g. 2gamma31,4gamma31")->required();

  std::string criteria;
  std::vector<std::string> scales;
  CLI::App* acceptance = app.add_subcommand("acceptance", "run the acceptance suite");
  acceptance->add_option("--criteria", criteria, "'list' or comma-separated criterion ids");
  acceptance->add_option("--scale", scales, "perturb a parameter, e.g. gamma21=10 (repeatable)");

  CLI::App* list = app.add_subcommand("list-scenarios", "list shipped presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  sswm::RunOptions run;
  sswm::Scenario scenario;
  sswm::AcceptanceOptions acc;
  std::vector<double> values;
  try {
    if (*simulate) scenario = prepare(sim_flags, run);
    if (*sweep) {
      scenario = prepare(sweep_flags, run);
      for (const auto& v : split(sweep_values, ',')) {
        values.push_back(sswm::parse_parameter_value(sweep_param, v, scenario.params.gamma31_si));
      }
    }
    if (*acceptance) {
      if (criteria == "list") {
        for (const auto& c : sswm::acceptance_criteria()) std::cout << c.id << " " << c.name << "\n";
        return 0;
      }
      for (const auto& id : split(criteria, ',')) acc.only.push_back(std::stoi(id));
      for (const auto& s : scales) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw sswm::ConfigError("--scale", 0, "expected name=factor");
        acc.scales[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "sswm: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*list) {
      for (const auto& name : sswm::list_scenarios()) std::cout << name << "\n";
      return 0;
    }
    if (*simulate) {
      const sswm::RunResult r = sswm::run_scenario(scenario, run);
      sswm::print_report(std::cout, scenario, r);
      return 0;
    }
    if (*sweep) {
      const sswm::SweepResult r = sswm::run_sweep(scenario, sweep_param, values, run);
      for (const auto& row : r.rows) {
        std::cout << sweep_param << " = " << row.value << ": period12 " << row.report.period12 * 1e9
                  << " ns, tau_c_12 " << row.report.tau_c_12 * 1e9 << " ns, tau_c_13 "
                  << row.report.tau_c_13 * 1e9 << " ns\n";
      }
      std::cout << "summary " << r.summary.string() << "\n";
      return 0;
    }
    if (*acceptance) {
      const auto results = sswm::run_acceptance(acc, &std::cout);
      std::size_t passed = 0;
      for (const auto& r : results) passed += r.passed ? 1 : 0;
      std::cout << passed << "/" << results.size() << " criteria passed\n";
      return passed == results.size() ? 0 : kExitAcceptanceFailed;
    }
  } catch (const sswm::ValidationError& e) {
    std::cerr << "sswm: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "sswm: " << e.what() << "\n";
    return kExitCompute;
  }
  return 0;
}
