#pragma once

// The end-to-end acceptance suite: twelve numbered checks against the
// reference observables, each reporting measured values and its tolerance.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sswm/params.hpp"

namespace sswm {

struct CriterionInfo {
  int id = 0;
  std::string name;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string measured;
  std::string tolerance;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  /// Criterion ids to run; empty runs all.
  std::vector<int> only;
  /// Multiplicative perturbations applied to every parameter set, keyed by
  /// parameter name (see settable_parameters()).
  std::map<std::string, double> scales;
};

const std::vector<CriterionInfo>& acceptance_criteria();

/// Reference parameter sets used by the suite.
SystemParams spectrum_params();                // four-peak spectrum, Omega_c = 40
SystemParams chi5_params(double omega_c = 8);  // chi5-dominated, Omega_c1 = Omega_c2
SystemParams hybrid_params(double od = 111);   // Omega_c = 2

/// Runs the selected criteria; failures are entries, never exceptions. When
/// `progress` is set, one line per criterion is written as it completes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {},
                                            std::ostream* progress = nullptr);

std::string format_result(const CriterionResult& r);

}  // namespace sswm
