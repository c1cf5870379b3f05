#pragma once

// Brute-force Fourier evaluation of the triphoton wavepacket and the
// conditional rates from sampled chi5 * Phi. Independent of the closed forms
// in wavepacket.hpp and used as their ground truth.
//
// Transform convention: B(tau12, tau13) = sum chi5 Phi exp(-i(d2 tau12 + d3 tau13)) dd^2.
// The spectral axes are cell-centred on [-extent, extent]; the time axes are
// t_j = (j + 1/2) dt for j in [-N/2, N/2), dt = 2 pi / (N dd), so no sample
// sits on the tau = 0 discontinuity.

#include <string>
#include <vector>

#include "sswm/params.hpp"
#include "sswm/susceptibility.hpp"
#include "sswm/trace.hpp"
#include "sswm/wavepacket.hpp"

namespace sswm {

enum class WindowKind { None, Tukey };

struct Window {
  WindowKind kind = WindowKind::None;
  double alpha = 0.0;
};

std::string to_string(const Window& w);

/// Tukey taper over n samples; alpha = 0 is rectangular, 1 is Hann.
Eigen::VectorXd tukey_window(Eigen::Index n, double alpha);

/// Default half-width factor applied to the widest of Omega_e1, Omega_e2,
/// 2 gamma_e1 and 2 gamma_e2.
inline constexpr double kDefaultExtentFactor = 16.0;
inline constexpr Eigen::Index kDefaultOraclePoints = 2048;

struct OracleConfig {
  /// Spectral half-width in gamma31 units; 0 selects default_extent().
  double extent = 0.0;
  Eigen::Index n_points = kDefaultOraclePoints;
  Window window;
  /// Replace Phi by 1 (chi5-dominated checks).
  bool force_phi_unity = false;
  /// Drop the EIT loss and keep the real, linear mismatch only.
  bool ideal_rect = false;
  /// Mismatch model used when neither flag above is set.
  PhaseMatching dispersion = PhaseMatching::Dispersive;

  void validate() const;
  PhaseMatching phase_matching() const;
};

double default_extent(const DerivedFrequencies& d);

enum class Conditional { Tau12, Tau13 };

class FourierOracle {
 public:
  FourierOracle(const SystemParams& p, const OracleConfig& cfg);

  const SystemParams& params() const { return params_; }
  const OracleConfig& config() const { return cfg_; }
  const DerivedFrequencies& derived() const { return derived_; }

  /// Windowed spectral samples.
  const SpectralGrid<double>& spectrum() const { return spectrum_; }
  double extent() const { return extent_; }
  double spacing() const { return spacing_; }
  /// Sample step of the conjugate time axis, gamma31^-1 units.
  double time_step() const;
  /// Conjugate time axis in seconds, increasing.
  Eigen::VectorXd time_axis() const;

  AmplitudeGrid wavepacket() const;
  /// |wavepacket|^2, optionally peak-normalised.
  RateGrid rate(bool normalize = true) const;
  /// Conditional rate: for each fixed delta_j, transform over delta_i,
  /// square, then sum over delta_j. Peak-normalised.
  TimeTrace conditional(Conditional which) const;

  /// sum |S|^2 dd^2 over the spectral samples.
  double spectral_power() const;
  /// sum |B|^2 dt^2 / (2 pi)^2 over a wavepacket grid from this oracle;
  /// equals spectral_power() for an exact discrete transform.
  double temporal_power(const AmplitudeGrid& b) const;

  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  SystemParams params_;
  OracleConfig cfg_;
  DerivedFrequencies derived_;
  double extent_ = 0.0;
  double spacing_ = 0.0;
  SpectralGrid<double> spectrum_;
  std::vector<std::string> warnings_;
};

AmplitudeGrid wavepacket_numeric(const SystemParams& p, const OracleConfig& cfg);
RateGrid rcc_numeric(const SystemParams& p, const OracleConfig& cfg, bool normalize = true);
TimeTrace rcc_cond_numeric(Conditional which, const SystemParams& p, const OracleConfig& cfg);

}  // namespace sswm
