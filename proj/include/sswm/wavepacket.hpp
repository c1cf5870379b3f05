#pragma once

// Closed-form triphoton wavepackets and coincidence rates.
//
// Public times are in seconds; tau12 = tau2 - tau1, tau13 = tau3 - tau1.
// Every amplitude constant is 1, so only peak-normalised comparisons are
// meaningful.

#include <complex>
#include <functional>
#include <string>
#include <type_traits>
#include <vector>

#include "sswm/errors.hpp"
#include "sswm/grid.hpp"
#include "sswm/params.hpp"

namespace sswm {

/// Heaviside step with Theta(0) = 1.
template <typename Scalar>
constexpr Scalar heaviside(Scalar x) {
  return x >= Scalar(0) ? Scalar(1) : Scalar(0);
}

/// Channel weights P1 = i(Omega_e1/2 - i gamma_e1) - gamma51 and
/// P2 = i(-Omega_e1/2 - i gamma_e1) - gamma51, gamma31 units.
struct ChannelWeights {
  std::complex<double> p1;
  std::complex<double> p2;
};

ChannelWeights channel_weights(const DerivedFrequencies& d, const SystemParams& p);

/// Uniform (tau12, tau13) grid; values(i, j) belongs to
/// (tau12_axis[i], tau13_axis[j]). `normalization` is the peak value divided
/// out by normalize_peak (1 when never normalised).
template <typename T>
struct WavepacketGrid {
  Eigen::VectorXd tau12_axis;
  Eigen::VectorXd tau13_axis;
  MatrixX<T> values;
  double normalization = 1.0;

  double dt12() const { return tau12_axis[1] - tau12_axis[0]; }
  double dt13() const { return tau13_axis[1] - tau13_axis[0]; }
};

using AmplitudeGrid = WavepacketGrid<std::complex<double>>;
using RateGrid = WavepacketGrid<double>;

/// Evaluates f(tau12, tau13) on the outer product of two axes.
template <typename Fn>
auto evaluate_grid(const Eigen::VectorXd& tau12_axis, const Eigen::VectorXd& tau13_axis,
                   Fn&& f) {
  using T = std::decay_t<decltype(f(0.0, 0.0))>;
  WavepacketGrid<T> g;
  g.tau12_axis = tau12_axis;
  g.tau13_axis = tau13_axis;
  g.values.resize(tau12_axis.size(), tau13_axis.size());
  for (Eigen::Index j = 0; j < g.values.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.values.rows(); ++i) {
      g.values(i, j) = f(tau12_axis[i], tau13_axis[j]);
    }
  }
  return g;
}

/// Divides a rate grid by its maximum and records the factor.
void normalize_peak(RateGrid& g);

/// |amplitude|^2, keeping the axes.
RateGrid squared_magnitude(const AmplitudeGrid& g);

/// Profile m(tau13) used by the factorisable (cascaded) comparison model.
using Tau13Profile = std::function<double(double)>;

/// Closed forms bound to one parameter set. Construction derives the
/// effective frequencies once; it throws ValidationError when either dressed
/// arm is overdamped (the time-domain forms assume real splittings).
class TriphotonModel {
 public:
  explicit TriphotonModel(const SystemParams& p);

  const SystemParams& params() const { return params_; }
  const DerivedFrequencies& derived() const { return derived_; }
  const ChannelWeights& weights() const { return weights_; }
  double gamma_e3() const { return gamma_e3_; }
  /// Temporal EIT amplitude-loss rate on tau13, 1/s.
  double eit_loss_rate() const { return loss_rate_; }

  /// Four-channel amplitude of the chi5-dominated regime.
  ///
  /// The weights are paired with the exponentials as the residues of the
  /// exp(-i delta tau) transform of chi5 dictate (P2 with +Omega_e1, P1 with
  /// -Omega_e1); the squared magnitude is then exactly twice rcc_chi5.
  std::complex<double> wavepacket_chi5(double tau12, double tau13) const;

  /// Triple-coincidence rate, term by term as in the closed form.
  double rcc_chi5(double tau12, double tau13) const;

  /// Conditional E1-E2 rate (E3 traced out).
  double rcc_cond12(double tau12) const;

  /// Hybrid-regime amplitude: chi5 along tau12, a rectangle of length L/nu3
  /// along tau13 and, unless `ideal_rect`, the line-centre EIT loss.
  std::complex<double> wavepacket_hybrid(double tau12, double tau13, bool ideal_rect = false) const;
  double rcc_hybrid(double tau12, double tau13, bool ideal_rect = false) const;

  /// rcc_cond12(tau12) * m(tau13); factorisable by construction. The default
  /// profile is Theta(tau13) exp(-2 gamma_e2 tau13).
  double rcc_cascaded_stub(double tau12, double tau13, const Tau13Profile& m = {}) const;

  /// True when the closed form being evaluated matches the operating regime;
  /// the forms stay evaluable either way.
  bool in_regime(Regime r) const { return derived_.regime == r; }

  /// Consistency notes raised during construction.
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  SystemParams params_;
  DerivedFrequencies derived_;
  ChannelWeights weights_;
  double gamma_e3_ = 0.0;
  double loss_rate_ = 0.0;
  std::vector<std::string> warnings_;
};

std::complex<double> wavepacket_chi5(double tau12, double tau13, const SystemParams& p);
double rcc_chi5(double tau12, double tau13, const SystemParams& p);
double rcc_cond12(double tau12, const SystemParams& p);
std::complex<double> wavepacket_hybrid(double tau12, double tau13, const SystemParams& p,
                                       bool ideal_rect = false);
double rcc_hybrid(double tau12, double tau13, const SystemParams& p, bool ideal_rect = false);
double rcc_cascaded_stub(double tau12, double tau13, const SystemParams& p,
                         const Tau13Profile& m = {});

}  // namespace sswm
