#pragma once

// Observables extracted from rate grids and time traces. Pure functions.

#include <limits>
#include <string>
#include <vector>

#include "sswm/params.hpp"
#include "sswm/trace.hpp"
#include "sswm/wavepacket.hpp"

namespace sswm {

struct FitOptions {
  /// Maxima below floor x peak are ignored.
  double floor = 1e-3;
  /// Apply a 3-sample median filter before locating maxima.
  bool median_filter = false;
  /// Rectangular classification: samples >= plateau_level x max must cover
  /// at least plateau_fraction of the half-maximum region.
  double plateau_level = 0.9;
  double plateau_fraction = 0.5;
  /// Also rectangular when the half-maximum region has a coefficient of
  /// variation at or below this (an exponential or Gaussian hump sits near
  /// 0.2 and 0.16).
  double plateau_cv = 0.1;
  /// Relative disagreement tolerated between maxima spacing and the
  /// dominant DFT bin before the period is flagged as inconsistent.
  double period_crosscheck_tol = 0.25;
};

/// A local maximum refined by a parabola through its 3-point neighbourhood.
struct Peak {
  Eigen::Index index = 0;
  double t = 0.0;
  double value = 0.0;
};

/// Interior 3-point local maxima at or above floor x peak, in time order.
std::vector<Peak> local_maxima(const TimeTrace& tr, const FitOptions& opt = {});

/// Coherence time in seconds together with the shape used:
///  - Decay: envelope maximal at its first point; log-linear least squares on
///    the envelope (the trace itself when it has fewer than 3 maxima),
///    coherence time = -1/slope.
///  - Rectangular: a plateau; width from onset (first sample above floor x
///    peak) to the trailing half-maximum crossing.
///  - RiseDecay: otherwise; full width of the envelope at 1/e of its peak.
/// Throws InsufficientExtremaError when the trace carries no decay to fit.
TraceFit fit_coherence_time(const TimeTrace& tr, const FitOptions& opt = {});

struct PeriodEstimate {
  double from_maxima = 0.0;  // s, median spacing of successive maxima
  double from_spectrum = 0.0;  // s, dominant non-DC DFT bin
  bool consistent = false;
};

PeriodEstimate estimate_period(const TimeTrace& tr, const FitOptions& opt = {});

/// Median spacing of successive local maxima, seconds. Throws
/// InsufficientExtremaError below 3 maxima.
double extract_period(const TimeTrace& tr, const FitOptions& opt = {});

/// L1 distance between the unit-mass grid and the product of its marginals.
double factorizability_residual(const RateGrid& r);

/// Mass fraction in {tau12 < 0 or tau13 < tau12}.
double ordering_violation_mass(const RateGrid& r);

struct PrecursorOptions {
  double early_fraction = 0.05;
  double median_begin = 0.2;
  double median_end = 0.8;
  double ratio = 1.5;
};

struct PrecursorResult {
  bool detected = false;
  double early_peak = 0.0;
  double median = 0.0;
};

/// Looks for a local maximum in [0, early_fraction x L/nu3] of a tau13 trace
/// exceeding ratio x the median over [median_begin, median_end] x L/nu3.
PrecursorResult find_precursor(const TimeTrace& tr, const DerivedFrequencies& d,
                               const PrecursorOptions& opt = {});
bool detect_precursor(const TimeTrace& tr, const DerivedFrequencies& d,
                      const PrecursorOptions& opt = {});

/// Samples f on a uniform axis.
template <typename Fn>
TimeTrace sample_trace(const Eigen::VectorXd& t_axis, Fn&& f) {
  TimeTrace tr;
  tr.t_axis = t_axis;
  tr.values.resize(t_axis.size());
  for (Eigen::Index i = 0; i < t_axis.size(); ++i) tr.values[i] = f(t_axis[i]);
  return tr;
}

Eigen::VectorXd uniform_axis(double t0, double t1, Eigen::Index n);

/// Samples with t in [t0, t1].
TimeTrace crop(const TimeTrace& tr, double t0, double t1);

TimeTrace marginal_tau12(const RateGrid& r);
TimeTrace marginal_tau13(const RateGrid& r);
/// Column at the first tau12 sample >= tau12.
TimeTrace slice_tau13(const RateGrid& r, double tau12);
/// Sum of R(tau12, tau12 + tau23) over tau12, as a trace in tau23. Requires
/// equal sample steps on both axes.
TimeTrace marginal_tau23(const RateGrid& r);

inline constexpr double kNotFitted = std::numeric_limits<double>::quiet_NaN();

struct ObservableReport {
  double period12 = kNotFitted;
  double period13 = kNotFitted;
  double tau_c_12 = kNotFitted;
  double tau_c_13 = kNotFitted;
  double factorizability_residual = 0.0;
  double ordering_violation_mass = 0.0;
  bool precursor_detected = false;
  /// Which trace the "13" entries describe ("tau13-tau12" or "tau13").
  std::string second_axis;
  std::vector<std::string> notes;
};

/// Period and coherence time along tau12 (marginal) and along the second
/// arm: tau13 - tau12 in the chi5-dominated regime, the tau13 marginal
/// otherwise. Fit failures leave NaN and add a note.
ObservableReport observe(const RateGrid& r, const DerivedFrequencies& d,
                         const FitOptions& opt = {});

}  // namespace sswm
