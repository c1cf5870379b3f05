#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>

namespace sswm {

enum class TraceShape { Decay, RiseDecay, Rectangular };

std::string to_string(TraceShape s);

struct TraceFit {
  double period = 0.0;          // s, 0 when not fitted
  double coherence_time = 0.0;  // s
  double fit_residual = 0.0;    // rms of the log-linear envelope fit (0 for width modes)
  TraceShape shape = TraceShape::Decay;
};

/// Sampled non-negative rate on a uniform, increasing time axis (seconds).
struct TimeTrace {
  Eigen::VectorXd t_axis;
  Eigen::VectorXd values;
  std::optional<TraceFit> fitted;

  Eigen::Index size() const { return values.size(); }
  double dt() const { return t_axis[1] - t_axis[0]; }

  /// Throws ValidationError on shape mismatch, negative values or a
  /// non-uniform axis.
  void check() const;

  /// Copy scaled so that the maximum is 1.
  TimeTrace normalized() const;
};

}  // namespace sswm
