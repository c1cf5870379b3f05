#include "sswm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unsupported/Eigen/FFT>

#include "sswm/errors.hpp"
#include "sswm/grid.hpp"

namespace sswm {

std::string to_string(TraceShape s) {
  switch (s) {
    case TraceShape::Decay: return "decay";
    case TraceShape::RiseDecay: return "rise-decay";
    case TraceShape::Rectangular: return "rectangular";
  }
  return "unknown";
}

void TimeTrace::check() const {
  if (t_axis.size() != values.size()) throw ValidationError("trace: axis and values differ in length");
  if (values.size() < 3) throw ValidationError("trace: need at least three samples");
  if (!is_uniform_axis(t_axis, 1e-9)) throw ValidationError("trace: time axis must be uniform and increasing");
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      throw ValidationError("trace: values must be finite and non-negative");
    }
  }
}

TimeTrace TimeTrace::normalized() const {
  TimeTrace out = *this;
  const double peak = values.size() > 0 ? values.maxCoeff() : 0.0;
  if (!(peak > 0.0)) throw ValidationError("trace: cannot normalise a trace without positive values");
  out.values /= peak;
  return out;
}

namespace {

Eigen::VectorXd median3(const Eigen::VectorXd& v) {
  Eigen::VectorXd out = v;
  for (Eigen::Index i = 1; i + 1 < v.size(); ++i) {
    double a = v[i - 1], b = v[i], c = v[i + 1];
    out[i] = std::max(std::min(a, b), std::min(std::max(a, b), c));
  }
  return out;
}

struct Point {
  double t;
  double v;
};

// Linear interpolation of the time at which the segment p -> q crosses level.
double crossing(const Point& p, const Point& q, double level) {
  if (q.v == p.v) return p.t;
  return p.t + (level - p.v) * (q.t - p.t) / (q.v - p.v);
}

std::vector<Point> to_points(const TimeTrace& tr) {
  std::vector<Point> pts(static_cast<std::size_t>(tr.size()));
  for (Eigen::Index i = 0; i < tr.size(); ++i) pts[static_cast<std::size_t>(i)] = {tr.t_axis[i], tr.values[i]};
  return pts;
}

std::vector<Point> envelope(const TimeTrace& tr, const std::vector<Peak>& maxima) {
  if (maxima.size() < 3) return to_points(tr);
  std::vector<Point> pts;
  pts.reserve(maxima.size());
  for (const auto& m : maxima) pts.push_back({m.t, m.value});
  return pts;
}

std::size_t argmax(const std::vector<Point>& pts) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].v > pts[best].v) best = i;
  }
  return best;
}

bool is_rectangular(const TimeTrace& tr, const FitOptions& opt) {
  const double peak = tr.values.maxCoeff();
  Eigen::Index lo = -1, hi = -1;
  for (Eigen::Index i = 0; i < tr.size(); ++i) {
    if (tr.values[i] >= 0.5 * peak) {
      if (lo < 0) lo = i;
      hi = i;
    }
  }
  if (lo < 0 || hi - lo < 2) return false;
  Eigen::Index flat = 0;
  for (Eigen::Index i = lo; i <= hi; ++i) {
    if (tr.values[i] >= opt.plateau_level * peak) ++flat;
  }
  if (double(flat) >= opt.plateau_fraction * double(hi - lo + 1)) return true;
  // A rippled plateau under an onset overshoot.
  const auto region = tr.values.segment(lo, hi - lo + 1).array();
  const double mean = region.mean();
  const double sd = std::sqrt((region - mean).square().mean());
  return sd <= opt.plateau_cv * mean;
}

TraceFit fit_rectangular(const TimeTrace& tr, const FitOptions& opt) {
  const auto pts = to_points(tr);
  const double peak = tr.values.maxCoeff();
  const double onset_level = opt.floor * peak;
  double onset = pts.front().t;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].v > onset_level) {
      onset = i == 0 ? pts[0].t : crossing(pts[i - 1], pts[i], onset_level);
      break;
    }
  }
  if (pts.back().v >= 0.5 * peak) {
    throw InsufficientExtremaError("coherence fit: plateau never falls to half maximum");
  }
  double trailing = pts.back().t;
  for (std::size_t i = pts.size(); i-- > 1;) {
    if (pts[i - 1].v >= 0.5 * peak) {
      trailing = crossing(pts[i - 1], pts[i], 0.5 * peak);
      break;
    }
  }
  TraceFit fit;
  fit.shape = TraceShape::Rectangular;
  fit.coherence_time = trailing - onset;
  return fit;
}

TraceFit fit_decay(const std::vector<Point>& pts, std::size_t start, double floor_level) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = start; i < pts.size(); ++i) {
    if (!(pts[i].v > floor_level)) continue;
    const double x = pts[i].t;
    const double y = std::log(pts[i].v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw InsufficientExtremaError("coherence fit: fewer than two envelope points above the floor");
  const double dn = double(n);
  const double den = dn * sxx - sx * sx;
  if (!(den > 0.0)) throw InsufficientExtremaError("coherence fit: degenerate envelope abscissae");
  const double slope = (dn * sxy - sx * sy) / den;
  const double intercept = (sy - slope * sx) / dn;
  if (!(slope < 0.0)) throw InsufficientExtremaError("coherence fit: envelope does not decay");

  double ss = 0.0;
  for (std::size_t i = start; i < pts.size(); ++i) {
    if (!(pts[i].v > floor_level)) continue;
    const double r = std::log(pts[i].v) - (intercept + slope * pts[i].t);
    ss += r * r;
  }
  TraceFit fit;
  fit.shape = TraceShape::Decay;
  fit.coherence_time = -1.0 / slope;
  fit.fit_residual = std::sqrt(ss / dn);
  return fit;
}

// The envelope is anchored on the first and last trace samples so that a
// rising edge before the first maximum still yields a crossing.
TraceFit fit_rise_decay(const TimeTrace& tr, std::vector<Point> pts) {
  if (pts.front().t > tr.t_axis[0]) pts.insert(pts.begin(), {tr.t_axis[0], tr.values[0]});
  const Eigen::Index last = tr.size() - 1;
  if (pts.back().t < tr.t_axis[last]) pts.push_back({tr.t_axis[last], tr.values[last]});
  const std::size_t top = argmax(pts);
  const double level = pts[top].v / std::exp(1.0);
  double left = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = top; i-- > 0;) {
    if (pts[i].v < level) {
      left = crossing(pts[i], pts[i + 1], level);
      break;
    }
  }
  double right = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = top + 1; i < pts.size(); ++i) {
    if (pts[i].v < level) {
      right = crossing(pts[i - 1], pts[i], level);
      break;
    }
  }
  if (std::isnan(left) || std::isnan(right)) {
    throw InsufficientExtremaError("coherence fit: envelope does not fall to 1/e on both sides");
  }
  TraceFit fit;
  fit.shape = TraceShape::RiseDecay;
  fit.coherence_time = right - left;
  return fit;
}

}  // namespace

std::vector<Peak> local_maxima(const TimeTrace& tr, const FitOptions& opt) {
  tr.check();
  const Eigen::VectorXd v = opt.median_filter ? median3(tr.values) : tr.values;
  const double threshold = opt.floor * v.maxCoeff();
  const double dt = tr.dt();
  std::vector<Peak> out;
  for (Eigen::Index i = 1; i + 1 < v.size(); ++i) {
    if (!(v[i] > v[i - 1] && v[i] >= v[i + 1])) continue;
    if (v[i] < threshold || v[i] <= 0.0) continue;
    Peak p{i, tr.t_axis[i], v[i]};
    const double den = v[i - 1] - 2.0 * v[i] + v[i + 1];
    if (den < 0.0) {
      const double shift = std::clamp(0.5 * (v[i - 1] - v[i + 1]) / den, -0.5, 0.5);
      p.t += shift * dt;
      p.value = v[i] - 0.25 * (v[i - 1] - v[i + 1]) * shift;
    }
    out.push_back(p);
  }
  return out;
}

TraceFit fit_coherence_time(const TimeTrace& tr, const FitOptions& opt) {
  tr.check();
  const double peak = tr.values.maxCoeff();
  if (!(peak > 0.0)) throw InsufficientExtremaError("coherence fit: trace is identically zero");
  if (is_rectangular(tr, opt)) return fit_rectangular(tr, opt);

  const auto maxima = local_maxima(tr, opt);
  const auto env = envelope(tr, maxima);
  const std::size_t top = argmax(env);
  if (top == 0) return fit_decay(env, 0, opt.floor * peak);
  if (maxima.size() < 3) {
    // A monotone tail after the maximum of a smooth trace is still a decay.
    bool rises = false;
    for (std::size_t i = 0; i < top; ++i) {
      if (env[i].v < env[top].v / std::exp(1.0)) rises = true;
    }
    if (!rises) return fit_decay(env, top, opt.floor * peak);
  }
  return fit_rise_decay(tr, env);
}

PeriodEstimate estimate_period(const TimeTrace& tr, const FitOptions& opt) {
  const auto maxima = local_maxima(tr, opt);
  if (maxima.size() < 3) throw InsufficientExtremaError("period: fewer than three local maxima");
  PeriodEstimate est;
  // Median spacing: a maximum produced by a smoothed onset edge shortens
  // only the first spacing and leaves the median untouched.
  std::vector<double> spacing;
  for (std::size_t i = 1; i < maxima.size(); ++i) spacing.push_back(maxima[i].t - maxima[i - 1].t);
  std::sort(spacing.begin(), spacing.end());
  const std::size_t mid = spacing.size() / 2;
  est.from_maxima = spacing.size() % 2 ? spacing[mid] : 0.5 * (spacing[mid - 1] + spacing[mid]);

  // The DFT covers the span between the first and last maxima, which holds a
  // whole number of periods, after dividing out the envelope interpolated
  // log-linearly between maxima.
  const Eigen::Index first = maxima.front().index;
  const Eigen::Index n = maxima.back().index - first;
  std::vector<double> x(static_cast<std::size_t>(n));
  std::size_t seg = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index idx = first + i;
    while (seg + 2 < maxima.size() && maxima[seg + 1].index <= idx) ++seg;
    const Peak& a = maxima[seg];
    const Peak& b = maxima[seg + 1];
    const double w = double(idx - a.index) / double(b.index - a.index);
    const double env = std::exp((1.0 - w) * std::log(a.value) + w * std::log(b.value));
    x[static_cast<std::size_t>(i)] = tr.values[idx] / env;
  }
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / double(n);
  for (auto& xi : x) xi -= mean;
  std::vector<std::complex<double>> spec;
  Eigen::FFT<double> fft;
  fft.fwd(spec, x);
  Eigen::Index best = 1;
  for (Eigen::Index k = 1; k <= n / 2; ++k) {
    if (std::abs(spec[k]) > std::abs(spec[best])) best = k;
  }
  double k = double(best);
  if (best > 1 && best < n / 2) {
    const double a = std::abs(spec[best - 1]), b = std::abs(spec[best]), c = std::abs(spec[best + 1]);
    const double den = a - 2.0 * b + c;
    if (den < 0.0) k += std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
  }
  est.from_spectrum = double(n) * tr.dt() / k;
  est.consistent = std::abs(est.from_spectrum / est.from_maxima - 1.0) <= opt.period_crosscheck_tol;
  return est;
}

double extract_period(const TimeTrace& tr, const FitOptions& opt) {
  return estimate_period(tr, opt).from_maxima;
}

namespace {

double grid_mass(const Eigen::MatrixXd& v) {
  if ((v.array() < 0.0).any()) throw ValidationError("rate grid has negative entries");
  const double mass = pairwise_sum(v);
  if (!(mass > 0.0)) throw ValidationError("rate grid has zero total mass");
  return mass;
}

}  // namespace

double factorizability_residual(const RateGrid& r) {
  const double mass = grid_mass(r.values);
  const Eigen::MatrixXd p = r.values / mass;
  Eigen::VectorXd m12(p.rows());
  Eigen::VectorXd m13(p.cols());
  for (Eigen::Index i = 0; i < p.rows(); ++i) m12[i] = pairwise_sum(p.row(i));
  for (Eigen::Index j = 0; j < p.cols(); ++j) m13[j] = pairwise_sum(p.col(j));
  return pairwise_sum(Eigen::MatrixXd((p - m12 * m13.transpose()).cwiseAbs()));
}

double ordering_violation_mass(const RateGrid& r) {
  const double mass = grid_mass(r.values);
  Eigen::MatrixXd outside = Eigen::MatrixXd::Zero(r.values.rows(), r.values.cols());
  for (Eigen::Index j = 0; j < r.values.cols(); ++j) {
    for (Eigen::Index i = 0; i < r.values.rows(); ++i) {
      if (r.tau12_axis[i] < 0.0 || r.tau13_axis[j] < r.tau12_axis[i]) outside(i, j) = r.values(i, j);
    }
  }
  return pairwise_sum(outside) / mass;
}

PrecursorResult find_precursor(const TimeTrace& tr, const DerivedFrequencies& d,
                               const PrecursorOptions& opt) {
  tr.check();
  const double T = d.group_delay;
  PrecursorResult res;
  std::vector<double> body;
  for (Eigen::Index i = 0; i < tr.size(); ++i) {
    const double t = tr.t_axis[i];
    if (t >= opt.median_begin * T && t <= opt.median_end * T) body.push_back(tr.values[i]);
  }
  if (body.empty()) return res;
  std::nth_element(body.begin(), body.begin() + long(body.size() / 2), body.end());
  res.median = body[body.size() / 2];

  for (Eigen::Index i = 1; i + 1 < tr.size(); ++i) {
    const double t = tr.t_axis[i];
    if (t < 0.0 || t > opt.early_fraction * T) continue;
    const double v = tr.values[i];
    if (v > tr.values[i - 1] && v >= tr.values[i + 1]) res.early_peak = std::max(res.early_peak, v);
  }
  res.detected = res.early_peak > opt.ratio * res.median;
  return res;
}

bool detect_precursor(const TimeTrace& tr, const DerivedFrequencies& d, const PrecursorOptions& opt) {
  return find_precursor(tr, d, opt).detected;
}

Eigen::VectorXd uniform_axis(double t0, double t1, Eigen::Index n) {
  if (n < 2 || !(t1 > t0)) throw ValidationError("uniform_axis: need n >= 2 and t1 > t0");
  Eigen::VectorXd t(n);
  const double dt = (t1 - t0) / double(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) t[i] = t0 + double(i) * dt;
  return t;
}

TimeTrace crop(const TimeTrace& tr, double t0, double t1) {
  Eigen::Index lo = 0;
  while (lo < tr.size() && tr.t_axis[lo] < t0) ++lo;
  Eigen::Index hi = lo;
  while (hi < tr.size() && tr.t_axis[hi] <= t1) ++hi;
  TimeTrace out;
  out.t_axis = tr.t_axis.segment(lo, hi - lo);
  out.values = tr.values.segment(lo, hi - lo);
  return out;
}

TimeTrace marginal_tau12(const RateGrid& r) {
  TimeTrace tr;
  tr.t_axis = r.tau12_axis;
  tr.values.resize(r.values.rows());
  for (Eigen::Index i = 0; i < r.values.rows(); ++i) tr.values[i] = pairwise_sum(r.values.row(i));
  return tr;
}

TimeTrace marginal_tau13(const RateGrid& r) {
  TimeTrace tr;
  tr.t_axis = r.tau13_axis;
  tr.values.resize(r.values.cols());
  for (Eigen::Index j = 0; j < r.values.cols(); ++j) tr.values[j] = pairwise_sum(r.values.col(j));
  return tr;
}

TimeTrace slice_tau13(const RateGrid& r, double tau12) {
  Eigen::Index i = 0;
  while (i < r.tau12_axis.size() && r.tau12_axis[i] < tau12) ++i;
  if (i == r.tau12_axis.size()) throw ValidationError("slice_tau13: tau12 beyond the grid");
  TimeTrace tr;
  tr.t_axis = r.tau13_axis;
  tr.values = r.values.row(i).transpose();
  return tr;
}

TimeTrace marginal_tau23(const RateGrid& r) {
  const Eigen::Index n12 = r.values.rows();
  const Eigen::Index n13 = r.values.cols();
  const double dt = r.dt12();
  if (std::abs(r.dt13() - dt) > 1e-9 * std::abs(dt)) {
    throw ValidationError("marginal_tau23: tau12 and tau13 steps differ");
  }
  const double offset = r.tau13_axis[0] - r.tau12_axis[0];
  const Eigen::Index nk = n12 + n13 - 1;
  TimeTrace tr;
  tr.t_axis.resize(nk);
  tr.values.resize(nk);
  std::vector<double> diag;
  for (Eigen::Index k = -(n12 - 1); k <= n13 - 1; ++k) {
    diag.clear();
    for (Eigen::Index i = std::max<Eigen::Index>(0, -k); i < n12 && i + k < n13; ++i) {
      diag.push_back(r.values(i, i + k));
    }
    const Eigen::Index out = k + n12 - 1;
    tr.t_axis[out] = offset + double(k) * dt;
    tr.values[out] = pairwise_sum(diag);
  }
  return tr;
}

ObservableReport observe(const RateGrid& r, const DerivedFrequencies& d, const FitOptions& opt) {
  ObservableReport rep;
  const bool chi5 = d.regime == Regime::Chi5Dominated;
  rep.second_axis = chi5 ? "tau13-tau12" : "tau13";

  auto fit_axis = [&](const TimeTrace& full, double& period, double& tau_c, const char* label) {
    const TimeTrace tr = crop(full, 0.0, full.t_axis[full.size() - 1]);
    try {
      period = extract_period(tr, opt);
    } catch (const Error& e) {
      rep.notes.push_back(std::string(label) + " period: " + e.what());
    }
    try {
      tau_c = fit_coherence_time(tr, opt).coherence_time;
    } catch (const Error& e) {
      rep.notes.push_back(std::string(label) + " coherence: " + e.what());
    }
  };

  fit_axis(marginal_tau12(r), rep.period12, rep.tau_c_12, "tau12");
  fit_axis(chi5 ? marginal_tau23(r) : marginal_tau13(r), rep.period13, rep.tau_c_13,
           chi5 ? "tau13-tau12" : "tau13");
  rep.factorizability_residual = factorizability_residual(r);
  rep.ordering_violation_mass = ordering_violation_mass(r);
  if (d.regime == Regime::Hybrid && d.group_delay > 0.0) {
    try {
      rep.precursor_detected = detect_precursor(slice_tau13(r, 0.0), d);
    } catch (const Error& e) {
      rep.notes.push_back(std::string("precursor: ") + e.what());
    }
  }
  return rep;
}

}  // namespace sswm
