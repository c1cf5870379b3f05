#include "sswm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unsupported/Eigen/FFT>

#include "sswm/errors.hpp"
#include "sswm/grid.hpp"

namespace sswm {

namespace {

using cplx = std::complex<double>;

// Maps sum_m x_m exp(-i delta_m t_j) onto an FFT. delta_m = delta0 + m dd,
// t_j = (j + 1/2) dt with j in [-N/2, N/2); output index r = j + N/2.
class AxisTransform {
 public:
  AxisTransform(Eigen::Index n, double delta0, double dd) : n_(n), in_(n), out_(n), pre_(n), post_(n) {
    const double dt = 2.0 * kPi / (double(n) * dd);
    for (Eigen::Index m = 0; m < n; ++m) {
      pre_[m] = std::polar(1.0, -kPi * double(m) / double(n));
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      const double t = (double(r - n / 2) + 0.5) * dt;
      post_[r] = std::polar(dd, -delta0 * t);
    }
  }

  // Transforms `x` (length n, stride-free) in place into time order.
  template <typename Vec>
  void apply(Vec&& x) {
    for (Eigen::Index m = 0; m < n_; ++m) in_[m] = x[m] * pre_[m];
    // Eigen's forward FFT uses exp(-2 pi i m k / N), which is the sign we want.
    fft_.fwd(out_, in_);
    for (Eigen::Index r = 0; r < n_; ++r) {
      const Eigen::Index k = ((r - n_ / 2) % n_ + n_) % n_;
      x[r] = out_[k] * post_[r];
    }
  }

 private:
  Eigen::Index n_;
  Eigen::FFT<double> fft_;
  std::vector<cplx> in_;
  std::vector<cplx> out_;
  std::vector<cplx> pre_;
  std::vector<cplx> post_;
};

}  // namespace

std::string to_string(const Window& w) {
  if (w.kind == WindowKind::None) return "none";
  std::ostringstream os;
  os << "tukey(" << w.alpha << ")";
  return os.str();
}

Eigen::VectorXd tukey_window(Eigen::Index n, double alpha) {
  if (n < 2) throw ValidationError("tukey_window: need at least two samples");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("tukey_window: alpha must lie in [0, 1]");
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  if (alpha == 0.0) return w;
  for (Eigen::Index m = 0; m < n; ++m) {
    const double x = double(m) / double(n - 1);
    if (x < 0.5 * alpha) {
      w[m] = 0.5 * (1.0 + std::cos(2.0 * kPi / alpha * (x - 0.5 * alpha)));
    } else if (x > 1.0 - 0.5 * alpha) {
      w[m] = 0.5 * (1.0 + std::cos(2.0 * kPi / alpha * (x - 1.0 + 0.5 * alpha)));
    }
  }
  return w;
}

void OracleConfig::validate() const {
  if (!(std::isfinite(extent) && extent >= 0.0)) {
    throw ValidationError("oracle: extent must be finite and non-negative");
  }
  if (!is_power_of_two(n_points) || n_points < 256) {
    throw ValidationError("oracle: n_points must be a power of two >= 256");
  }
  if (window.kind == WindowKind::Tukey && !(window.alpha >= 0.0 && window.alpha <= 1.0)) {
    throw ValidationError("oracle: Tukey alpha must lie in [0, 1]");
  }
  if (force_phi_unity && ideal_rect) {
    throw ValidationError("oracle: force_phi_unity and ideal_rect are exclusive");
  }
}

PhaseMatching OracleConfig::phase_matching() const {
  if (force_phi_unity) return PhaseMatching::Unity;
  if (ideal_rect) return PhaseMatching::IdealRect;
  return dispersion;
}

double default_extent(const DerivedFrequencies& d) {
  const double widest =
      std::max({d.omega_e1, d.omega_e2, 2.0 * d.gamma_e1, 2.0 * d.gamma_e2});
  return kDefaultExtentFactor * widest;
}

FourierOracle::FourierOracle(const SystemParams& p, const OracleConfig& cfg)
    : params_(p), cfg_(cfg), derived_(derive(p)) {
  cfg_.validate();
  extent_ = cfg_.extent > 0.0 ? cfg_.extent : default_extent(derived_);
  spectrum_ = spectral_grid(params_, extent_, cfg_.n_points, cfg_.phase_matching());
  spacing_ = spectrum_.spacing2();
  warnings_ = spectrum_.warnings;
  if (spectrum_.singular_replacements > 0) {
    warnings_.push_back("replaced " + std::to_string(spectrum_.singular_replacements) +
                        " singular spectral samples");
  }
  const double finest = std::min(derived_.gamma_e1, derived_.gamma_e2);
  if (spacing_ > 0.25 * finest) {
    warnings_.push_back("spectral spacing exceeds a quarter of the narrowest linewidth");
  }
  if (cfg_.window.kind == WindowKind::Tukey && cfg_.window.alpha > 0.0) {
    const Eigen::VectorXd w = tukey_window(cfg_.n_points, cfg_.window.alpha);
    spectrum_.values = (w * w.transpose()).cast<cplx>().cwiseProduct(spectrum_.values);
  }
}

double FourierOracle::time_step() const {
  return 2.0 * kPi / (double(cfg_.n_points) * spacing_);
}

Eigen::VectorXd FourierOracle::time_axis() const {
  const Eigen::Index n = cfg_.n_points;
  const double dt = params_.to_seconds(time_step());
  Eigen::VectorXd t(n);
  for (Eigen::Index r = 0; r < n; ++r) t[r] = (double(r - n / 2) + 0.5) * dt;
  return t;
}

AmplitudeGrid FourierOracle::wavepacket() const {
  const Eigen::Index n = cfg_.n_points;
  AxisTransform tr(n, spectrum_.delta2_axis[0], spacing_);
  MatrixX<cplx> work = spectrum_.values;
  for (Eigen::Index j = 0; j < n; ++j) tr.apply(work.col(j));
  for (Eigen::Index i = 0; i < n; ++i) tr.apply(work.row(i));
  AmplitudeGrid g;
  g.tau12_axis = time_axis();
  g.tau13_axis = g.tau12_axis;
  g.values = std::move(work);
  return g;
}

RateGrid FourierOracle::rate(bool normalize) const {
  RateGrid r = squared_magnitude(wavepacket());
  if (normalize) normalize_peak(r);
  return r;
}

TimeTrace FourierOracle::conditional(Conditional which) const {
  const Eigen::Index n = cfg_.n_points;
  AxisTransform tr(n, spectrum_.delta2_axis[0], spacing_);
  // Rows of `power` are time samples, columns the traced-out frequency.
  Eigen::MatrixXd power(n, n);
  Eigen::VectorXcd line(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    line = which == Conditional::Tau12 ? Eigen::VectorXcd(spectrum_.values.col(k))
                                       : Eigen::VectorXcd(spectrum_.values.row(k).transpose());
    tr.apply(line);
    power.col(k) = line.cwiseAbs2();
  }
  TimeTrace out;
  out.t_axis = time_axis();
  out.values.resize(n);
  std::vector<double> row(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index k = 0; k < n; ++k) row[static_cast<std::size_t>(k)] = power(r, k);
    out.values[r] = pairwise_sum(row) * spacing_;
  }
  return out.normalized();
}

double FourierOracle::spectral_power() const {
  return pairwise_sum(Eigen::MatrixXd(spectrum_.values.cwiseAbs2())) * spacing_ * spacing_;
}

double FourierOracle::temporal_power(const AmplitudeGrid& b) const {
  const double dt = time_step();
  return pairwise_sum(Eigen::MatrixXd(b.values.cwiseAbs2())) * dt * dt / (4.0 * kPi * kPi);
}

AmplitudeGrid wavepacket_numeric(const SystemParams& p, const OracleConfig& cfg) {
  return FourierOracle(p, cfg).wavepacket();
}

RateGrid rcc_numeric(const SystemParams& p, const OracleConfig& cfg, bool normalize) {
  return FourierOracle(p, cfg).rate(normalize);
}

TimeTrace rcc_cond_numeric(Conditional which, const SystemParams& p, const OracleConfig& cfg) {
  return FourierOracle(p, cfg).conditional(which);
}

}  // namespace sswm
