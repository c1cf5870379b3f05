#include "sswm/wavepacket.hpp"

#include <cmath>

#include "sswm/susceptibility.hpp"

namespace sswm {

ChannelWeights channel_weights(const DerivedFrequencies& d, const SystemParams& p) {
  const std::complex<double> i(0.0, 1.0);
  return {i * (0.5 * d.omega_e1 - i * d.gamma_e1) - p.gamma51,
          i * (-0.5 * d.omega_e1 - i * d.gamma_e1) - p.gamma51};
}

void normalize_peak(RateGrid& g) {
  const double peak = g.values.size() > 0 ? g.values.maxCoeff() : 0.0;
  if (!(peak > 0.0)) throw ValidationError("normalize_peak: grid has no positive value");
  g.values /= peak;
  g.normalization *= peak;
}

RateGrid squared_magnitude(const AmplitudeGrid& g) {
  RateGrid r;
  r.tau12_axis = g.tau12_axis;
  r.tau13_axis = g.tau13_axis;
  r.values = g.values.cwiseAbs2();
  return r;
}

TriphotonModel::TriphotonModel(const SystemParams& p) : params_(p), derived_(derive(p)) {
  if (derived_.overdamped()) {
    throw ValidationError("analytic wavepackets need both dressed arms underdamped");
  }
  weights_ = channel_weights(derived_, params_);
  gamma_e3_ = params_.gamma_e3.value_or(params_.gamma51 - derived_.gamma_e1);
  loss_rate_ = p.omega31 / kSpeedOfLight * chi3_eit(0.0, p).imag() * derived_.group_velocity_nu3;
  if (derived_.regime_tie) {
    warnings_.push_back("2 gamma_e2 equals the group-delay bandwidth; regime is borderline");
  }
}

std::complex<double> TriphotonModel::wavepacket_chi5(double tau12, double tau13) const {
  const double t12 = params_.to_internal_time(tau12);
  const double t23 = params_.to_internal_time(tau13) - t12;
  if (heaviside(t12) * heaviside(t23) == 0.0) return 0.0;

  const auto& d = derived_;
  const auto& w = weights_;
  const std::complex<double> i(0.0, 1.0);
  const double a = 0.5 * d.omega_e1 * t12;
  const double b = 0.5 * d.omega_e2 * t23;
  const std::complex<double> sum = w.p2 * std::exp(i * (a + b)) - w.p1 * std::exp(i * (-a + b)) -
                                   w.p2 * std::exp(i * (a - b)) + w.p1 * std::exp(i * (-a - b));
  return std::exp(-d.gamma_e1 * t12 - d.gamma_e2 * t23) * sum;
}

double TriphotonModel::rcc_chi5(double tau12, double tau13) const {
  const double t12 = params_.to_internal_time(tau12);
  const double t23 = params_.to_internal_time(tau13) - t12;
  const double support = heaviside(t12) * heaviside(t23);
  if (support == 0.0) return 0.0;

  const auto& d = derived_;
  const double w = d.omega_e1;
  const double g = params_.gamma51 - d.gamma_e1;
  const double c = std::cos(0.5 * w * t12);
  const double s = std::sin(0.5 * w * t12);
  const double bracket = w * w * c * c + 2.0 * w * g * std::sin(w * t12) + 4.0 * g * g * s * s;
  return std::exp(-2.0 * d.gamma_e1 * t12 - 2.0 * d.gamma_e2 * t23) * bracket *
         (1.0 - std::cos(d.omega_e2 * t23)) * support * support;
}

double TriphotonModel::rcc_cond12(double tau12) const {
  const double t = params_.to_internal_time(tau12);
  if (heaviside(t) == 0.0) return 0.0;
  const double w = derived_.omega_e1;
  const double g = params_.gamma51 - derived_.gamma_e1;
  const double bracket = w * std::cos(0.5 * w * t) + 2.0 * g * std::sin(0.5 * w * t);
  return bracket * bracket * std::exp(-2.0 * derived_.gamma_e1 * t);
}

std::complex<double> TriphotonModel::wavepacket_hybrid(double tau12, double tau13,
                                                       bool ideal_rect) const {
  const double t12 = params_.to_internal_time(tau12);
  const double t13 = params_.to_internal_time(tau13);
  const double rect_len = params_.to_internal_time(derived_.group_delay);
  if (heaviside(t12) * heaviside(t13 - t12) == 0.0) return 0.0;
  if (t13 < 0.0 || t13 > rect_len) return 0.0;

  const double w = derived_.omega_e1;
  const double envelope = 0.5 * w * std::cos(0.5 * w * t12) + gamma_e3_ * std::sin(0.5 * w * t12);
  const double loss = ideal_rect ? 0.0 : loss_rate_ * tau13;
  return envelope * std::exp(-loss - derived_.gamma_e1 * t12);
}

double TriphotonModel::rcc_hybrid(double tau12, double tau13, bool ideal_rect) const {
  return std::norm(wavepacket_hybrid(tau12, tau13, ideal_rect));
}

double TriphotonModel::rcc_cascaded_stub(double tau12, double tau13, const Tau13Profile& m) const {
  if (m) return rcc_cond12(tau12) * m(tau13);
  const double t = params_.to_internal_time(tau13);
  return rcc_cond12(tau12) * heaviside(t) * std::exp(-2.0 * derived_.gamma_e2 * t);
}

std::complex<double> wavepacket_chi5(double tau12, double tau13, const SystemParams& p) {
  return TriphotonModel(p).wavepacket_chi5(tau12, tau13);
}

double rcc_chi5(double tau12, double tau13, const SystemParams& p) {
  return TriphotonModel(p).rcc_chi5(tau12, tau13);
}

double rcc_cond12(double tau12, const SystemParams& p) { return TriphotonModel(p).rcc_cond12(tau12); }

std::complex<double> wavepacket_hybrid(double tau12, double tau13, const SystemParams& p,
                                       bool ideal_rect) {
  return TriphotonModel(p).wavepacket_hybrid(tau12, tau13, ideal_rect);
}

double rcc_hybrid(double tau12, double tau13, const SystemParams& p, bool ideal_rect) {
  return TriphotonModel(p).rcc_hybrid(tau12, tau13, ideal_rect);
}

double rcc_cascaded_stub(double tau12, double tau13, const SystemParams& p,
                         const Tau13Profile& m) {
  return TriphotonModel(p).rcc_cascaded_stub(tau12, tau13, m);
}

}  // namespace sswm
