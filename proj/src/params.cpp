#include "sswm/params.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "sswm/errors.hpp"

namespace sswm {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

bool finite(std::complex<double> z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

ArmSplitting arm(std::complex<double> omega_c, double gamma_a, double gamma_b) {
  ArmSplitting s;
  const double diff = gamma_a - gamma_b;
  s.radicand = 4.0 * std::norm(omega_c) - diff * diff;
  s.gamma_e = 0.5 * (gamma_a + gamma_b);
  if (s.radicand < 0.0) {
    s.overdamped = true;
    s.omega_e = 0.0;
  } else {
    s.omega_e = std::sqrt(s.radicand);
  }
  return s;
}

class Fnv1a {
 public:
  void add(double v) {
    // Fold -0.0 into +0.0 so equal values hash equally.
    if (v == 0.0) v = 0.0;
    add_bits(std::bit_cast<std::uint64_t>(v));
  }
  void add(std::complex<double> z) {
    add(z.real());
    add(z.imag());
  }
  void add(const std::optional<double>& v) {
    add_bits(v ? 1u : 0u);
    if (v) add(*v);
  }
  std::uint64_t value() const { return h_; }

 private:
  void add_bits(std::uint64_t bits) {
    for (int i = 0; i < 8; ++i) {
      h_ ^= (bits >> (8 * i)) & 0xffu;
      h_ *= 0x100000001b3ull;
    }
  }
  std::uint64_t h_ = 0xcbf29ce484222325ull;
};

}  // namespace

void SystemParams::validate() const {
  require(std::isfinite(gamma31_si) && gamma31_si > 0.0,
          "gamma31_si must be positive and finite");
  for (double g : {gamma21, gamma41, gamma42, gamma51, gamma52, gamma53, gamma54}) {
    require(std::isfinite(g) && g >= 0.0, "dephasing rates must be finite and >= 0");
  }
  require(finite(omega_p) && finite(omega_c1) && finite(omega_c2),
          "Rabi frequencies must be finite");
  require(std::abs(omega_c1) > 0.0, "|omega_c1| must be > 0");
  require(std::abs(omega_c2) > 0.0, "|omega_c2| must be > 0");
  require(std::isfinite(delta_p) && std::isfinite(delta_c1) && std::isfinite(delta_c2),
          "detunings must be finite");
  require(std::isfinite(length_L) && length_L > 0.0, "length_L must be > 0");
  require(std::isfinite(optical_depth) && optical_depth >= 0.0,
          "optical_depth must be >= 0");
  require(!omega21 || std::isfinite(*omega21), "omega21 must be finite");
  require(std::isfinite(omega31) && omega31 > 0.0, "omega31 must be > 0");
  require(std::isfinite(dipole_scale), "dipole_scale must be finite");
  require(!gamma_e3 || std::isfinite(*gamma_e3), "gamma_e3 must be finite");
}

void SystemParams::validate_for_grid() const {
  validate();
  for (double g : {gamma21, gamma41, gamma51, gamma31_si}) {
    require(g > 0.0, "grid sampling requires strictly positive dephasing rates");
  }
}

std::uint64_t param_hash(const SystemParams& p) {
  Fnv1a h;
  h.add(p.gamma31_si);
  for (double g : {p.gamma21, p.gamma41, p.gamma42, p.gamma51, p.gamma52, p.gamma53,
                   p.gamma54}) {
    h.add(g);
  }
  h.add(p.omega_p);
  h.add(p.omega_c1);
  h.add(p.omega_c2);
  h.add(p.delta_p);
  h.add(p.delta_c1);
  h.add(p.delta_c2);
  h.add(p.length_L);
  h.add(p.optical_depth);
  h.add(p.omega21);
  h.add(p.omega31);
  h.add(p.dipole_scale);
  h.add(p.gamma_e3);
  return h.value();
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Chi5Dominated: return "chi5-dominated";
    case Regime::Hybrid: return "hybrid";
    case Regime::Overdamped: return "overdamped";
  }
  return "unknown";
}

std::string to_string(Entanglement e) {
  return e == Entanglement::W_2x3x2 ? "W 2x3x2" : "non-W 2x4x2";
}

Splittings effective_splittings(const SystemParams& p) {
  // gamma31 == 1 in internal units.
  return {arm(p.omega_c1, p.gamma41, p.gamma51), arm(p.omega_c2, 1.0, p.gamma21)};
}

EitDispersion eit_dispersion(const SystemParams& p) {
  const double omega_c2_sq = std::norm(p.omega_c2);
  if (!(omega_c2_sq > 0.0)) throw ValidationError("eit_dispersion needs |omega_c2| > 0");
  if (!(p.optical_depth > 0.0)) {
    throw DomainError("EIT bandwidths are undefined at optical depth 0");
  }

  EitDispersion e;
  const double k31 = p.omega31 / kSpeedOfLight;
  const double omega_c2_si_sq = omega_c2_sq * p.gamma31_si * p.gamma31_si;
  const double slow = p.omega31 * p.optical_depth * p.gamma31_si /
                      (2.0 * k31 * p.length_L * omega_c2_si_sq);
  e.group_velocity_nu3 = kSpeedOfLight / (1.0 + slow);
  e.group_delay = p.length_L / e.group_velocity_nu3;
  e.delta_omega_g = 4.0 * kPi * omega_c2_sq / p.optical_depth;
  e.delta_omega_t = omega_c2_sq / std::sqrt(2.0 * p.optical_depth);
  return e;
}

RegimeClass classify_regime(const DerivedFrequencies& d) {
  if (d.overdamped()) return {Regime::Overdamped, false};
  const double width = 2.0 * d.gamma_e2;
  const double scale = std::max(std::abs(width), std::abs(d.delta_omega_g));
  if (std::abs(width - d.delta_omega_g) <= 1e-9 * scale) return {Regime::Hybrid, true};
  return {width < d.delta_omega_g ? Regime::Chi5Dominated : Regime::Hybrid, false};
}

Entanglement classify_entanglement(const DerivedFrequencies& d, double tol) {
  const double scale = std::max(d.omega_e1, d.omega_e2);
  return std::abs(d.omega_e1 - d.omega_e2) <= tol * scale ? Entanglement::W_2x3x2
                                                          : Entanglement::NonW_2x4x2;
}

DerivedFrequencies derive(const SystemParams& p, double entanglement_tol) {
  p.validate();
  const Splittings s = effective_splittings(p);
  const EitDispersion e = eit_dispersion(p);

  DerivedFrequencies d;
  d.omega_e1 = s.arm1.omega_e;
  d.omega_e2 = s.arm2.omega_e;
  d.gamma_e1 = s.arm1.gamma_e;
  d.gamma_e2 = s.arm2.gamma_e;
  d.overdamped1 = s.arm1.overdamped;
  d.overdamped2 = s.arm2.overdamped;
  d.group_velocity_nu3 = e.group_velocity_nu3;
  d.group_delay = e.group_delay;
  d.delta_omega_g = e.delta_omega_g;
  d.delta_omega_t = e.delta_omega_t;

  const RegimeClass rc = classify_regime(d);
  d.regime = rc.regime;
  d.regime_tie = rc.tie;
  d.entanglement = classify_entanglement(d, entanglement_tol);
  return d;
}

std::array<ChannelSpec, 4> channel_spectrum(const DerivedFrequencies& d) {
  if (d.overdamped()) throw ValidationError("channel_spectrum: overdamped arm");
  const double h1 = 0.5 * d.omega_e1;
  const double h2 = 0.5 * d.omega_e2;
  std::array<ChannelSpec, 4> out;
  const double d1[4] = {-h1, +h1, -h1, +h1};
  const double d3[4] = {-h2, -h2, +h2, +h2};
  for (int i = 0; i < 4; ++i) {
    out[i].delta1 = d1[i];
    out[i].delta3 = d3[i];
    out[i].delta2 = -(d1[i] + d3[i]);
  }
  return out;
}

}  // namespace sswm
