#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>

namespace sswm {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kDefaultGamma31 = 2.0 * kPi * 3.0e6;  // rad/s

/// Physical inputs of the five-level scheme.
///
/// Rates, Rabi frequencies and detunings are dimensionless multiples of the
/// reference dephasing rate gamma31 (which is therefore 1 internally);
/// `gamma31_si` carries the scale in rad/s. Lengths are in metres and the
/// transition frequencies omega21/omega31 in rad/s.
///
/// Defaults give the four-peak spectrum configuration
/// (Omega_c1 = Omega_c2 = 40, gamma41 = 1, gamma51 = 0.1, gamma21 = 0.02,
/// Delta_p = -2pi x 300 MHz, L = 0.15 cm).
struct SystemParams {
  double gamma31_si = kDefaultGamma31;

  double gamma21 = 0.02;
  double gamma41 = 1.0;
  double gamma42 = 1.0;
  double gamma51 = 0.1;
  double gamma52 = 1.0;
  double gamma53 = 1.0;
  double gamma54 = 1.0;

  std::complex<double> omega_p{0.5, 0.0};
  std::complex<double> omega_c1{40.0, 0.0};
  std::complex<double> omega_c2{40.0, 0.0};

  double delta_p = -100.0;
  double delta_c1 = 0.0;
  double delta_c2 = 0.0;

  double length_L = 0.0015;
  double optical_depth = 0.38;

  /// Ground-state splitting in rad/s. Empty selects the phase-matched
  /// default omega21 = Delta_p (real part of the wavenumber mismatch vanishes
  /// at zero detuning).
  std::optional<double> omega21;
  /// E3 carrier (rad/s); 795 nm by default.
  double omega31 = 2.0 * kPi * kSpeedOfLight / 795.0e-9;

  /// Stands in for N hbar d41 d32 d24 d13 |d54|^2 / eps0.
  double dipole_scale = 1.0;

  /// Coefficient of the sine term of the hybrid wavepacket. Empty selects
  /// gamma51 - gamma_e1.
  std::optional<double> gamma_e3;

  /// Throws ValidationError unless every documented invariant holds. Zero
  /// dephasing rates are accepted here (closed forms stay evaluable).
  void validate() const;

  /// Stricter check used before sampling on real grids: every dephasing rate
  /// must be strictly positive so no pole of D lies on the real axis.
  void validate_for_grid() const;

  double omega21_si() const { return omega21.value_or(delta_p * gamma31_si); }

  double to_seconds(double t_internal) const { return t_internal / gamma31_si; }
  double to_internal_time(double t_seconds) const {
    return t_seconds * gamma31_si;
  }
};

/// Stable 64-bit hash of every field (FNV-1a over the exact bit patterns).
std::uint64_t param_hash(const SystemParams& p);

enum class Regime { Chi5Dominated, Hybrid, Overdamped };
enum class Entanglement { W_2x3x2, NonW_2x4x2 };

std::string to_string(Regime r);
std::string to_string(Entanglement e);

/// Effective Rabi splitting and linewidth of one dressed arm.
struct ArmSplitting {
  double omega_e = 0.0;  // 0 when overdamped
  double gamma_e = 0.0;
  bool overdamped = false;
  /// 4|Omega_c|^2 - (gamma difference)^2, kept for diagnostics.
  double radicand = 0.0;
};

struct Splittings {
  ArmSplitting arm1;  // pump / c1 dressing, delta1 direction
  ArmSplitting arm2;  // c2 dressing, delta3 direction
};

Splittings effective_splittings(const SystemParams& p);

/// Slow-light properties of the E3 EIT arm.
struct EitDispersion {
  double group_velocity_nu3 = kSpeedOfLight;  // m/s
  double group_delay = 0.0;                   // L / nu3, s
  double delta_omega_g = 0.0;                 // gamma31 units
  double delta_omega_t = 0.0;                 // gamma31 units

  double group_delay_internal(const SystemParams& p) const {
    return p.to_internal_time(group_delay);
  }
};

/// Throws DomainError when OD = 0 (bandwidths undefined) and
/// ValidationError when Omega_c2 = 0.
EitDispersion eit_dispersion(const SystemParams& p);

struct RegimeClass {
  Regime regime = Regime::Overdamped;
  bool tie = false;
};

struct DerivedFrequencies {
  double omega_e1 = 0.0;
  double omega_e2 = 0.0;
  double gamma_e1 = 0.0;
  double gamma_e2 = 0.0;
  bool overdamped1 = false;
  bool overdamped2 = false;

  double group_velocity_nu3 = kSpeedOfLight;
  double group_delay = 0.0;
  double delta_omega_g = 0.0;
  double delta_omega_t = 0.0;

  Regime regime = Regime::Overdamped;
  bool regime_tie = false;
  Entanglement entanglement = Entanglement::NonW_2x4x2;

  bool overdamped() const { return overdamped1 || overdamped2; }
};

inline constexpr double kDefaultEntanglementTolerance = 1e-3;

RegimeClass classify_regime(const DerivedFrequencies& d);
Entanglement classify_entanglement(const DerivedFrequencies& d, double tol);

/// Runs every core computation: splittings, dispersion, regime and
/// entanglement label (the latter only meaningful when not overdamped).
DerivedFrequencies derive(const SystemParams& p,
                          double entanglement_tol = kDefaultEntanglementTolerance);

/// Peak offsets (delta1, delta2, delta3) of one mixing channel, gamma31 units.
struct ChannelSpec {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
};

/// The four channels, in the order (-,+,-), (+,-,-), (-,+,+), (+,-,+) of the
/// Omega_e1 / Omega_e2 signs on (delta1, delta3). Throws ValidationError when
/// overdamped.
std::array<ChannelSpec, 4> channel_spectrum(const DerivedFrequencies& d);

}  // namespace sswm
