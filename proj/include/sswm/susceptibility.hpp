#pragma once

// Spectral response of the five-level medium: the fifth-order susceptibility,
// the linear susceptibilities of the three generated fields, the wavenumber
// mismatch and the longitudinal detuning function.
//
// Rates are stored unstarred; conjugation happens where a formula uses the
// starred symbol. delta1 is never a free variable: delta1 = -delta2 - delta3.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "sswm/errors.hpp"
#include "sswm/grid.hpp"
#include "sswm/params.hpp"

namespace sswm {

inline constexpr double kPoleTolerance = 1e-30;

template <typename Scalar>
struct ComplexRates {
  using Complex = std::complex<Scalar>;
  Complex gamma41_c;  // i Delta_p - gamma41
  Complex gamma51_c;  // i (Delta_p + Delta_c1) - gamma51
  Complex gamma54_c;  // i Delta_c1 - gamma54
  Complex upsilon21;  // -i delta3 - gamma21
  Complex upsilon31;  // -i delta3 - gamma31
  Complex upsilon42;  // -i delta2 - gamma42
  Complex upsilon52;  // i (Delta_c1 - delta2) - gamma52
  Complex upsilon53;  // i (Delta_c1 - delta2) - gamma53
  Complex tee41, tee51, tee54;  // Gamma_ij - i (Delta_p + delta2 + delta3)
  Complex arr21, arr31;         // Upsilon_ij + i (Delta_p + delta2 + delta3)
};

template <typename Scalar>
ComplexRates<Scalar> complex_rates(Scalar delta2, Scalar delta3, const SystemParams& p) {
  using C = std::complex<Scalar>;
  const C i(0, 1);
  const Scalar dp = Scalar(p.delta_p);
  const Scalar dc1 = Scalar(p.delta_c1);
  const Scalar g31 = Scalar(1);

  ComplexRates<Scalar> r;
  r.gamma41_c = i * dp - Scalar(p.gamma41);
  r.gamma51_c = i * (dp + dc1) - Scalar(p.gamma51);
  r.gamma54_c = i * dc1 - Scalar(p.gamma54);
  r.upsilon21 = -i * delta3 - Scalar(p.gamma21);
  r.upsilon31 = -i * delta3 - g31;
  r.upsilon42 = -i * delta2 - Scalar(p.gamma42);
  r.upsilon52 = i * (dc1 - delta2) - Scalar(p.gamma52);
  r.upsilon53 = i * (dc1 - delta2) - Scalar(p.gamma53);

  const C shift = i * (dp + delta2 + delta3);
  r.tee41 = r.gamma41_c - shift;
  r.tee51 = r.gamma51_c - shift;
  r.tee54 = r.gamma54_c - shift;
  r.arr21 = r.upsilon21 + shift;
  r.arr31 = r.upsilon31 + shift;
  return r;
}

namespace detail {

template <typename Scalar>
void check_pole(const std::complex<Scalar>& den, const char* where) {
  if (!(std::abs(den) >= Scalar(kPoleTolerance))) {
    throw SingularityError(std::string(where) + ": denominator vanishes (pole)");
  }
}

}  // namespace detail

/// D(delta2, delta3) = (T*41 T*51 + |Omega_c1|^2)(Upsilon*21 Upsilon*31 + |Omega_c2|^2).
template <typename Scalar>
std::complex<Scalar> resonance_denominator(Scalar delta2, Scalar delta3,
                                           const SystemParams& p) {
  using std::conj;
  const auto r = complex_rates(delta2, delta3, p);
  const Scalar c1 = Scalar(std::norm(p.omega_c1));
  const Scalar c2 = Scalar(std::norm(p.omega_c2));
  return (conj(r.tee41) * conj(r.tee51) + c1) * (conj(r.upsilon21) * conj(r.upsilon31) + c2);
}

/// Fifth-order susceptibility with the dimensional prefactor replaced by
/// `dipole_scale`. Throws SingularityError within kPoleTolerance of a pole.
template <typename Scalar>
std::complex<Scalar> chi5(Scalar delta2, Scalar delta3, const SystemParams& p) {
  using C = std::complex<Scalar>;
  using std::conj;
  const auto r = complex_rates(delta2, delta3, p);
  const Scalar c1 = Scalar(std::norm(p.omega_c1));
  const Scalar c2 = Scalar(std::norm(p.omega_c2));
  const C pump_term = conj(r.gamma41_c) * conj(r.gamma51_c) + c1;
  const C d = (conj(r.tee41) * conj(r.tee51) + c1) * (conj(r.upsilon21) * conj(r.upsilon31) + c2);
  detail::check_pole(d, "chi5");
  detail::check_pole(pump_term, "chi5");
  return Scalar(p.dipole_scale) * C(0, -1) * conj(r.tee51) / (pump_term * d);
}

/// Linear susceptibility of E1. The printed numerator carries unbalanced
/// bars around Omega_c1; it is read as |Omega_p|^2 |Omega_c1|^2.
template <typename Scalar>
std::complex<Scalar> chi1(Scalar delta2, Scalar delta3, const SystemParams& p,
                          Scalar scale = Scalar(1)) {
  using C = std::complex<Scalar>;
  const auto r = complex_rates(delta2, delta3, p);
  const Scalar c1 = Scalar(std::norm(p.omega_c1));
  const Scalar pump = Scalar(std::norm(p.omega_p));
  const C den = r.tee54 * (r.gamma41_c * r.gamma51_c + c1) * (r.tee41 * r.tee51 + c1);
  detail::check_pole(den, "chi1");
  return scale * C(0, -1) * pump * c1 / den;
}

/// Linear susceptibility of E2; depends on delta2 only (delta3 cancels in R_ij).
template <typename Scalar>
std::complex<Scalar> chi2(Scalar delta2, const SystemParams& p, Scalar scale = Scalar(1)) {
  using C = std::complex<Scalar>;
  using std::conj;
  const auto r = complex_rates(delta2, Scalar(0), p);
  const Scalar c1 = Scalar(std::norm(p.omega_c1));
  const Scalar c2 = Scalar(std::norm(p.omega_c2));
  const Scalar pump = Scalar(std::norm(p.omega_p));
  const C dressed = conj(r.upsilon52) * conj(r.upsilon53) + c2;
  const C num = pump * r.gamma51_c * r.arr31 * dressed;
  const C den1 = (r.gamma41_c * r.gamma51_c + c1) * (r.arr21 * r.arr31 + c2);
  const C den2 = conj(r.upsilon53) * c1 + conj(r.upsilon42) * dressed;
  detail::check_pole(den1, "chi2");
  detail::check_pole(den2, "chi2");
  return scale * C(0, 1) * num / (den1 * den2);
}

/// Linear susceptibility of E3 (the EIT arm).
template <typename Scalar>
std::complex<Scalar> chi3(Scalar delta3, const SystemParams& p, Scalar scale = Scalar(1)) {
  using C = std::complex<Scalar>;
  using std::conj;
  const auto r = complex_rates(Scalar(0), delta3, p);
  const Scalar c2 = Scalar(std::norm(p.omega_c2));
  detail::check_pole(conj(r.upsilon21), "chi3");
  const C den = conj(r.upsilon31) + c2 / conj(r.upsilon21);
  detail::check_pole(den, "chi3");
  return scale * C(0, -1) / den;
}

/// Prefactor N hbar |d13|^2 / (eps0 gamma31) implied by the optical depth.
/// Fixed so that the dispersion of (omega31 / c) chi3 reproduces the group
/// velocity nu3 at line centre.
inline double chi3_eit_scale(const SystemParams& p) {
  return p.optical_depth * kSpeedOfLight / (2.0 * p.omega31 * p.length_L);
}

/// chi3 with its physical, OD-calibrated prefactor.
inline std::complex<double> chi3_eit(double delta3, const SystemParams& p) {
  return chi3(delta3, p, chi3_eit_scale(p));
}

/// Wavenumber mismatch in 1/m, linearised E3 dispersion plus EIT loss:
/// 2(w21 - Dp - d2)/c + d3 (1/nu3 + 1/c) + i w31 Im[chi3]/c.
std::complex<double> delta_k(double delta2, double delta3, const SystemParams& p,
                             const EitDispersion& eit);

/// Same mismatch with the linearised E3 term replaced by the full complex
/// response d3/c + (w31/c) chi3(d3). Agrees with delta_k to first order in
/// d3 and obeys Kramers-Kronig, which keeps the Fourier oracle causal.
std::complex<double> delta_k_dispersive(double delta2, double delta3, const SystemParams& p);

/// Longitudinal detuning function (1 - exp(-i x)) / (i x) of x = Delta k L,
/// with the removable singularity handled by series for |x| < 1e-6.
template <typename Scalar>
std::complex<Scalar> phi(std::complex<Scalar> x) {
  using C = std::complex<Scalar>;
  const C i(0, 1);
  if (std::abs(x) < Scalar(1e-6)) return C(1) - i * x / Scalar(2) - x * x / Scalar(6);
  return (C(1) - std::exp(-i * x)) / (i * x);
}

/// How the phase-matching factor enters the sampled spectrum.
enum class PhaseMatching {
  Unity,      // Phi = 1
  IdealRect,  // real, linear dispersion only (no EIT loss)
  Linear,     // linearised mismatch with EIT loss
  Dispersive  // full complex chi3 response
};

std::string to_string(PhaseMatching m);

/// Phase-matching factor multiplying chi5 in the wavepacket integrand.
/// Evaluated as phi(-Delta k L): with the exp(-i delta tau) transform this
/// places the slow-light window on tau13 in [0, L/nu3] and makes the EIT loss
/// attenuate rather than amplify.
std::complex<double> detuning_factor(double delta2, double delta3, const SystemParams& p,
                                     const EitDispersion& eit, PhaseMatching mode);

/// Uniform (delta2, delta3) grid of complex samples, gamma31 units.
/// values(i, j) belongs to (delta2_axis[i], delta3_axis[j]).
template <typename Scalar = double>
struct SpectralGrid {
  VectorX<Scalar> delta2_axis;
  VectorX<Scalar> delta3_axis;
  MatrixX<std::complex<Scalar>> values;
  std::uint64_t param_hash = 0;
  Eigen::Index singular_replacements = 0;
  std::vector<std::string> warnings;

  Scalar spacing2() const { return delta2_axis[1] - delta2_axis[0]; }
  Scalar spacing3() const { return delta3_axis[1] - delta3_axis[0]; }

  void check() const {
    if (values.rows() != delta2_axis.size() || values.cols() != delta3_axis.size()) {
      throw ValidationError("spectral grid: value shape does not match axes");
    }
    if (!is_uniform_axis(delta2_axis) || !is_uniform_axis(delta3_axis)) {
      throw ValidationError("spectral grid: axes must be uniform and increasing");
    }
  }

  template <typename Fn>
  static SpectralGrid from_function(VectorX<Scalar> axis2, VectorX<Scalar> axis3, Fn&& f) {
    SpectralGrid g;
    g.delta2_axis = std::move(axis2);
    g.delta3_axis = std::move(axis3);
    g.values.resize(g.delta2_axis.size(), g.delta3_axis.size());
    for (Eigen::Index j = 0; j < g.values.cols(); ++j) {
      for (Eigen::Index i = 0; i < g.values.rows(); ++i) {
        g.values(i, j) = f(g.delta2_axis[i], g.delta3_axis[j]);
      }
    }
    return g;
  }
};

/// Samples chi5 * Phi on a centred n x n grid spanning [-extent, extent] on
/// both axes. Points at a pole are replaced by the mean of their regular
/// 4-neighbours and counted. n must be a power of two >= 256.
SpectralGrid<double> spectral_grid(const SystemParams& p, double extent, Eigen::Index n,
                                   PhaseMatching mode = PhaseMatching::Unity);

struct Resonance {
  double delta2 = 0.0;
  double delta3 = 0.0;
  double magnitude = 0.0;
  Eigen::Index row = 0;
  Eigen::Index col = 0;
};

inline constexpr double kResonanceThreshold = 0.25;

/// Interior 3x3 local maxima of |values| above `threshold` x the global
/// maximum, sorted by decreasing magnitude.
template <typename Scalar>
std::vector<Resonance> find_resonances(const SpectralGrid<Scalar>& g,
                                       double threshold = kResonanceThreshold) {
  const Eigen::Index nr = g.values.rows();
  const Eigen::Index nc = g.values.cols();
  if (nr == 0 || nc == 0) throw ValidationError("find_resonances: empty grid");
  const MatrixX<Scalar> mag = g.values.cwiseAbs();
  const Scalar global = mag.maxCoeff();
  std::vector<Resonance> peaks;
  if (!(global > Scalar(0))) return peaks;

  for (Eigen::Index j = 1; j + 1 < nc; ++j) {
    for (Eigen::Index i = 1; i + 1 < nr; ++i) {
      const Scalar v = mag(i, j);
      if (v < Scalar(threshold) * global) continue;
      bool is_max = true;
      for (int dj = -1; dj <= 1 && is_max; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          const Scalar w = mag(i + di, j + dj);
          // Ties go to the lexicographically first cell.
          const bool earlier = dj < 0 || (dj == 0 && di < 0);
          if (w > v || (w == v && earlier)) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) {
        peaks.push_back({double(g.delta2_axis[i]), double(g.delta3_axis[j]), double(v), i, j});
      }
    }
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const Resonance& a, const Resonance& b) { return a.magnitude > b.magnitude; });
  return peaks;
}

}  // namespace sswm
