#include "sswm/susceptibility.hpp"

#include <algorithm>
#include <cmath>

namespace sswm {

std::complex<double> delta_k(double delta2, double delta3, const SystemParams& p,
                             const EitDispersion& eit) {
  const double g = p.gamma31_si;
  const double c = kSpeedOfLight;
  const double re = 2.0 * (p.omega21_si() - p.delta_p * g - delta2 * g) / c +
                    delta3 * g * (1.0 / eit.group_velocity_nu3 + 1.0 / c);
  const double im = p.omega31 * chi3_eit(delta3, p).imag() / c;
  return {re, im};
}

std::complex<double> delta_k_dispersive(double delta2, double delta3, const SystemParams& p) {
  const double g = p.gamma31_si;
  const double c = kSpeedOfLight;
  const double carrier = 2.0 * (p.omega21_si() - p.delta_p * g - delta2 * g) / c;
  return carrier + 2.0 * delta3 * g / c + (p.omega31 / c) * chi3_eit(delta3, p);
}

std::string to_string(PhaseMatching m) {
  switch (m) {
    case PhaseMatching::Unity: return "unity";
    case PhaseMatching::IdealRect: return "ideal-rect";
    case PhaseMatching::Linear: return "linear";
    case PhaseMatching::Dispersive: return "dispersive";
  }
  return "unknown";
}

std::complex<double> detuning_factor(double delta2, double delta3, const SystemParams& p,
                                     const EitDispersion& eit, PhaseMatching mode) {
  std::complex<double> dk;
  switch (mode) {
    case PhaseMatching::Unity:
      return 1.0;
    case PhaseMatching::IdealRect:
      dk = delta_k(delta2, delta3, p, eit).real();
      break;
    case PhaseMatching::Linear:
      dk = delta_k(delta2, delta3, p, eit);
      break;
    case PhaseMatching::Dispersive:
      dk = delta_k_dispersive(delta2, delta3, p);
      break;
  }
  return phi(-dk * p.length_L);
}

SpectralGrid<double> spectral_grid(const SystemParams& p, double extent, Eigen::Index n,
                                   PhaseMatching mode) {
  p.validate_for_grid();
  if (!is_power_of_two(n) || n < 256) {
    throw ValidationError("spectral grid: n_points must be a power of two >= 256");
  }
  if (!(std::isfinite(extent) && extent > 0.0)) {
    throw ValidationError("spectral grid: extent must be positive");
  }

  const DerivedFrequencies d = derive(p);
  SpectralGrid<double> g;
  g.param_hash = param_hash(p);
  const double needed = std::max({d.omega_e1, d.omega_e2, 2.0 * d.gamma_e1, 2.0 * d.gamma_e2});
  if (2.0 * extent < 4.0 * needed) {
    g.warnings.push_back("extent does not cover 4x the widest chi5 feature");
  }

  const EitDispersion eit = eit_dispersion(p);
  g.delta2_axis = centered_axis(extent, n);
  g.delta3_axis = g.delta2_axis;
  g.values.resize(n, n);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> singular =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);

  for (Eigen::Index j = 0; j < n; ++j) {
    const double d3 = g.delta3_axis[j];
    const std::complex<double> phi3 =
        mode == PhaseMatching::Unity ? std::complex<double>(1.0) : std::complex<double>(0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d2 = g.delta2_axis[i];
      try {
        const auto f = mode == PhaseMatching::Unity ? phi3 : detuning_factor(d2, d3, p, eit, mode);
        g.values(i, j) = chi5(d2, d3, p) * f;
      } catch (const SingularityError&) {
        singular(i, j) = true;
        g.values(i, j) = 0.0;
      }
    }
  }

  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!singular(i, j)) continue;
      std::complex<double> sum = 0.0;
      int count = 0;
      const Eigen::Index ni[4] = {i - 1, i + 1, i, i};
      const Eigen::Index nj[4] = {j, j, j - 1, j + 1};
      for (int k = 0; k < 4; ++k) {
        if (ni[k] < 0 || nj[k] < 0 || ni[k] >= n || nj[k] >= n) continue;
        if (singular(ni[k], nj[k])) continue;
        sum += g.values(ni[k], nj[k]);
        ++count;
      }
      g.values(i, j) = count > 0 ? sum / double(count) : std::complex<double>(0.0);
      ++g.singular_replacements;
    }
  }
  return g;
}

}  // namespace sswm
