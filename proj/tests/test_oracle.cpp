#include <doctest.h>

#include "sswm/acceptance.hpp"
#include "sswm/analysis.hpp"
#include "sswm/errors.hpp"
#include "sswm/oracle.hpp"

using namespace sswm;

namespace {

OracleConfig unity(double extent_factor = kDefaultExtentFactor, Eigen::Index n = 1024) {
  OracleConfig c;
  c.force_phi_unity = true;
  c.n_points = n;
  c.extent = extent_factor * 16.0;  // widest chi5 feature at Omega_c = 8 is ~16
  return c;
}

// Relative L2 distance between peak-normalised oracle and closed form on t >= 0.
double l2_against_closed_form(const FourierOracle& o) {
  const RateGrid r = o.rate(true);
  const TriphotonModel m(o.params());
  RateGrid ref = evaluate_grid(r.tau12_axis, r.tau13_axis, [&](double a, double b) { return m.rcc_chi5(a, b); });
  normalize_peak(ref);
  return (r.values - ref.values).norm() / ref.values.norm();
}

}  // namespace

TEST_CASE("discrete transform preserves power") {
  const FourierOracle o(chi5_params(8), unity(16, 512));
  const AmplitudeGrid b = o.wavepacket();
  CHECK(o.temporal_power(b) == doctest::Approx(o.spectral_power()).epsilon(1e-10));
}

TEST_CASE("oracle reproduces the closed-form rate and converges with bandwidth") {
  const SystemParams p = chi5_params(8);
  const double e4 = l2_against_closed_form(FourierOracle(p, unity(4, 1024)));
  const double e16 = l2_against_closed_form(FourierOracle(p, unity(16, 2048)));
  CHECK(e16 < 0.05);
  CHECK(e16 < e4);
}

TEST_CASE("time axis is cell-centred and matches the spectral spacing") {
  const FourierOracle o(chi5_params(8), unity(16, 512));
  const Eigen::VectorXd t = o.time_axis();
  const double dt = o.params().to_seconds(o.time_step());
  CHECK(t.size() == 512);
  CHECK(t[256] == doctest::Approx(0.5 * dt));
  CHECK(t[255] == doctest::Approx(-0.5 * dt));
  CHECK(o.time_step() == doctest::Approx(2 * kPi / (512 * o.spacing())));
  CHECK(is_uniform_axis(t));
}

TEST_CASE("oracle output is causal") {
  const FourierOracle o(chi5_params(8), unity(16, 2048));
  CHECK(ordering_violation_mass(o.rate()) < 1e-3);
}

TEST_CASE("conditional rates are marginals of the full rate") {
  const FourierOracle o(chi5_params(8), unity(16, 512));
  const RateGrid r = o.rate(false);
  const TimeTrace c12 = o.conditional(Conditional::Tau12);
  const TimeTrace c13 = o.conditional(Conditional::Tau13);
  const TimeTrace m12 = marginal_tau12(r).normalized();
  const TimeTrace m13 = marginal_tau13(r).normalized();
  CHECK((c12.values - m12.values).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((c13.values - m13.values).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(c12.values.maxCoeff() == doctest::Approx(1.0));
}

TEST_CASE("oracle is deterministic") {
  const SystemParams p = hybrid_params(111);
  OracleConfig c;
  c.n_points = 256;
  const RateGrid a = rcc_numeric(p, c), b = rcc_numeric(p, c);
  CHECK((a.values.array() == b.values.array()).all());
}

TEST_CASE("tukey window") {
  const Eigen::VectorXd hann = tukey_window(9, 1.0);
  CHECK(hann[0] == doctest::Approx(0.0));
  CHECK(hann[4] == doctest::Approx(1.0));
  CHECK(hann[1] == doctest::Approx(hann[7]));
  CHECK((tukey_window(16, 0.0).array() == 1.0).all());
  OracleConfig c = unity(16, 256);
  c.window = {WindowKind::Tukey, 0.2};
  const FourierOracle w(chi5_params(8), c);
  const FourierOracle plain(chi5_params(8), unity(16, 256));
  CHECK(w.spectral_power() < plain.spectral_power());
  CHECK(std::abs(w.spectrum().values(128, 128)) == doctest::Approx(std::abs(plain.spectrum().values(128, 128))));
}

TEST_CASE("oracle configuration validation") {
  OracleConfig c;
  CHECK_NOTHROW(c.validate());
  c.n_points = 1000;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = OracleConfig{};
  c.force_phi_unity = c.ideal_rect = true;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = OracleConfig{};
  c.window = {WindowKind::Tukey, 1.5};
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = OracleConfig{};
  c.extent = -1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  CHECK(OracleConfig{}.phase_matching() == PhaseMatching::Dispersive);
  c = OracleConfig{};
  c.ideal_rect = true;
  CHECK(c.phase_matching() == PhaseMatching::IdealRect);
}

TEST_CASE("default extent covers the chi5 features") {
  const DerivedFrequencies d = derive(chi5_params(8));
  CHECK(default_extent(d) == doctest::Approx(16 * d.omega_e1));
  const FourierOracle o(chi5_params(8), OracleConfig{});
  CHECK(o.extent() == doctest::Approx(default_extent(d)));
}
