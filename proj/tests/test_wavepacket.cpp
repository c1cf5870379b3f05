#include <doctest.h>

#include <random>

#include "sswm/acceptance.hpp"
#include "sswm/errors.hpp"
#include "sswm/wavepacket.hpp"

using namespace sswm;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 ? 4 : 2);
  return s * h / 3;
}

}  // namespace

TEST_CASE("four-channel amplitude squares to twice the coincidence rate") {
  const TriphotonModel m(chi5_params(8));
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> t(0, 300e-9);
  for (int k = 0; k < 200; ++k) {
    const double a = t(rng), b = a + t(rng);
    const double r = m.rcc_chi5(a, b);
    CHECK(std::norm(m.wavepacket_chi5(a, b)) == doctest::Approx(2 * r).epsilon(1e-10));
  }
}

TEST_CASE("causal support") {
  const TriphotonModel m(chi5_params(8));
  CHECK(m.rcc_chi5(-1e-12, 10e-9) == 0.0);
  CHECK(m.rcc_chi5(20e-9, 19e-9) == 0.0);
  CHECK(m.rcc_cond12(-1e-9) == 0.0);
  CHECK(m.rcc_chi5(10e-9, 10e-9) >= 0.0);
  const TriphotonModel h(hybrid_params(111));
  CHECK(h.rcc_hybrid(-1e-9, 100e-9) == 0.0);
  CHECK(h.rcc_hybrid(10e-9, -1e-9) == 0.0);
  CHECK(h.rcc_hybrid(10e-9, 800e-9) == 0.0);
  CHECK(h.rcc_hybrid(10e-9, 100e-9) > 0.0);
  CHECK(heaviside(0.0) == 1.0);
  CHECK(heaviside(-1e-300) == 0.0);
}

TEST_CASE("conditional rate is the coincidence rate integrated over tau13") {
  const SystemParams p = chi5_params(8);
  const TriphotonModel m(p);
  const double tmax = 2e-6;
  std::vector<double> ratio;
  for (double a : {3e-9, 11e-9, 27e-9, 40e-9, 75e-9}) {
    const double integral = simpson([&](double b) { return m.rcc_chi5(a, b); }, a, a + tmax, 20000);
    ratio.push_back(integral / m.rcc_cond12(a));
  }
  for (double r : ratio) CHECK(r == doctest::Approx(ratio[0]).epsilon(1e-6));
}

TEST_CASE("conditional rate oscillates at the pump-arm splitting") {
  for (double oc : {2.0, 4.0, 8.0}) {
    const SystemParams p = chi5_params(oc);
    const TriphotonModel m(p);
    const double period = p.to_seconds(2 * kPi / m.derived().omega_e1);
    // Successive minima of the bracket sit one period apart.
    double first = -1, second = -1, prev2 = 1e300, prev1 = 1e300;
    const double dt = period / 2000;
    for (int k = 1; k < 10000 && second < 0; ++k) {
      const double v = m.rcc_cond12(k * dt) * std::exp(2 * m.derived().gamma_e1 * p.gamma31_si * k * dt);
      if (k > 2 && prev1 < prev2 && prev1 < v) (first < 0 ? first : second) = (k - 1) * dt;
      prev2 = prev1;
      prev1 = v;
    }
    CHECK(second - first == doctest::Approx(period).epsilon(0.03));
  }
}

TEST_CASE("hybrid amplitude is a slow-light rectangle with EIT loss") {
  for (double od : {37.0, 74.0, 111.0}) {
    const TriphotonModel m(hybrid_params(od));
    const double T = m.derived().group_delay;
    const double a = 5e-9;
    CHECK(m.rcc_hybrid(a, 0.1 * T, true) == doctest::Approx(m.rcc_hybrid(a, 0.9 * T, true)));
    CHECK(m.rcc_hybrid(a, 1.01 * T, true) == 0.0);
    const double ratio = std::abs(m.wavepacket_hybrid(a, 0.8 * T) / m.wavepacket_hybrid(a, 0.2 * T));
    CHECK(ratio == doctest::Approx(std::exp(-m.eit_loss_rate() * 0.6 * T)).epsilon(1e-10));
  }
}

TEST_CASE("EIT amplitude loss approaches the ground-state dephasing") {
  for (double od : {37.0, 111.0}) {
    const SystemParams p = hybrid_params(od);
    const TriphotonModel m(p);
    CHECK(m.eit_loss_rate() == doctest::Approx(p.gamma21 * p.gamma31_si).epsilon(0.02));
  }
}

TEST_CASE("cascaded comparison model factorises") {
  const SystemParams p = chi5_params(8);
  const TriphotonModel m(p);
  const double a1 = 4e-9, a2 = 17e-9, b1 = 30e-9, b2 = 90e-9;
  const double lhs = m.rcc_cascaded_stub(a1, b1) * m.rcc_cascaded_stub(a2, b2);
  const double rhs = m.rcc_cascaded_stub(a1, b2) * m.rcc_cascaded_stub(a2, b1);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  const auto flat = [](double) { return 1.0; };
  CHECK(m.rcc_cascaded_stub(a1, b1, flat) == doctest::Approx(m.rcc_cond12(a1)));
}

TEST_CASE("channel weights") {
  const SystemParams p = chi5_params(8);
  const DerivedFrequencies d = derive(p);
  const ChannelWeights w = channel_weights(d, p);
  const auto diff = w.p1 - w.p2;
  CHECK(diff.real() == doctest::Approx(0.0));
  CHECK(diff.imag() == doctest::Approx(d.omega_e1));
  CHECK(w.p1.real() == doctest::Approx(d.gamma_e1 - p.gamma51));
}

TEST_CASE("overdamped arm is rejected") {
  SystemParams p = chi5_params(8);
  p.omega_c1 = 0.2;
  CHECK_THROWS_AS(TriphotonModel{p}, ValidationError);
}

TEST_CASE("model matches free functions and regime flag") {
  const SystemParams p = chi5_params(8);
  const TriphotonModel m(p);
  CHECK(m.in_regime(Regime::Chi5Dominated));
  CHECK(rcc_chi5(10e-9, 30e-9, p) == m.rcc_chi5(10e-9, 30e-9));
  CHECK(rcc_cond12(10e-9, p) == m.rcc_cond12(10e-9));
  CHECK(TriphotonModel(hybrid_params(111)).in_regime(Regime::Hybrid));
}
