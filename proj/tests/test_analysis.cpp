#include <doctest.h>

#include <random>

#include "sswm/acceptance.hpp"
#include "sswm/analysis.hpp"
#include "sswm/errors.hpp"
#include "sswm/wavepacket.hpp"

using namespace sswm;

namespace {

RateGrid grid_of(Eigen::Index n, double dt, const std::function<double(double, double)>& f) {
  const Eigen::VectorXd ax = uniform_axis(0.0, (n - 1) * dt, n);
  return evaluate_grid(ax, ax, f);
}

}  // namespace

TEST_CASE("decay time of a damped oscillation") {
  const double tau = 100e-9, w = 2 * kPi / 20e-9;
  const TimeTrace tr = sample_trace(uniform_axis(0, 800e-9, 4001),
                                    [&](double t) { return std::exp(-t / tau) * 0.5 * (1 + std::cos(w * t)); });
  const TraceFit f = fit_coherence_time(tr);
  CHECK(f.shape == TraceShape::Decay);
  CHECK(f.coherence_time == doctest::Approx(tau).epsilon(0.02));
}

TEST_CASE("period of a damped squared cosine") {
  const SystemParams p = chi5_params(8);
  const double omega = derive(p).omega_e1 * p.gamma31_si;
  const TimeTrace tr = sample_trace(uniform_axis(0, 300e-9, 3001), [&](double t) {
    return std::exp(-t / 50e-9) * std::pow(std::cos(omega * t / 2), 2);
  });
  CHECK(extract_period(tr) == doctest::Approx(2 * kPi / omega).epsilon(0.02));
  const PeriodEstimate e = estimate_period(tr);
  CHECK(e.consistent);
  CHECK(e.from_spectrum == doctest::Approx(2 * kPi / omega).epsilon(0.1));
}

TEST_CASE("traces without structure are rejected") {
  const TimeTrace flat = sample_trace(uniform_axis(0, 1e-6, 100), [](double) { return 1.0; });
  CHECK_THROWS_AS(extract_period(flat), InsufficientExtremaError);
  CHECK_THROWS_AS(fit_coherence_time(flat), InsufficientExtremaError);
  TimeTrace bad = flat;
  bad.values[3] = -1.0;
  CHECK_THROWS_AS(bad.check(), ValidationError);
}

TEST_CASE("fits are invariant under amplitude scaling") {
  const TimeTrace tr = sample_trace(uniform_axis(0, 400e-9, 2001), [](double t) {
    return std::exp(-t / 60e-9) * std::pow(std::cos(2 * kPi * t / 25e-9), 2);
  });
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> s(1e-6, 1e6);
  const TraceFit ref = fit_coherence_time(tr);
  const double period = extract_period(tr);
  for (int k = 0; k < 10; ++k) {
    TimeTrace scaled = tr;
    scaled.values *= s(rng);
    CHECK(fit_coherence_time(scaled).coherence_time == doctest::Approx(ref.coherence_time).epsilon(1e-9));
    CHECK(extract_period(scaled) == doctest::Approx(period).epsilon(1e-9));
  }
}

TEST_CASE("closed-form observables in the chi5-dominated regime") {
  const SystemParams p = chi5_params(8);
  const TriphotonModel m(p);
  const TimeTrace tr = sample_trace(uniform_axis(0, 300e-9, 3001), [&](double t) { return m.rcc_cond12(t); });
  CHECK(fit_coherence_time(tr).coherence_time * 1e9 == doctest::Approx(48.0).epsilon(0.05));
  CHECK(extract_period(tr) * 1e9 == doctest::Approx(21.0).epsilon(0.02));
}

TEST_CASE("slow-light rectangle width") {
  const TriphotonModel m(hybrid_params(111));
  const double T = m.derived().group_delay;
  const TimeTrace tr = sample_trace(uniform_axis(0, 1.5 * T, 3001), [&](double t) { return m.rcc_hybrid(5e-9, t, true); });
  const TraceFit f = fit_coherence_time(tr);
  CHECK(f.shape == TraceShape::Rectangular);
  CHECK(f.coherence_time * 1e9 == doctest::Approx(735.0).epsilon(0.05));
}

TEST_CASE("plateau classification") {
  const Eigen::VectorXd ax = uniform_axis(0, 1000e-9, 2001);
  const TimeTrace rippled = sample_trace(ax, [](double t) {
    if (t > 700e-9) return 0.0;
    return (1 - std::exp(-t / 20e-9)) * (0.85 + 0.15 * std::exp(-t / 60e-9) * std::cos(2 * kPi * t / 170e-9));
  });
  const TraceFit f = fit_coherence_time(rippled);
  CHECK(f.shape == TraceShape::Rectangular);
  CHECK(f.coherence_time * 1e9 == doctest::Approx(700.0).epsilon(0.02));
  const TimeTrace gauss = sample_trace(ax, [](double t) { return std::exp(-std::pow((t - 400e-9) / 100e-9, 2)); });
  CHECK(fit_coherence_time(gauss).shape == TraceShape::RiseDecay);
  const TimeTrace expo = sample_trace(ax, [](double t) { return std::exp(-t / 100e-9); });
  CHECK(fit_coherence_time(expo).shape == TraceShape::Decay);
}

TEST_CASE("factorizability residual") {
  const RateGrid sep = grid_of(64, 1e-9, [](double a, double b) { return std::exp(-a / 5e-9) * (1 + std::sin(b * 1e8)); });
  CHECK(factorizability_residual(sep) < 1e-10);
  const SystemParams p = chi5_params(8);
  const TriphotonModel m(p);
  const RateGrid stub = grid_of(128, 1e-9, [&](double a, double b) { return m.rcc_cascaded_stub(a, b); });
  CHECK(factorizability_residual(stub) < 1e-12);
  const RateGrid r = grid_of(128, 1e-9, [&](double a, double b) { return m.rcc_chi5(a, b); });
  const double res = factorizability_residual(r);
  CHECK(res > 0.1);
  CHECK(res <= 2.0);
  RateGrid t = r;
  t.values = r.values.transpose().eval();
  CHECK(factorizability_residual(t) == doctest::Approx(res).epsilon(1e-12));
  RateGrid zero = r;
  zero.values.setZero();
  CHECK_THROWS_AS(factorizability_residual(zero), ValidationError);
}

TEST_CASE("ordering violation mass") {
  const SystemParams p = chi5_params(8);
  const TriphotonModel m(p);
  const Eigen::VectorXd ax = uniform_axis(-50e-9, 150e-9, 201);
  const RateGrid r = evaluate_grid(ax, ax, [&](double a, double b) { return m.rcc_chi5(a, b); });
  CHECK(ordering_violation_mass(r) == 0.0);
  RateGrid mirrored = r;
  mirrored.values.setZero();
  mirrored.values(100 + 10, 100 + 20) = 1.0;  // tau12 > 0, tau13 > tau12
  mirrored.values(100 - 10, 100 - 20) = 1.0;  // mirrored through the origin
  CHECK(ordering_violation_mass(mirrored) == doctest::Approx(0.5));
}

TEST_CASE("precursor detection") {
  const DerivedFrequencies d = derive(hybrid_params(111));
  const double T = d.group_delay;
  const Eigen::VectorXd ax = uniform_axis(0, 1.5 * T, 1501);
  const TimeTrace rect = sample_trace(ax, [&](double t) { return t <= T ? 1.0 : 0.0; });
  CHECK_FALSE(detect_precursor(rect, d));
  const TimeTrace spike = sample_trace(ax, [&](double t) {
    return (t <= T ? 1.0 : 0.0) + 3.0 * std::exp(-std::pow((t - 0.02 * T) / (0.005 * T), 2));
  });
  const PrecursorResult pr = find_precursor(spike, d);
  CHECK(pr.detected);
  CHECK(pr.early_peak / pr.median > 3.0);
  const DerivedFrequencies c = derive(chi5_params(8));
  const TriphotonModel m(chi5_params(8));
  const TimeTrace tr = sample_trace(uniform_axis(0, 300e-9, 3001), [&](double t) { return m.rcc_chi5(1e-9, t); });
  CHECK_FALSE(detect_precursor(tr, c));
}

TEST_CASE("local maxima are refined between samples") {
  const TimeTrace tr = sample_trace(uniform_axis(0, 10, 101), [](double t) { return 2 + std::cos(t - 3.33); });
  const auto peaks = local_maxima(tr);
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0].t == doctest::Approx(3.33).epsilon(1e-3));
  CHECK(peaks[1].t - peaks[0].t == doctest::Approx(2 * kPi).epsilon(1e-3));
}

TEST_CASE("tau23 marginal of a separable sequential decay") {
  const double a = 1 / 10e-9, b = 1 / 30e-9;
  const RateGrid r = grid_of(256, 0.5e-9, [&](double t12, double t13) {
    return t13 >= t12 ? std::exp(-a * t12) * std::exp(-b * (t13 - t12)) : 0.0;
  });
  const TimeTrace m = marginal_tau23(r);
  const TimeTrace c = crop(m, 0, 20e-9);
  for (Eigen::Index k = 1; k < c.size(); ++k) {
    const double expect = std::exp(-b * (c.t_axis[k] - c.t_axis[0]));
    CHECK(c.values[k] / c.values[0] == doctest::Approx(expect).epsilon(0.02));
  }
}

TEST_CASE("report for the closed-form chi5 rate") {
  const SystemParams p = chi5_params(8);
  const TriphotonModel m(p);
  const RateGrid r = grid_of(800, 0.75e-9, [&](double a, double b) { return m.rcc_chi5(a, b); });
  const ObservableReport rep = observe(r, m.derived());
  CHECK(rep.second_axis == "tau13-tau12");
  CHECK(rep.period12 * 1e9 == doctest::Approx(20.87).epsilon(0.02));
  CHECK(rep.tau_c_12 * 1e9 == doctest::Approx(48.2).epsilon(0.05));
  CHECK(rep.tau_c_13 * 1e9 == doctest::Approx(52.0).epsilon(0.05));
  CHECK(rep.ordering_violation_mass == 0.0);
  CHECK_FALSE(rep.precursor_detected);
}
