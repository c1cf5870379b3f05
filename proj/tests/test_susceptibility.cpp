#include <doctest.h>

#include <random>

#include "sswm/acceptance.hpp"
#include "sswm/susceptibility.hpp"

using namespace sswm;
using cplx = std::complex<double>;

namespace {

// chi5 at zero c1 detuning, written as pump-arm response times EIT-arm response.
cplx chi5_factored(double d2, double d3, const SystemParams& p) {
  const cplx i(0, 1);
  const double s = d2 + d3;
  const double w1 = std::norm(p.omega_c1), w2 = std::norm(p.omega_c2);
  const cplx pump = (-i * p.delta_p - p.gamma41) * (-i * p.delta_p - p.gamma51) + w1;
  const cplx arm1 = (i * s - p.gamma51) / ((i * s - p.gamma41) * (i * s - p.gamma51) + w1);
  const cplx arm2 = 1.0 / ((i * d3 - p.gamma21) * (i * d3 - 1.0) + w2);
  return p.dipole_scale * -i * arm1 * arm2 / pump;
}

}  // namespace

TEST_CASE("chi5 separates into two dressed arms") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> d(-60, 60);
  const SystemParams p = spectrum_params();
  for (int k = 0; k < 200; ++k) {
    const double d2 = d(rng), d3 = d(rng);
    const cplx a = chi5(d2, d3, p), b = chi5_factored(d2, d3, p);
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(b));
  }
}

TEST_CASE("spectrum shows four resonances at the channel positions") {
  const SystemParams p = spectrum_params();
  const auto g = spectral_grid(p, 160.0, 2048);
  const auto peaks = find_resonances(g);
  REQUIRE(peaks.size() == 4);
  for (const auto& c : channel_spectrum(derive(p))) {
    bool hit = false;
    for (const auto& r : peaks) {
      hit = hit || (std::abs(r.delta2 - c.delta2) <= 1.5 * g.spacing2() &&
                    std::abs(r.delta3 - c.delta3) <= 1.5 * g.spacing3());
    }
    CHECK(hit);
  }
}

TEST_CASE("|chi5| is centrally symmetric without c1 detuning") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> d(-80, 80), oc(2, 50), dp(-200, 200);
  for (int k = 0; k < 100; ++k) {
    SystemParams p;
    p.omega_c1 = oc(rng);
    p.omega_c2 = oc(rng);
    p.delta_p = dp(rng);
    const double d2 = d(rng), d3 = d(rng);
    const double a = std::abs(chi5(d2, d3, p)), b = std::abs(chi5(-d2, -d3, p));
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
  SystemParams p;
  p.delta_c1 = 15.0;
  CHECK(std::abs(chi5(20.0, 20.0, p)) / std::abs(chi5(-20.0, -20.0, p)) < 0.9);
}

TEST_CASE("grid symmetry matches pointwise symmetry") {
  const auto g = spectral_grid(spectrum_params(), 100.0, 256);
  const Eigen::Index n = g.values.rows();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      worst = std::max(worst, std::abs(std::abs(g.values(i, j)) - std::abs(g.values(n - 1 - i, n - 1 - j))));
    }
  }
  CHECK(worst <= 1e-12 * g.values.cwiseAbs().maxCoeff());
}

TEST_CASE("detuning function") {
  CHECK(phi(cplx(0.0)) == cplx(1.0));
  for (double x : {1e-7, 9.99e-7}) {
    const cplx series = phi(cplx(x));
    const cplx direct = (1.0 - std::exp(cplx(0, -x))) / cplx(0, x);
    CHECK(std::abs(series - direct) < 1e-9);
  }
  const cplx below = phi(cplx(0.999999e-6, 0)), above = phi(cplx(1.000001e-6, 0));
  CHECK(std::abs(below - above) < 1e-9);
  for (double x = 0.1; x < 30; x *= 1.7) {
    CHECK(std::abs(phi(cplx(x))) == doctest::Approx(std::abs(std::sin(x / 2) / (x / 2))));
  }
  CHECK(std::abs(phi(cplx(2 * kPi))) < 1e-15);
}

TEST_CASE("phase-matching modes") {
  const SystemParams p = hybrid_params(111);
  const EitDispersion eit = eit_dispersion(p);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> d(-3, 3);
  for (int k = 0; k < 50; ++k) {
    const double d2 = d(rng), d3 = d(rng);
    CHECK(detuning_factor(d2, d3, p, eit, PhaseMatching::Unity) == cplx(1.0));
    CHECK(std::abs(detuning_factor(d2, d3, p, eit, PhaseMatching::IdealRect)) <= 1.0 + 1e-12);
  }
  // Loss shrinks the line-centre response.
  CHECK(std::abs(detuning_factor(0, 0, p, eit, PhaseMatching::Linear)) < 1.0);
  CHECK(std::abs(detuning_factor(0, 0, p, eit, PhaseMatching::IdealRect)) == doctest::Approx(1.0));
}

TEST_CASE("calibrated EIT response reproduces the group velocity") {
  for (double od : {37.0, 111.0}) {
    const SystemParams p = hybrid_params(od);
    const EitDispersion eit = eit_dispersion(p);
    const double h = 1e-5;
    const double slope = (chi3_eit(h, p).real() - chi3_eit(-h, p).real()) / (2 * h * p.gamma31_si);
    CHECK(p.omega31 / kSpeedOfLight * slope ==
          doctest::Approx(1.0 / eit.group_velocity_nu3).epsilon(3 * p.gamma21 / std::norm(p.omega_c2)));
  }
}

TEST_CASE("full and linearised mismatch share value and slope at line centre") {
  const SystemParams p = hybrid_params(111);
  const EitDispersion eit = eit_dispersion(p);
  CHECK(std::abs(delta_k(0, 0, p, eit) - delta_k_dispersive(0, 0, p)) < 1e-9);
  const double h = 1e-4;
  const double lin = (delta_k(0, h, p, eit) - delta_k(0, -h, p, eit)).real() / (2 * h);
  const double full = (delta_k_dispersive(0, h, p) - delta_k_dispersive(0, -h, p)).real() / (2 * h);
  // The group-velocity formula drops terms of order gamma21 / |Omega_c2|^2.
  CHECK(full == doctest::Approx(lin).epsilon(3 * p.gamma21 / std::norm(p.omega_c2)));
}

TEST_CASE("spectral grid construction") {
  const SystemParams p = spectrum_params();
  CHECK_THROWS_AS(spectral_grid(p, 100.0, 300), ValidationError);
  CHECK_THROWS_AS(spectral_grid(p, 100.0, 128), ValidationError);
  SystemParams zero = p;
  zero.gamma21 = 0.0;
  CHECK_THROWS_AS(spectral_grid(zero, 100.0, 256), ValidationError);
  const auto g = spectral_grid(p, 100.0, 256);
  CHECK_NOTHROW(g.check());
  CHECK(g.delta2_axis[0] == doctest::Approx(-g.delta2_axis[255]));
  CHECK(g.param_hash == param_hash(p));
  CHECK(g.singular_replacements == 0);
  CHECK(g.values(17, 201) == chi5(g.delta2_axis[17], g.delta3_axis[201], p));
}

TEST_CASE("resonance search on synthetic grids") {
  const auto ax = centered_axis(10.0, 64);
  auto g = SpectralGrid<double>::from_function(ax, ax, [](double x, double y) {
    return cplx(std::exp(-(x - 3) * (x - 3) - y * y) + 0.5 * std::exp(-(x + 4) * (x + 4) - (y - 4) * (y - 4)));
  });
  auto peaks = find_resonances(g);
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0].magnitude > peaks[1].magnitude);
  CHECK(peaks[0].delta2 == doctest::Approx(3.0).epsilon(0.1));
  CHECK(find_resonances(g, 0.6).size() == 1);
  g.values.setZero();
  CHECK(find_resonances(g).empty());
  g.values.setConstant(1.0);
  CHECK(find_resonances(g).empty());
}
