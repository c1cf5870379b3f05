#include <doctest.h>

#include <fstream>
#include <sstream>

#include "sswm/acceptance.hpp"
#include "sswm/errors.hpp"
#include "sswm/scenario.hpp"

using namespace sswm;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(name = mini
params.gamma31 = 2pi*3MHz
params.gamma21 = 0.02gamma31
params.gamma41 = 1gamma31
params.gamma51 = 0.1gamma31
params.delta_p = 2pi*-300MHz
params.delta_c1 = 0gamma31
params.delta_c2 = 0gamma31
params.length_L = 0.15cm
params.omega_c1 = 8gamma31
params.omega_c2 = 8gamma31
params.optical_depth = 0.38
oracle.n_points = 256
outputs.t.quantity = cond_tau12
outputs.t.t_max_ns = 200
)";

std::string without_line(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::string out, line;
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) != 0) out += line + "\n";
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("sswm_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void check_close(const SystemParams& a, const SystemParams& b) {
  CHECK(a.gamma31_si == doctest::Approx(b.gamma31_si).epsilon(1e-14));
  CHECK(a.gamma21 == doctest::Approx(b.gamma21).epsilon(1e-14));
  CHECK(a.gamma51 == doctest::Approx(b.gamma51).epsilon(1e-14));
  CHECK(a.delta_p == doctest::Approx(b.delta_p).epsilon(1e-14));
  CHECK(a.length_L == doctest::Approx(b.length_L).epsilon(1e-14));
  CHECK(a.omega_c1.real() == doctest::Approx(b.omega_c1.real()).epsilon(1e-14));
  CHECK(a.omega_c2.real() == doctest::Approx(b.omega_c2.real()).epsilon(1e-14));
  CHECK(a.optical_depth == doctest::Approx(b.optical_depth).epsilon(1e-14));
}

}  // namespace

TEST_CASE("shipped presets load and match the reference parameter sets") {
  const auto names = list_scenarios();
  CHECK(names.size() == 7);
  for (const auto& n : names) CHECK_NOTHROW(load_scenario(resolve_scenario(n)));
  check_close(load_scenario(resolve_scenario("spectrum")).params, spectrum_params());
  check_close(load_scenario(resolve_scenario("chi5-rate")).params, chi5_params(8));
  check_close(load_scenario(resolve_scenario("hybrid-rate")).params, hybrid_params(111));
  CHECK(load_scenario(resolve_scenario("hybrid-cond-tau13")).oracle.ideal_rect);
  CHECK_THROWS_AS(resolve_scenario("no-such-preset"), ConfigError);
}

TEST_CASE("serialize and parse round trip") {
  for (const auto& n : list_scenarios()) {
    const Scenario s = load_scenario(resolve_scenario(n));
    const Scenario back = parse_scenario(serialize(s));
    CHECK(back == s);
    CHECK(serialize(back) == serialize(s));
  }
  Scenario s = parse_scenario(kMinimal);
  s.params.gamma53 = 0.37;
  s.params.delta_c1 = -1.0 / 3.0;
  s.params.omega21 = 12345.678;
  s.oracle.window = {WindowKind::Tukey, 0.25};
  s.oracle.dispersion = PhaseMatching::Linear;
  s.outputs.push_back({"g", Quantity::RateNumeric, Format::Json, 123.5, 3});
  CHECK(parse_scenario(serialize(s)) == s);
}

TEST_CASE("missing keys are named") {
  for (const std::string key : {"params.omega_c1", "params.optical_depth", "name", "outputs.t.quantity"}) {
    try {
      parse_scenario(without_line(kMinimal, key));
      FAIL("expected ConfigError for " << key);
    } catch (const ConfigError& e) {
      CHECK(e.key() == key);
      CHECK(std::string(e.what()).find("missing required key") != std::string::npos);
    }
  }
}

TEST_CASE("bad entries report key and line") {
  std::string text = kMinimal;
  text += "params.colour = red\n";
  try {
    parse_scenario(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "params.colour");
    CHECK(e.line() == 16);
  }
  CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "oracle.n_points = many\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "oracle.n_points = 1000\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "name = again\n"), ConfigError);
  std::string neg = kMinimal;
  neg.replace(neg.find("0.02gamma31"), 11, "-0.02gamma31");
  CHECK_THROWS_AS(parse_scenario(neg), ConfigError);
}

TEST_CASE("unit parsing") {
  const double g = 2 * kPi * 3e6;
  CHECK(parse_frequency("2pi*3MHz", g) == doctest::Approx(1.0));
  CHECK(parse_frequency("5gamma31", g) == 5.0);
  CHECK(parse_frequency("2pi*-300MHz", g) == doctest::Approx(-100.0));
  CHECK(parse_frequency("1.8849555921538759e7", g) == doctest::Approx(1.0));
  CHECK(parse_angular_frequency("1gamma31", g) == doctest::Approx(g));
  CHECK(parse_length("0.15cm") == doctest::Approx(0.0015));
  CHECK(parse_length("1.5mm") == doctest::Approx(0.0015));
  CHECK(parse_length("2m") == 2.0);
  CHECK_THROWS(parse_frequency("fast", g));
  CHECK_THROWS(parse_length("3 furlongs"));
}

TEST_CASE("parameter access") {
  SystemParams p;
  for (const auto& name : sweepable_parameters()) {
    set_parameter(p, name, 3.5);
    CHECK(get_parameter(p, name) == 3.5);
  }
  CHECK_THROWS_AS(set_parameter(p, "colour", 1.0), ValidationError);
}

TEST_CASE("runs are byte-for-byte reproducible") {
  const Scenario s = parse_scenario(kMinimal);
  RunOptions a, b;
  a.out_dir = fresh_dir("a");
  b.out_dir = fresh_dir("b");
  const RunResult ra = run_scenario(s, a), rb = run_scenario(s, b);
  REQUIRE(ra.files.size() == 1);
  REQUIRE(rb.files.size() == 1);
  CHECK(ra.files[0].filename() == "mini_t.csv");
  const std::string text = slurp(ra.files[0]);
  CHECK(text == slurp(rb.files[0]));
  CHECK(text.rfind("# scenario: mini\n# param_hash: 0x", 0) == 0);
  CHECK(text.find("t_s,value") != std::string::npos);
  REQUIRE(ra.report);
}

TEST_CASE("json output") {
  Scenario s = parse_scenario(kMinimal);
  s.outputs[0].format = Format::Json;
  RunOptions o;
  o.out_dir = fresh_dir("json");
  const RunResult r = run_scenario(s, o);
  REQUIRE(r.files.size() == 1);
  CHECK(r.files[0].extension() == ".json");
  CHECK(slurp(r.files[0]).find("\"values\"") != std::string::npos);
}

TEST_CASE("spectrum preset finds four resonances") {
  RunOptions o;
  o.out_dir = fresh_dir("spectrum");
  const RunResult r = run_scenario(load_scenario(resolve_scenario("spectrum")), o);
  CHECK(r.resonances.size() == 4);
}

TEST_CASE("sweeps") {
  const Scenario s = parse_scenario(kMinimal);
  RunOptions o;
  o.out_dir = fresh_dir("sweep");
  CHECK_THROWS_AS(run_sweep(s, "omega_c1", {}, o), ValidationError);
  CHECK_THROWS_AS(run_sweep(s, "colour", {1.0}, o), ValidationError);
  const SweepResult r = run_sweep(s, "omega_c1", {4.0, 8.0}, o);
  CHECK(r.rows.size() == 2);
  CHECK(r.files.size() == 2);
  const std::string summary = slurp(r.summary);
  CHECK(summary.find("\nomega_c1_gamma31,period12_s,") != std::string::npos);
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 6);
  CHECK(r.rows[0].report.period12 > r.rows[1].report.period12);
}
