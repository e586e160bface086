#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <numbers>
#include <random>

#include "dfgr/commands.hpp"
#include "dfgr/dynamics.hpp"

using namespace dfgr;

TEST_CASE("defaults") {
  for (const char* text : {"", "model:\n", "model:\n  langevin:\n"}) {
    const RunConfig c = parse_config(text);
    CHECK(c.model == RunConfig::Model::Langevin);
    CHECK(c.langevin.omega1 == 2e-4);
    CHECK(c.langevin.omega2 == 4e-4);
    CHECK(c.langevin.gamma == 4e-4);
    CHECK(c.langevin.W_mag == 0.05);
    CHECK(c.langevin.beta == 1000.0);
    CHECK(c.langevin.V == Complex(1e-4));
    CHECK(c.grid.t_max == 25000.0);
  }
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_WITH_AS(parse_config("model:\n  langevin:\n    beta: -1\n"), "beta must be positive", ValidationError);

  try {
    parse_config("model:\n  langevin:\n    omega3: 1\n");
    FAIL("accepted an unknown key");
  } catch (const ParseError& e) {
    CHECK(std::strstr(e.what(), "omega3") != nullptr);
    CHECK(std::strstr(e.what(), "line 3") != nullptr);
  }
  CHECK_THROWS_AS(parse_config("grid: {t_max: 1000, stepz: 10}"), ParseError);
  CHECK_THROWS_AS(parse_config("model:\n  langevin:\n    d: eight\n"), ParseError);
  CHECK_THROWS_AS(parse_config("model: [1, 2"), ParseError);
  CHECK_THROWS_AS(parse_config("model:\n  langevin: {}\n  raw: {omega2_g: [[1]], omega2_e: [[1]], W: [0]}\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse_config("grid: {steps: 4}"), ValidationError);
  CHECK_THROWS_AS(parse_config("output: {format: parquet}"), ValidationError);
  CHECK_THROWS_AS(parse_config("model:\n  langevin: {beta: 1000, temperature: 300}\n"), ParseError);
}

TEST_CASE("values") {
  const RunConfig c = parse_config(R"(
model:
  langevin:
    theta: pi/4
    phi: -3*pi/4
    eta: 2pi
    V: [1e-4, 2e-5]
    temperature: 300
    bath: {modes_per_bath: 5, cutoff: 5e-3}
sweep:
  phi: {min: 0, max: pi, points: 5}
  eta: [0, 0.5]
marcus: {W: [0, 0.02, 0.05]}
figure: test
)");
  CHECK(c.langevin.theta == doctest::Approx(std::numbers::pi / 4));
  CHECK(c.langevin.phi == doctest::Approx(-0.75 * std::numbers::pi));
  CHECK(c.langevin.eta == doctest::Approx(2 * std::numbers::pi));
  CHECK(c.langevin.V == Complex(1e-4, 2e-5));
  CHECK(c.langevin.beta == doctest::Approx(beta_from_kelvin(300)));
  CHECK(c.langevin.bath.modes_per_bath == 5);
  REQUIRE(c.phi_axis.size() == 5);
  CHECK(c.phi_axis[4] == doctest::Approx(std::numbers::pi));
  CHECK(c.eta_axis == std::vector<double>{0, 0.5});
  CHECK(c.marcus.W.size() == 3);
  CHECK(c.figure == "test");
}

TEST_CASE("raw model block") {
  const RunConfig c = parse_config(R"(
model:
  raw:
    omega2_g: [[4e-8, 0], [0, 1.6e-7]]
    omega2_e: [[4e-8, 0], [0, 1.6e-7]]
    lambda_g: [-2e-5, 0]
    W: [0.05, 0]
    E_g: 0.01
    beta: 2000
)");
  CHECK(c.model == RunConfig::Model::Raw);
  CHECK(c.beta() == 2000);
  const DuschinskiiSystem sys = c.system();
  CHECK(sys.size() == 2);
  CHECK(std::abs(sys.d[0]) == doctest::Approx(500.0));
  CHECK_THROWS_AS(parse_config("model:\n  raw: {omega2_g: [[1]]}\n"), ParseError);
}

TEST_CASE("CSV round trip is lossless") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mant(-1, 1);
  std::uniform_int_distribution<int> expo(-300, 300);
  Table t;
  t.columns = {"x", "note"};
  std::vector<double> values;
  for (int k = 0; k < 500; ++k) {
    values.push_back(std::ldexp(mant(rng), expo(rng)));
    t.add({format_number(values.back()), k % 7 ? "" : "failed, \"quoted\"\nacross lines"});
  }
  t.add({format_number(std::nan("")), "nan"});
  const Table back = parse_csv(to_csv(t));
  REQUIRE(back.rows.size() == t.rows.size());
  CHECK(back.columns == t.columns);
  for (std::size_t k = 0; k < values.size(); ++k) {
    CHECK(cell_number(back.rows[k][0]) == values[k]);
    CHECK(back.rows[k][1] == t.rows[k][1]);
  }
  CHECK(std::isnan(cell_number(back.rows.back()[0])));
  CHECK(back.column("note") == 1);
}

TEST_CASE("content hash matches git blob ids") {
  CHECK(content_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(content_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("resolved echo identifies the run") {
  const std::string a = parse_config("model:\n  langevin: {phi: 0.5}\n").echo().dump();
  const std::string b = parse_config("model: {langevin: {phi: 0.5, omega1: 2e-4}}").echo().dump();
  const std::string c = parse_config("model:\n  langevin: {phi: 0.6}\n").echo().dump();
  CHECK(a == b);
  CHECK(content_hash(a) != content_hash(c));
}

TEST_CASE("peak abscissa") {
  std::vector<double> x, y;
  for (int k = 0; k < 9; ++k) {
    x.push_back(-0.04 + 0.005 * k);
    y.push_back(1.0 - std::pow((x.back() + 0.0213) / 0.01, 2));
  }
  CHECK(peak_abscissa(x, y) == doctest::Approx(-0.0213));
  CHECK(peak_abscissa({0, 1, 2}, {3, 2, 1}) == 0.0);
}

TEST_CASE("commands") {
  CHECK_THROWS_AS(run_command("nonsense", parse_config("")), ConfigError);
  CHECK(command_names().size() == 8);

  const RunConfig cfg = parse_config("model:\n  langevin: {bath: {modes_per_bath: 1}}\ngrid: {steps: 250}\n");
  const CommandOutput a = run_command("polarization", cfg);
  CHECK(a.table.columns == std::vector<std::string>{"t", "P_up", "P_down", "P_g", "chi"});
  CHECK(a.table.rows.size() == 251);
  CHECK(to_csv(a.table) == to_csv(run_command("polarization", cfg).table));
  CHECK(a.exit_code == 0);

  CHECK_THROWS_AS(run_command("sweep", cfg), ValidationError);
  const RunConfig raw = parse_config("model:\n  raw: {omega2_g: [[4e-8]], omega2_e: [[4e-8]], W: [0.01]}\n");
  CHECK_THROWS_AS(run_command("converge-bath", raw), ValidationError);
}

TEST_CASE("every preset parses and names its figure") {
  int n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(DFGR_PRESET_DIR)) {
    if (entry.path().extension() != ".yaml") continue;
    CAPTURE(entry.path().string());
    const RunConfig c = load_config(entry.path().string());
    const bool named = c.figure.rfind("Fig", 0) == 0 || c.figure.rfind("Appendix", 0) == 0;
    CHECK(named);
    ++n;
  }
  CHECK(n >= 10);
}
