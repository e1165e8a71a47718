#include <doctest.h>

#include <philap/config.hpp>

#include <algorithm>
#include <sstream>

using namespace philap;

namespace {

ProblemConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("every preset round-trips through the canonical echo") {
  for (const PresetInfo& p : list_presets()) {
    const ProblemConfig c = preset(p.name);
    CHECK(parse(echo_config(c)) == c);
    CHECK_NOTHROW(to_spec(c));
  }
}

TEST_CASE("preset catalog contains the reference problems") {
  std::vector<std::string> names;
  for (const PresetInfo& p : list_presets()) names.push_back(p.name);
  for (const char* n : {"pendulum_anticoercive", "pendulum_semicoercive", "exp_steklov",
                        "strip_sigma_half", "periodic_cos", "dirichlet_infeasible_gap",
                        "manufactured_neumann"}) {
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  }
  CHECK_THROWS_AS(preset("nope"), ConfigError);
}

TEST_CASE("errors name the offending field") {
  const std::string ok = "[problem]\nT = 1\nM = 10\n[phi]\nvariant = relativistic\na = 1\n"
                         "[boundary]\nvariant = neumann\n";
  CHECK_NOTHROW(parse(ok));
  CHECK(error_of("[problem]\nT = 1\nM = 10\n[phi]\nvariant = relativistic\n"
                 "[boundary]\nvariant = neumann\n")
            .find("phi.a") != std::string::npos);
  CHECK(error_of(ok + "[solver]\nbogus = 3\n").find("solver.bogus") != std::string::npos);
  CHECK(error_of(ok + "[weird]\nx = 1\n").find("weird") != std::string::npos);
  CHECK(error_of("[problem]\nT = abc\nM = 10\n[phi]\nvariant = relativistic\na = 1\n"
                 "[boundary]\nvariant = neumann\n")
            .find("problem.T") != std::string::npos);
}

TEST_CASE("invalid variants are rejected at spec construction") {
  ProblemConfig c = preset("exp_steklov");
  c.phi_variant = "classical";
  CHECK_THROWS_AS(to_spec(c), ConfigError);
  c = preset("exp_steklov");
  c.a = -1.0;
  CHECK_THROWS(to_spec(c));
}

TEST_CASE("list parsing and number formatting") {
  CHECK(parse_list("1, 2.5,-3", "x") == std::vector<double>{1.0, 2.5, -3.0});
  CHECK_THROWS_AS(parse_list("1,,2", "x"), ConfigError);
  CHECK(std::stod(format_double(0.1)) == 0.1);
  CHECK(format_double(1e300) == "1e+300");
}

TEST_CASE("solution CSV round trip") {
  ProblemConfig c = preset("periodic_cos");
  c.M = 20;
  const ProblemSpec s = to_spec(c);
  const GridFunction u = GridFunction::sample(s.grid, 1, [](double t) {
    return Vec::Constant(1, 0.1 * std::sin(t));
  });
  std::ostringstream out;
  write_solution_csv(out, s, u, EnergyMode::full());
  std::istringstream in(out.str());
  const GridFunction v = read_solution_csv(in, s);
  CHECK(sup_distance(u, v) == 0.0);
}
