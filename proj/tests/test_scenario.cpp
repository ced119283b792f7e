#include "doctest.h"

#include <fstream>
#include <sstream>

#include "polelift/error.hpp"
#include "polelift/scenario.hpp"

using namespace polelift;

namespace {

std::string read(const std::string& name) {
  std::ifstream in(std::string(POLELIFT_SOURCE_DIR) + "/scenarios/" + name);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("shipped demo loads, validates and hashes stably") {
    const ScenarioConfig c = load_scenario(std::string(POLELIFT_SOURCE_DIR) + "/scenarios/demo_two_poles.yaml");
    CHECK(c.name == "demo_two_poles");
    REQUIRE(c.mission.has_value());
    CHECK(c.mission->poles.size() == 2);
    CHECK(c.vehicle.mass == 8.26);
    CHECK(c.motor_time_constants(0) == 0.03);
    CHECK(c.motor_time_constants(7) == 0.015);
    const std::string h = config_hash(c);
    CHECK(h.size() == 64);
    CHECK(h == config_hash(load_scenario(std::string(POLELIFT_SOURCE_DIR) + "/scenarios/demo_two_poles.yaml")));
    // Dump re-parses to the same configuration.
    CHECK(config_hash(parse_scenario(canonical_dump(c))) == h);
  }

  TEST_CASE("every shipped scenario loads") {
    for (const char* name : {"demo_two_poles.yaml", "unreachable_grasp.yaml", "hover_pole.yaml", "lateral_step.yaml"}) {
      CHECK_NOTHROW(parse_scenario(read(name)));
    }
  }

  TEST_CASE("omitted gains and weights get defaults that are echoed") {
    const ScenarioConfig c = parse_scenario(read("demo_two_poles.yaml"));
    CHECK(c.gains.k_p == ControlGains{}.k_p);
    CHECK(c.weights.h_slack == 1e19);
    CHECK_FALSE(c.loaded_gains.has_value());
    const std::string dump = canonical_dump(c);
    CHECK(dump.find("gains:\n  k_p: 6.0") != std::string::npos);
    CHECK(dump.find("h_slack: 1e+19") != std::string::npos);
  }

  TEST_CASE("explicit gains are read; partial sections are rejected") {
    const std::string base = read("demo_two_poles.yaml");
    const std::string with = base + "gains:\n  k_p: 7\n  k_v: 5\n  k_i: 0.5\n  k_R: 10\n  k_omega: 3\n";
    CHECK(parse_scenario(with).gains.k_p == 7.0);
    const std::string partial = base + "gains:\n  k_p: 7\n";
    CHECK_THROWS_WITH_AS(parse_scenario(partial), doctest::Contains("gains.k_v"), ConfigError);
  }

  TEST_CASE("r_max >= R is rejected citing the radial tolerance") {
    const std::string bad = replace(read("demo_two_poles.yaml"), "pole_radius_max: 0.075", "pole_radius_max: 0.125");
    try {
      parse_scenario(bad);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.key_path() == "gripper");
      CHECK(std::string(e.what()).find("radial tolerance") != std::string::npos);
    }
  }

  TEST_CASE("unknown keys are rejected with key path and line") {
    const std::string bad = replace(read("demo_two_poles.yaml"), "  com_offset:", "  com_ofset:");
    try {
      parse_scenario(bad);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      // The missing key is reported first (required, read before the scan).
      CHECK(e.key_path() == "vehicle.com_offset");
      CHECK(e.line() > 0);
    }
    const std::string extra = replace(read("demo_two_poles.yaml"), "  gravity: 9.81", "  gravity: 9.81\n  colour: red");
    try {
      parse_scenario(extra);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.key_path() == "vehicle.colour");
      CHECK(e.line() == 17);
    }
  }

  TEST_CASE("physical parameters have no defaults") {
    const std::string no_mass = replace(read("demo_two_poles.yaml"), "  mass: 8.26\n", "");
    CHECK_THROWS_WITH_AS(parse_scenario(no_mass), doctest::Contains("vehicle.mass"), ConfigError);
    const std::string no_battery = replace(read("demo_two_poles.yaml"), "  discharge_slope: 0.007\n", "");
    CHECK_THROWS_AS(parse_scenario(no_battery), ConfigError);
  }

  TEST_CASE("type and range errors point at the key") {
    const std::string text = replace(read("demo_two_poles.yaml"), "  mass: 8.26", "  mass: heavy");
    CHECK_THROWS_WITH_AS(parse_scenario(text), doctest::Contains("vehicle.mass (line"), ConfigError);
    const std::string axis = replace(read("demo_two_poles.yaml"), "axis: [0.0, 0.0, 1.0]", "axis: [0.0, 0.0, 2.0]");
    CHECK_THROWS_WITH_AS(parse_scenario(axis), doctest::Contains("propellers[0]"), ConfigError);
    const std::string pole = replace(read("demo_two_poles.yaml"), "radius: 0.05", "radius: 0.09");
    CHECK_THROWS_AS(parse_scenario(pole), ConfigError);
    CHECK_THROWS_AS(parse_scenario("format: 1\nname: [unclosed\n"), ConfigError);
    CHECK_THROWS_AS(parse_scenario(""), ConfigError);
  }

  TEST_CASE("mission and flight are mutually exclusive") {
    const std::string both = read("demo_two_poles.yaml") + read("hover_pole.yaml").substr(read("hover_pole.yaml").find("flight:"));
    CHECK_THROWS_AS(parse_scenario(both), ConfigError);
  }
}
