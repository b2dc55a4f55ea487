#include <doctest.h>

#include "platoon/config.hpp"

using namespace platoon::cli;

TEST_CASE("defaults are a valid configuration with the published values") {
  RunConfig cfg;
  cfg.validate();
  CHECK(cfg.horizon == 10);
  CHECK(cfg.dt == 0.1);
  CHECK(cfg.q1 == 5.0);
  CHECK(cfg.q2 == 5.0);
  CHECK(cfg.r == 10.0);
  CHECK(cfg.a_min == -5.0);
  CHECK(cfg.a_max == 5.0);
  CHECK(cfg.v_min == -35.0);
  CHECK(cfg.v_max == 35.0);
  CHECK(cfg.delta_m == 20.0);
  CHECK(cfg.p_def == 0.95);
  CHECK(cfg.c1 == -3.0227);
  CHECK(cfg.b4 == -0.0254);
}

TEST_CASE("section headers prefix the keys") {
  const RunConfig cfg = parse_config_text(
      "config_version = 1\n"
      "[scenario]\n"
      "name = braking\n"
      "duration_s = 30\n"
      "reference_mps = 0:20;15:10\n"
      "[mpc]\n"
      "q1 = 7.5\n");
  CHECK(cfg.scenario_name == "braking");
  CHECK(cfg.q1 == 7.5);
  const auto sched = cfg.scenario().reference_schedule;
  REQUIRE(sched.size() == 2);
  CHECK(sched[1].first == 15.0);
  CHECK(sched[1].second == 10.0);
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_AS(parse_config_text("[mpc]\nhorizont = 10\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("nonsense = 1\n"), ConfigError);
}

TEST_CASE("malformed values are rejected") {
  CHECK_THROWS_AS(parse_config_text("[mpc]\nq1 = fast\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[mpc]\nq1\n"), ConfigError);
}

TEST_CASE("semantic validation") {
  CHECK_THROWS_AS(parse_config_text("[mpc]\np_def = 0.4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[mpc]\nhorizon = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[scenario]\nn_av = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[mpc]\ndt = 0.2\n"), ConfigError);
}

TEST_CASE("the manifest reparses to itself") {
  RunConfig cfg;
  apply_override(cfg, "scenario.duration_s=12.5");
  apply_override(cfg, "gp.max_points=64");
  const std::string manifest = manifest_text(cfg);
  const RunConfig back = parse_config_text(manifest);
  CHECK(manifest_text(back) == manifest);
  CHECK(back.duration_s == 12.5);
  CHECK(back.max_points == 64);
}

TEST_CASE("overrides reject unknown keys") {
  RunConfig cfg;
  CHECK_THROWS_AS(apply_override(cfg, "mpc.bogus=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "no_equals"), ConfigError);
}

TEST_CASE("reference schedule parser") {
  const auto s = parse_reference_schedule("0:20; 15:10");
  REQUIRE(s.size() == 2);
  CHECK(s[0] == std::pair{0.0, 20.0});
  CHECK(s[1] == std::pair{15.0, 10.0});
  CHECK_THROWS_AS(parse_reference_schedule("20"), ConfigError);
  CHECK_THROWS_AS(parse_reference_schedule(""), ConfigError);
}
