#include <string>

#include "doctest.h"
#include "tlsctl/config.hpp"
#include "tlsctl/units.hpp"

using namespace tlsctl;

namespace {

std::string error_of(const std::string& text) {
  try {
    load_config_string(text, "test.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("minimal config applies defaults and echoes round-trip") {
  const RunConfig c = load_config_string("schema_version: 1\nqubit:\n  f_q_ghz: 4.5\n");
  CHECK(c.qubit.f_q_ghz == 4.5);
  CHECK(c.bath.center_ghz == 4.5);
  CHECK(c.interleave.max_cycles == 40);
  CHECK(c.plan.ac.grid.size() == 101);
  const auto echo = config_to_json(c);
  const RunConfig back = load_config_string(echo.dump(2), "echo.json");
  CHECK(config_to_json(back) == echo);
  CHECK(config_hash(back) == config_hash(c));
}

TEST_CASE("shipped reference file equals the built-in reference") {
  const RunConfig file = load_config(std::string(TLSCTL_SOURCE_DIR) + "/configs/reference.yaml");
  CHECK(config_to_json(file) == config_to_json(reference_config()));
}

TEST_CASE("negative vpp names its field") {
  const std::string e = error_of("schema_version: 1\nprotocol:\n  ac:\n    vpp: -1\n");
  CHECK(e.find("protocol.ac.vpp") != std::string::npos);
  CHECK(e.find("line 4") != std::string::npos);
}

TEST_CASE("unknown keys are rejected") {
  const std::string e = error_of("schema_version: 1\nqubit:\n  f_q_gz: 4.5\n");
  CHECK(e.find("qubit.f_q_gz") != std::string::npos);
  CHECK_FALSE(error_of("schema_version: 1\nbogus: 3\n").empty());
}

TEST_CASE("schema version defaults to the current one and is checked") {
  CHECK(load_config_string("qubit:\n  f_q_ghz: 4.5\n").schema_version == kSchemaVersion);
  CHECK(error_of("schema_version: 2\n").find("schema_version") != std::string::npos);
}

TEST_CASE("type and range errors") {
  CHECK(error_of("schema_version: 1\nbath:\n  n_tls: many\n").find("bath.n_tls") != std::string::npos);
  CHECK(error_of("schema_version: 1\nbath:\n  gamma2_over_2pi_mhz: [5, 1]\n").find("bath.gamma2_over_2pi_mhz") !=
        std::string::npos);
  CHECK(error_of("schema_version: 1\nmeasurement:\n  ac:\n    t_min_us: 0\n").find("measurement.ac") !=
        std::string::npos);
  CHECK(error_of("schema_version: 1\nprotocol:\n  interleave:\n    cycle: [ac, optimizer]\n")
            .find("protocol.interleave.cycle") != std::string::npos);
  CHECK(error_of("schema_version: 1\nrun:\n  temperature_mk: -5\n").find("run.temperature_mk") != std::string::npos);
}

TEST_CASE("user units convert at the boundary") {
  const RunConfig c =
      load_config_string("schema_version: 1\nbath:\n  n_tls: 30\n  gamma2_over_2pi_mhz: [0.37, 0.37]\n"
                         "  g_bare_over_2pi_khz: [12.5, 12.5]\n");
  const BathState b = sample_bath(c.bath, 1);
  for (const auto& d : b.defects) {
    CHECK(d.gamma2 == doctest::Approx(units::kTwoPi * 0.37).epsilon(1e-12));
    CHECK(d.g_bare == doctest::Approx(units::kTwoPi * 1e-3 * 12.5).epsilon(1e-12));
  }
}

TEST_CASE("interleave limits") {
  const RunConfig a = load_config_string("schema_version: 1\nprotocol:\n  interleave:\n    active_hours: 72\n");
  CHECK_FALSE(a.interleave.max_cycles.has_value());
  CHECK(a.interleave.active_hours == 72.0);
  const RunConfig b = load_config_string(
      "schema_version: 1\nprotocol:\n  interleave:\n    cycles: 3\n    breaks:\n"
      "      - {after_active_hours: 24, duration_days: 23.3}\n");
  CHECK(b.interleave.max_cycles == 3);
  REQUIRE(b.interleave.breaks.size() == 1);
  CHECK(b.interleave.breaks[0].duration_s == doctest::Approx(23.3 * 86400.0).epsilon(1e-15));
}

TEST_CASE("hash distinguishes configs") {
  const RunConfig a = reference_config();
  RunConfig b = a;
  b.run.seed = 2;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a).size() == 16);
}

}
