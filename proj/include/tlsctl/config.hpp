#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tlsctl/bath.hpp"
#include "tlsctl/decay.hpp"
#include "tlsctl/protocols.hpp"

namespace tlsctl {

/// Schema or validation failure while loading a run config. The message
/// names the offending field path and, when known, its source line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AcSweepSpec {
  std::vector<double> vpp_list = {16.0};
  std::vector<double> f_ac_list = {0.1};
  int repeats = 3;
};

struct TemperatureSweepSpec {
  std::vector<double> temperatures_mk = {10.0, 30.0, 60.0, 90.0, 110.0, 130.0, 150.0, 170.0};
  std::vector<ControlKind> kinds = {ControlKind::ac, ControlKind::no_control, ControlKind::fast_random};
  int repeats = 3;
};

struct RunSection {
  std::uint64_t seed = 1;
  double temperature_mk = 10.0;
  std::string output_dir = "out";
  std::string record_format = "jsonl";
};

struct RunConfig {
  int schema_version = 1;
  QubitSpec qubit;
  BathConfig bath;
  MeasurementPlan plan = MeasurementPlan::defaults();
  ScheduleSpec interleave;
  OptimizerSettings optimizer;
  ChampionSettings champion;
  AcSweepSpec ac_sweep;
  TemperatureSweepSpec temperature_sweep;
  RunSection run;
};

inline constexpr int kSchemaVersion = 1;

/// Parses a YAML (or JSON) document, applies defaults and validates.
RunConfig load_config_string(const std::string& text, const std::string& source = "<string>");
RunConfig load_config(const std::string& path);

/// Fully resolved config in the same schema the loader accepts.
nlohmann::ordered_json config_to_json(const RunConfig& config);
std::string config_hash(const RunConfig& config);

/// The shipped reference configuration (identical to configs/reference.yaml).
RunConfig reference_config();

}  // namespace tlsctl
