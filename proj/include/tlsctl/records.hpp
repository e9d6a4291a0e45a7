#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace tlsctl {

enum class ControlKind { no_control, fast_random, ac, optimizer, champion };

std::string_view to_string(ControlKind kind);
ControlKind control_kind_from_string(std::string_view name);

struct ControlDescriptor {
  ControlKind kind = ControlKind::no_control;
  std::optional<double> voltage_v;  ///< held DC voltage
  std::optional<double> f_ac_hz;
  std::optional<double> vpp_v;
  friend bool operator==(const ControlDescriptor&, const ControlDescriptor&) = default;
};

/// One timestamped measurement outcome. wall_time_s is the measurement start.
struct T1Record {
  double wall_time_s = 0.0;
  std::string qubit_id;
  ControlDescriptor control;
  double temperature_mk = 0.0;
  std::optional<double> t1_us;
  std::optional<double> t1_stderr_us;
  bool converged = false;
  std::uint64_t seed = 0;
  std::string config_hash;
  friend bool operator==(const T1Record&, const T1Record&) = default;
};

nlohmann::ordered_json record_to_json(const T1Record& r);
T1Record record_from_json(const nlohmann::json& j);

void write_jsonl(std::ostream& os, const std::vector<T1Record>& records);
std::string to_jsonl(const std::vector<T1Record>& records);
std::vector<T1Record> read_jsonl(std::istream& is);
std::vector<T1Record> read_jsonl_file(const std::string& path);

/// 64-bit FNV-1a, rendered as 16 hex digits. Stable across platforms.
std::string fnv1a_hex(std::string_view data);

}  // namespace tlsctl
