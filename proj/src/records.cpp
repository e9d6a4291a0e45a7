#include "tlsctl/records.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tlsctl {
namespace {

template <class T>
nlohmann::ordered_json opt(const std::optional<T>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::optional<double> opt_double(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

std::string_view to_string(ControlKind kind) {
  switch (kind) {
    case ControlKind::no_control: return "no_control";
    case ControlKind::fast_random: return "fast_random";
    case ControlKind::ac: return "ac";
    case ControlKind::optimizer: return "optimizer";
    case ControlKind::champion: return "champion";
  }
  return "unknown";
}

ControlKind control_kind_from_string(std::string_view name) {
  for (auto k : {ControlKind::no_control, ControlKind::fast_random, ControlKind::ac,
                 ControlKind::optimizer, ControlKind::champion}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown control kind '" + std::string(name) + "'");
}

nlohmann::ordered_json record_to_json(const T1Record& r) {
  nlohmann::ordered_json j;
  j["wall_time_s"] = r.wall_time_s;
  j["qubit_id"] = r.qubit_id;
  j["control_kind"] = to_string(r.control.kind);
  j["voltage_v"] = opt(r.control.voltage_v);
  j["f_ac_hz"] = opt(r.control.f_ac_hz);
  j["vpp_v"] = opt(r.control.vpp_v);
  j["temperature_mk"] = r.temperature_mk;
  j["t1_us"] = opt(r.t1_us);
  j["t1_stderr_us"] = opt(r.t1_stderr_us);
  j["converged"] = r.converged;
  j["seed"] = r.seed;
  j["config_hash"] = r.config_hash;
  return j;
}

T1Record record_from_json(const nlohmann::json& j) {
  T1Record r;
  r.wall_time_s = j.at("wall_time_s").get<double>();
  r.qubit_id = j.at("qubit_id").get<std::string>();
  r.control.kind = control_kind_from_string(j.at("control_kind").get<std::string>());
  r.control.voltage_v = opt_double(j, "voltage_v");
  r.control.f_ac_hz = opt_double(j, "f_ac_hz");
  r.control.vpp_v = opt_double(j, "vpp_v");
  r.temperature_mk = j.at("temperature_mk").get<double>();
  r.t1_us = opt_double(j, "t1_us");
  r.t1_stderr_us = opt_double(j, "t1_stderr_us");
  r.converged = j.at("converged").get<bool>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.config_hash = j.value("config_hash", std::string{});
  return r;
}

void write_jsonl(std::ostream& os, const std::vector<T1Record>& records) {
  for (const auto& r : records) os << record_to_json(r).dump() << '\n';
}

std::string to_jsonl(const std::vector<T1Record>& records) {
  std::ostringstream os;
  write_jsonl(os, records);
  return os.str();
}

std::vector<T1Record> read_jsonl(std::istream& is) {
  std::vector<T1Record> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error("record line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<T1Record> read_jsonl_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open record file " + path);
  return read_jsonl(in);
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace tlsctl
