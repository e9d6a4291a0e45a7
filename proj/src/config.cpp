#include "tlsctl/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "tlsctl/records.hpp"
#include "tlsctl/units.hpp"

namespace tlsctl {
namespace {

std::string where(const YAML::Node& n) {
  const auto m = n.Mark();
  if (m.line < 0) return "";
  return " (line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + ")";
}

[[noreturn]] void fail(const std::string& path, const std::string& msg, const YAML::Node& n) {
  throw ConfigError(path + ": " + msg + where(n));
}

// A mapping node plus its dotted path; rejects keys it was not asked about.
class Section {
 public:
  Section(YAML::Node node, std::string path, std::initializer_list<const char*> allowed)
      : node_(std::move(node)), path_(std::move(path)) {
    if (!node_ || node_.IsNull()) return;
    if (!node_.IsMap()) fail(path_, "expected a mapping", node_);
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      bool ok = false;
      for (const char* a : allowed) ok |= key == a;
      if (!ok) fail(child_path(key), "unknown key", kv.first);
    }
  }

  std::string child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  YAML::Node child(const char* key) const {
    return node_ && node_.IsMap() ? node_[key] : YAML::Node(YAML::NodeType::Undefined);
  }
  bool has(const char* key) const {
    const YAML::Node n = child(key);
    return n.IsDefined() && !n.IsNull();
  }

  template <class T>
  void read(const char* key, T& out) const {
    const YAML::Node n = child(key);
    if (!n || n.IsNull()) return;
    try {
      if constexpr (std::is_same_v<T, std::vector<double>>) {
        if (!n.IsSequence()) fail(child_path(key), "expected a list of numbers", n);
        out.clear();
        for (const auto& e : n) out.push_back(e.as<double>());
      } else {
        if (!n.IsScalar()) fail(child_path(key), "expected a scalar", n);
        out = n.as<T>();
      }
    } catch (const YAML::BadConversion&) {
      fail(child_path(key), "has the wrong type", n);
    }
  }

  void read_range(const char* key, Range& out) const {
    const YAML::Node n = child(key);
    if (!n || n.IsNull()) return;
    if (!n.IsSequence() || n.size() != 2) fail(child_path(key), "expected [lo, hi]", n);
    try {
      out = {n[0].as<double>(), n[1].as<double>()};
    } catch (const YAML::BadConversion&) {
      fail(child_path(key), "has the wrong type", n);
    }
    if (!(out.lo <= out.hi)) fail(child_path(key), "inverted range", n);
  }

  void require(bool cond, const char* key, const std::string& msg) const {
    if (!cond) fail(child_path(key), msg, child(key) ? child(key) : node_);
  }

  const YAML::Node& node() const { return node_; }
  const std::string& path() const { return path_; }

 private:
  YAML::Node node_;
  std::string path_;
};

DelaySpacing spacing_from(const std::string& s, const Section& sec) {
  if (s == "log") return DelaySpacing::log;
  if (s == "linear") return DelaySpacing::linear;
  sec.require(false, "spacing", "must be 'log' or 'linear'");
  return DelaySpacing::log;
}

void read_measurement(const Section& parent, const char* key, MeasurementSettings& m) {
  Section s(parent.child(key), parent.child_path(key),
            {"spacing", "n_points", "t_min_us", "t_max_us", "shots_per_point", "duration_s"});
  std::string spacing = m.grid.spacing == DelaySpacing::log ? "log" : "linear";
  int n = static_cast<int>(m.grid.size());
  double t_min = m.grid.t_min(), t_max = m.grid.t_max();
  s.read("spacing", spacing);
  s.read("n_points", n);
  s.read("t_min_us", t_min);
  s.read("t_max_us", t_max);
  s.read("shots_per_point", m.shots_per_point);
  s.read("duration_s", m.duration_s);
  s.require(n >= 4, "n_points", "must be >= 4");
  s.require(t_min > 0.0, "t_min_us", "must be > 0");
  s.require(t_max > t_min, "t_max_us", "must exceed t_min_us");
  s.require(m.shots_per_point >= 1, "shots_per_point", "must be >= 1");
  s.require(m.duration_s > 0.0, "duration_s", "must be > 0");
  m.grid = make_delays(spacing_from(spacing, s), n, t_min, t_max);
}

std::vector<ControlKind> read_kinds(const Section& s, const char* key, std::vector<ControlKind> dflt) {
  const YAML::Node n = s.child(key);
  if (!n || n.IsNull()) return dflt;
  if (!n.IsSequence()) fail(s.child_path(key), "expected a list of control kinds", n);
  std::vector<ControlKind> out;
  for (const auto& e : n) {
    try {
      out.push_back(control_kind_from_string(e.as<std::string>()));
    } catch (const std::exception&) {
      fail(s.child_path(key), "unknown control kind", e);
    }
  }
  return out;
}

nlohmann::ordered_json measurement_json(const MeasurementSettings& m) {
  return {{"spacing", m.grid.spacing == DelaySpacing::log ? "log" : "linear"},
          {"n_points", m.grid.size()},
          {"t_min_us", m.grid.t_min()},
          {"t_max_us", m.grid.t_max()},
          {"shots_per_point", m.shots_per_point},
          {"duration_s", m.duration_s}};
}

nlohmann::ordered_json range_json(const Range& r) { return nlohmann::ordered_json::array({r.lo, r.hi}); }

RunConfig parse(const YAML::Node& root) {
  RunConfig cfg;
  Section top(root, "", {"schema_version", "qubit", "bath", "measurement", "protocol", "run"});
  if (!root || !root.IsMap()) throw ConfigError("config: expected a top-level mapping");
  top.read("schema_version", cfg.schema_version);
  top.require(cfg.schema_version == kSchemaVersion, "schema_version",
              "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");

  {
    Section s(top.child("qubit"), "qubit",
              {"id", "f_q_ghz", "gamma0_per_us", "gap_ghz", "chi_over_2pi_khz",
               "kappa_over_2pi_khz", "read_err_e", "read_err_g"});
    auto& q = cfg.qubit;
    s.read("id", q.id);
    s.read("f_q_ghz", q.f_q_ghz);
    s.read("gamma0_per_us", q.gamma0_per_us);
    s.read("gap_ghz", q.gap_ghz);
    s.read("chi_over_2pi_khz", q.chi_over_2pi_khz);
    s.read("kappa_over_2pi_khz", q.kappa_over_2pi_khz);
    s.read("read_err_e", q.read_err_e);
    s.read("read_err_g", q.read_err_g);
    s.require(!q.id.empty(), "id", "must not be empty");
    s.require(q.f_q_ghz > 0.0, "f_q_ghz", "must be > 0");
    s.require(q.gamma0_per_us >= 0.0, "gamma0_per_us", "must be >= 0");
    s.require(q.gap_ghz > 0.0, "gap_ghz", "must be > 0");
    s.require(q.read_err_e >= 0.0 && q.read_err_e < 0.5, "read_err_e", "must lie in [0, 0.5)");
    s.require(q.read_err_g >= 0.0 && q.read_err_g < 0.5, "read_err_g", "must lie in [0, 0.5)");
  }
  {
    Section s(top.child("bath"), "bath",
              {"n_tls", "window_ghz", "delta0_ghz", "dipole_gain_scale_ghz_per_v",
               "g_bare_over_2pi_khz", "gamma2_over_2pi_mhz", "diff_sigma_mhz", "diff_tau_s"});
    auto& b = cfg.bath;
    b.center_ghz = cfg.qubit.f_q_ghz;
    b.delta0_ghz.hi = cfg.qubit.f_q_ghz;
    s.read("n_tls", b.n_tls);
    s.read("window_ghz", b.window_ghz);
    s.read_range("delta0_ghz", b.delta0_ghz);
    s.read("dipole_gain_scale_ghz_per_v", b.dipole_gain_scale_ghz_per_v);
    s.read_range("g_bare_over_2pi_khz", b.g_bare_over_2pi_khz);
    s.read_range("gamma2_over_2pi_mhz", b.gamma2_over_2pi_mhz);
    s.read_range("diff_sigma_mhz", b.diff_sigma_mhz);
    s.read_range("diff_tau_s", b.diff_tau_s);
    s.require(b.n_tls >= 0, "n_tls", "must be >= 0");
    s.require(b.window_ghz >= 0.0 && b.window_ghz < b.center_ghz, "window_ghz",
              "must lie in [0, f_q)");
    s.require(b.delta0_ghz.lo > 0.0, "delta0_ghz", "lower bound must be > 0");
    s.require(b.dipole_gain_scale_ghz_per_v >= 0.0, "dipole_gain_scale_ghz_per_v", "must be >= 0");
    s.require(b.g_bare_over_2pi_khz.lo > 0.0, "g_bare_over_2pi_khz", "lower bound must be > 0");
    s.require(b.gamma2_over_2pi_mhz.lo > 0.0, "gamma2_over_2pi_mhz", "lower bound must be > 0");
    s.require(b.diff_sigma_mhz.lo > 0.0, "diff_sigma_mhz", "lower bound must be > 0");
    s.require(b.diff_tau_s.lo > 0.0, "diff_tau_s", "lower bound must be > 0");
  }
  {
    Section s(top.child("measurement"), "measurement", {"ac", "no_control", "fast_random"});
    read_measurement(s, "ac", cfg.plan.ac);
    read_measurement(s, "no_control", cfg.plan.no_control);
    read_measurement(s, "fast_random", cfg.plan.fast_random);
  }
  {
    Section p(top.child("protocol"), "protocol",
              {"ac", "fast_random", "interleave", "optimizer", "champion", "ac_sweep",
               "temperature_sweep"});
    {
      Section s(p.child("ac"), "protocol.ac", {"f_ac_hz", "vpp"});
      s.read("f_ac_hz", cfg.plan.ac_wave.f_ac_hz);
      s.read("vpp", cfg.plan.ac_wave.vpp);
      s.require(cfg.plan.ac_wave.f_ac_hz > 0.0, "f_ac_hz", "must be > 0");
      s.require(cfg.plan.ac_wave.vpp >= 0.0, "vpp", "must be >= 0");
    }
    {
      Section s(p.child("fast_random"), "protocol.fast_random", {"v_max"});
      s.read("v_max", cfg.plan.fast_random_v_max);
      s.require(cfg.plan.fast_random_v_max >= 0.0, "v_max", "must be >= 0");
    }
    {
      Section s(p.child("interleave"), "protocol.interleave",
                {"cycle", "cycles", "active_hours", "breaks"});
      auto& sch = cfg.interleave;
      sch.cycle = read_kinds(s, "cycle", sch.cycle);
      int cycles = sch.max_cycles.value_or(-1);
      s.read("cycles", cycles);
      sch.max_cycles = cycles >= 0 ? std::optional<int>(cycles) : std::nullopt;
      s.read("active_hours", sch.active_hours);
      if (!s.has("cycles") && !s.has("active_hours")) sch.max_cycles = 40;
      s.require(!sch.cycle.empty(), "cycle", "must not be empty");
      s.require(sch.active_hours >= 0.0, "active_hours", "must be >= 0");
      s.require(sch.max_cycles || sch.active_hours > 0.0, "cycles", "set cycles or active_hours");
      for (auto k : sch.cycle) {
        s.require(k == ControlKind::ac || k == ControlKind::no_control || k == ControlKind::fast_random,
                  "cycle", "may only contain ac, no_control, fast_random");
      }
      const YAML::Node breaks = s.child("breaks");
      if (breaks && !breaks.IsNull()) {
        if (!breaks.IsSequence()) fail(s.child_path("breaks"), "expected a list", breaks);
        for (std::size_t i = 0; i < breaks.size(); ++i) {
          Section b(breaks[i], s.child_path("breaks") + "[" + std::to_string(i) + "]",
                    {"after_active_hours", "duration_days"});
          double after = 0.0, days = 0.0;
          b.read("after_active_hours", after);
          b.read("duration_days", days);
          b.require(after >= 0.0, "after_active_hours", "must be >= 0");
          b.require(days >= 0.0, "duration_days", "must be >= 0");
          sch.breaks.push_back({after, days * units::kSecondsPerDay});
        }
      }
    }
    {
      Section s(p.child("optimizer"), "protocol.optimizer", {"threshold_us", "max_measurements"});
      s.read("threshold_us", cfg.optimizer.threshold_us);
      s.read("max_measurements", cfg.optimizer.max_measurements);
      s.require(cfg.optimizer.threshold_us > 0.0, "threshold_us", "must be > 0");
      s.require(cfg.optimizer.max_measurements >= 0, "max_measurements", "must be >= 0");
    }
    {
      Section s(p.child("champion"), "protocol.champion",
                {"coarse_threshold_us", "coarse_scans", "fine_points", "fine_span_factor",
                 "fine_shots_per_point", "fine_duration_s"});
      auto& c = cfg.champion;
      s.read("coarse_threshold_us", c.coarse_threshold_us);
      s.read("coarse_scans", c.coarse_scans);
      s.read("fine_points", c.fine_points);
      s.read("fine_span_factor", c.fine_span_factor);
      s.read("fine_shots_per_point", c.fine_shots_per_point);
      s.read("fine_duration_s", c.fine_duration_s);
      s.require(c.coarse_threshold_us > 0.0, "coarse_threshold_us", "must be > 0");
      s.require(c.coarse_scans >= 0, "coarse_scans", "must be >= 0");
      s.require(c.fine_points >= 4, "fine_points", "must be >= 4");
      s.require(c.fine_span_factor > 0.0, "fine_span_factor", "must be > 0");
      s.require(c.fine_shots_per_point >= 1, "fine_shots_per_point", "must be >= 1");
      s.require(c.fine_duration_s > 0.0, "fine_duration_s", "must be > 0");
    }
    {
      Section s(p.child("ac_sweep"), "protocol.ac_sweep", {"vpp_list", "f_ac_list", "repeats"});
      auto& a = cfg.ac_sweep;
      s.read("vpp_list", a.vpp_list);
      s.read("f_ac_list", a.f_ac_list);
      s.read("repeats", a.repeats);
      s.require(!a.vpp_list.empty(), "vpp_list", "must not be empty");
      s.require(!a.f_ac_list.empty(), "f_ac_list", "must not be empty");
      for (double v : a.vpp_list) s.require(v >= 0.0, "vpp_list", "entries must be >= 0");
      for (double f : a.f_ac_list) s.require(f > 0.0, "f_ac_list", "entries must be > 0");
      s.require(a.repeats >= 1, "repeats", "must be >= 1");
    }
    {
      Section s(p.child("temperature_sweep"), "protocol.temperature_sweep",
                {"temperatures_mk", "kinds", "repeats"});
      auto& t = cfg.temperature_sweep;
      s.read("temperatures_mk", t.temperatures_mk);
      t.kinds = read_kinds(s, "kinds", t.kinds);
      s.read("repeats", t.repeats);
      s.require(!t.temperatures_mk.empty(), "temperatures_mk", "must not be empty");
      for (double v : t.temperatures_mk) s.require(v >= 0.0, "temperatures_mk", "entries must be >= 0");
      for (auto k : t.kinds) {
        s.require(k == ControlKind::ac || k == ControlKind::no_control || k == ControlKind::fast_random,
                  "kinds", "may only contain ac, no_control, fast_random");
      }
      s.require(t.repeats >= 1, "repeats", "must be >= 1");
    }
  }
  {
    Section s(top.child("run"), "run", {"seed", "temperature_mk", "output_dir", "record_format"});
    s.read("seed", cfg.run.seed);
    s.read("temperature_mk", cfg.run.temperature_mk);
    s.read("output_dir", cfg.run.output_dir);
    s.read("record_format", cfg.run.record_format);
    s.require(cfg.run.temperature_mk >= 0.0, "temperature_mk", "must be >= 0");
    s.require(cfg.run.record_format == "jsonl", "record_format", "only 'jsonl' is supported");
  }
  try {
    cfg.bath.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

}  // namespace

RunConfig load_config_string(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ": parse error at line " + std::to_string(e.mark.line + 1) +
                      ", column " + std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  try {
    return parse(root);
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config_string(ss.str(), path);
}

nlohmann::ordered_json config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["schema_version"] = c.schema_version;
  j["qubit"] = {{"id", c.qubit.id},
                {"f_q_ghz", c.qubit.f_q_ghz},
                {"gamma0_per_us", c.qubit.gamma0_per_us},
                {"gap_ghz", c.qubit.gap_ghz},
                {"chi_over_2pi_khz", c.qubit.chi_over_2pi_khz},
                {"kappa_over_2pi_khz", c.qubit.kappa_over_2pi_khz},
                {"read_err_e", c.qubit.read_err_e},
                {"read_err_g", c.qubit.read_err_g}};
  j["bath"] = {{"n_tls", c.bath.n_tls},
               {"window_ghz", c.bath.window_ghz},
               {"delta0_ghz", range_json(c.bath.delta0_ghz)},
               {"dipole_gain_scale_ghz_per_v", c.bath.dipole_gain_scale_ghz_per_v},
               {"g_bare_over_2pi_khz", range_json(c.bath.g_bare_over_2pi_khz)},
               {"gamma2_over_2pi_mhz", range_json(c.bath.gamma2_over_2pi_mhz)},
               {"diff_sigma_mhz", range_json(c.bath.diff_sigma_mhz)},
               {"diff_tau_s", range_json(c.bath.diff_tau_s)}};
  j["measurement"] = {{"ac", measurement_json(c.plan.ac)},
                      {"no_control", measurement_json(c.plan.no_control)},
                      {"fast_random", measurement_json(c.plan.fast_random)}};
  nlohmann::ordered_json cycle = nlohmann::ordered_json::array();
  for (auto k : c.interleave.cycle) cycle.push_back(std::string(to_string(k)));
  nlohmann::ordered_json breaks = nlohmann::ordered_json::array();
  for (const auto& b : c.interleave.breaks) {
    breaks.push_back({{"after_active_hours", b.after_active_hours},
                      {"duration_days", b.duration_s / units::kSecondsPerDay}});
  }
  nlohmann::ordered_json interleave = {{"cycle", cycle}};
  interleave["cycles"] = c.interleave.max_cycles ? nlohmann::ordered_json(*c.interleave.max_cycles)
                                                 : nlohmann::ordered_json(-1);
  interleave["active_hours"] = c.interleave.active_hours;
  interleave["breaks"] = breaks;
  nlohmann::ordered_json kinds = nlohmann::ordered_json::array();
  for (auto k : c.temperature_sweep.kinds) kinds.push_back(std::string(to_string(k)));
  j["protocol"] = {
      {"ac", {{"f_ac_hz", c.plan.ac_wave.f_ac_hz}, {"vpp", c.plan.ac_wave.vpp}}},
      {"fast_random", {{"v_max", c.plan.fast_random_v_max}}},
      {"interleave", interleave},
      {"optimizer",
       {{"threshold_us", c.optimizer.threshold_us}, {"max_measurements", c.optimizer.max_measurements}}},
      {"champion",
       {{"coarse_threshold_us", c.champion.coarse_threshold_us},
        {"coarse_scans", c.champion.coarse_scans},
        {"fine_points", c.champion.fine_points},
        {"fine_span_factor", c.champion.fine_span_factor},
        {"fine_shots_per_point", c.champion.fine_shots_per_point},
        {"fine_duration_s", c.champion.fine_duration_s}}},
      {"ac_sweep",
       {{"vpp_list", c.ac_sweep.vpp_list},
        {"f_ac_list", c.ac_sweep.f_ac_list},
        {"repeats", c.ac_sweep.repeats}}},
      {"temperature_sweep",
       {{"temperatures_mk", c.temperature_sweep.temperatures_mk},
        {"kinds", kinds},
        {"repeats", c.temperature_sweep.repeats}}}};
  j["run"] = {{"seed", c.run.seed},
              {"temperature_mk", c.run.temperature_mk},
              {"output_dir", c.run.output_dir},
              {"record_format", c.run.record_format}};
  return j;
}

std::string config_hash(const RunConfig& config) { return fnv1a_hex(config_to_json(config).dump()); }

RunConfig reference_config() { return load_config_string("schema_version: 1\n", "<reference>"); }

}  // namespace tlsctl
