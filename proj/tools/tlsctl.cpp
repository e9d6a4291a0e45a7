// tlsctl: command-line front end for TLS-control T1 campaigns.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 runtime failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tlsctl/analysis.hpp"
#include "tlsctl/config.hpp"
#include "tlsctl/measurement.hpp"
#include "tlsctl/protocols.hpp"
#include "tlsctl/records.hpp"

namespace fs = std::filesystem;
using namespace tlsctl;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool quiet = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config_path, "Run config (YAML or JSON)");
  sub->add_option("--seed", f.seed, "Override run.seed");
  sub->add_option("--out", f.out_dir, "Output directory");
  sub->add_flag("--quiet", f.quiet, "Suppress progress output");
}

RunConfig resolve_config(const CommonFlags& f) {
  RunConfig cfg = f.config_path.empty() ? reference_config() : load_config(f.config_path);
  if (f.seed) cfg.run.seed = *f.seed;
  return cfg;
}

fs::path out_dir(const CommonFlags& f, const RunConfig* cfg) {
  fs::path dir = !f.out_dir.empty() ? fs::path(f.out_dir) : fs::path(cfg ? cfg->run.output_dir : "out");
  fs::create_directories(dir);
  return dir;
}

void write_manifest(const fs::path& dir, const std::string& subcommand, const RunConfig& cfg,
                    std::size_t n_records) {
  nlohmann::ordered_json m;
  m["format"] = "tlsctl-manifest";
  m["format_version"] = 1;
  m["subcommand"] = subcommand;
  m["config_hash"] = config_hash(cfg);
  m["seed"] = cfg.run.seed;
  m["record_count"] = n_records;
  m["config"] = config_to_json(cfg);
  std::ofstream(dir / "manifest.json") << m.dump(2) << '\n';
}

void write_records(const fs::path& dir, std::vector<T1Record> records, const RunConfig& cfg) {
  const std::string hash = config_hash(cfg);
  for (auto& r : records) r.config_hash = hash;
  std::ofstream out(dir / "records.jsonl");
  write_jsonl(out, records);
}

World world_from(const RunConfig& cfg) {
  return make_world(cfg.qubit, cfg.bath, cfg.run.seed, cfg.run.temperature_mk);
}

void finish_campaign(const CommonFlags& f, const RunConfig& cfg, const std::string& name,
                     const std::vector<T1Record>& records) {
  const fs::path dir = out_dir(f, &cfg);
  write_records(dir, records, cfg);
  write_manifest(dir, name, cfg, records.size());
  if (!f.quiet) {
    std::cout << name << ": " << records.size() << " records written to "
              << (dir / "records.jsonl").string() << '\n';
  }
}

// Reads a CSV with optional '#' comments and a header line if the first
// field is not numeric.
std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header
      throw UsageError(path + ":" + std::to_string(line_no) + ": non-numeric field");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int cmd_fit_decay(const std::string& csv, int default_shots, const CommonFlags& f) {
  const auto rows = read_numeric_csv(csv);
  P1Curve curve;
  for (const auto& r : rows) {
    if (r.size() < 2) throw UsageError(csv + ": expected delay_us,p1[,shots]");
    curve.delays_us.push_back(r[0]);
    curve.p1.push_back(r[1]);
    curve.shots.push_back(r.size() >= 3 ? static_cast<std::int64_t>(r[2]) : default_shots);
  }
  try {
    curve.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(csv + ": " + e.what());
  }
  if (curve.delays_us.size() < 4) throw UsageError(csv + ": need at least 4 rows");
  const T1Fit fit = fit_exponential(curve);
  nlohmann::ordered_json j = {{"converged", fit.converged},
                              {"t1_us", fit.t1_us ? nlohmann::ordered_json(*fit.t1_us) : nullptr},
                              {"t1_stderr_us", fit.t1_stderr_us ? nlohmann::ordered_json(*fit.t1_stderr_us) : nullptr},
                              {"amplitude", fit.amplitude},
                              {"offset", fit.offset},
                              {"residual_rms", fit.residual_rms}};
  if (!f.out_dir.empty()) {
    fs::create_directories(f.out_dir);
    std::ofstream(fs::path(f.out_dir) / "fit.json") << j.dump(2) << '\n';
  }
  std::cout << j.dump() << '\n';
  return fit.converged ? 0 : kExitRuntime;
}

int cmd_fit_temperature(const std::string& csv, double f_q, const CommonFlags& f) {
  const auto rows = read_numeric_csv(csv);
  std::vector<TemperaturePoint> pts;
  for (const auto& r : rows) {
    if (r.size() < 2) throw UsageError(csv + ": expected temperature_mk,t1_us");
    pts.push_back({r[0], r[1]});
  }
  TemperatureFit fit;
  try {
    fit = fit_temperature_model(pts, f_q);
  } catch (const std::invalid_argument& e) {
    throw UsageError(csv + ": " + e.what());
  }
  nlohmann::ordered_json j = {{"converged", fit.converged},
                              {"gamma0_per_us", fit.gamma0_per_us},
                              {"gap_ghz", fit.gap_ghz},
                              {"n_low", fit.n_low},
                              {"n_fit", fit.n_fit},
                              {"relative_residual", fit.relative_residual}};
  if (!f.out_dir.empty()) {
    fs::create_directories(f.out_dir);
    std::ofstream(fs::path(f.out_dir) / "temperature_fit.json") << j.dump(2) << '\n';
  }
  std::cout << j.dump() << '\n';
  return fit.converged ? 0 : kExitRuntime;
}

int cmd_analyze(const std::vector<std::string>& files, bool allow_mixed,
                const std::vector<std::string>& fq_overrides, const std::vector<std::string>& excluded,
                const CommonFlags& f) {
  std::vector<T1Record> all;
  AnalysisOptions opts;
  opts.excluded_from_q_fit = excluded;
  std::set<std::string> ids;
  for (const auto& path : files) {
    auto recs = read_jsonl_file(path);
    const fs::path manifest = fs::path(path).parent_path() / "manifest.json";
    if (fs::exists(manifest)) {
      std::ifstream in(manifest);
      const auto m = nlohmann::json::parse(in);
      const auto& q = m.at("config").at("qubit");
      opts.f_q_ghz[q.at("id").get<std::string>()] = q.at("f_q_ghz").get<double>();
    }
    for (auto& r : recs) ids.insert(r.qubit_id);
    all.insert(all.end(), recs.begin(), recs.end());
  }
  if (ids.size() > 1 && !allow_mixed) {
    throw UsageError("record files mix qubit ids; pass --allow-mixed to merge them");
  }
  for (const auto& kv : fq_overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--fq expects ID=GHZ");
    opts.f_q_ghz[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
  }
  const AnalysisReport report = analyze_records(all, opts);
  const fs::path dir = f.out_dir.empty() ? fs::path("analysis") : fs::path(f.out_dir);
  write_report_files(report, all, dir.string());
  if (!f.quiet) std::cout << "analysis written to " << dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate and analyse TLS-limited T1 measurements under electrode control"};
  app.require_subcommand(1);
  CommonFlags flags;

  auto* bath = app.add_subcommand("simulate-bath", "Sample a defect bath and export it");
  auto* interleave = app.add_subcommand("run-interleave", "AC / no-control / fast-random interleave");
  auto* optimize = app.add_subcommand("run-optimize", "Threshold voltage-optimization loop");
  auto* champion = app.add_subcommand("run-champion", "Coarse scans with conditional fine scans");
  auto* sweep_ac = app.add_subcommand("sweep-ac", "AC measurements over vpp × f_ac");
  auto* sweep_t = app.add_subcommand("sweep-temperature", "Measurements over a temperature list");
  auto* analyze = app.add_subcommand("analyze", "Statistics, fits and figure tables from records");
  auto* fit_decay = app.add_subcommand("fit-decay", "Fit a delay_us,p1[,shots] CSV");
  auto* fit_temp = app.add_subcommand("fit-temperature", "Fit a temperature_mk,t1_us CSV");
  for (auto* s : {bath, interleave, optimize, champion, sweep_ac, sweep_t, analyze, fit_decay, fit_temp}) {
    add_common(s, flags);
  }

  std::vector<std::string> record_files, fq_overrides, excluded;
  bool allow_mixed = false;
  analyze->add_option("records", record_files, "Record files (JSON lines)")->required();
  analyze->add_flag("--allow-mixed", allow_mixed, "Merge files with different qubit ids");
  analyze->add_option("--fq", fq_overrides, "Qubit frequency override, ID=GHZ");
  analyze->add_option("--exclude-from-q-fit", excluded, "Qubit id left out of the Q-vs-f fit");

  std::string decay_csv;
  int default_shots = 400;
  fit_decay->add_option("csv", decay_csv, "delay_us,p1[,shots] table")->required();
  fit_decay->add_option("--shots", default_shots, "Shots per point when the CSV has no shots column");

  std::string temp_csv;
  double temp_fq = 0.0;
  fit_temp->add_option("csv", temp_csv, "temperature_mk,t1_us table")->required();
  fit_temp->add_option("--fq", temp_fq, "Qubit frequency, GHz")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*fit_decay) return cmd_fit_decay(decay_csv, default_shots, flags);
    if (*fit_temp) return cmd_fit_temperature(temp_csv, temp_fq, flags);
    if (*analyze) return cmd_analyze(record_files, allow_mixed, fq_overrides, excluded, flags);

    const RunConfig cfg = resolve_config(flags);
    if (*bath) {
      const World w = world_from(cfg);
      const fs::path dir = out_dir(flags, &cfg);
      std::ofstream(dir / "bath.json") << bath_to_json(w.bath).dump(2) << '\n';
      write_manifest(dir, "simulate-bath", cfg, 0);
      if (!flags.quiet) std::cout << "bath with " << w.bath.size() << " defects written\n";
      return 0;
    }
    World world = world_from(cfg);
    if (*interleave) {
      finish_campaign(flags, cfg, "run-interleave", run_interleave(world, cfg.interleave, cfg.plan));
    } else if (*optimize) {
      finish_campaign(flags, cfg, "run-optimize", run_optimizer(world, cfg.optimizer, cfg.plan));
    } else if (*champion) {
      finish_campaign(flags, cfg, "run-champion", run_champion(world, cfg.champion, cfg.plan));
    } else if (*sweep_ac) {
      std::vector<T1Record> recs;
      for (auto& cell : run_ac_sweep(world, cfg.ac_sweep.vpp_list, cfg.ac_sweep.f_ac_list,
                                     cfg.ac_sweep.repeats, cfg.plan)) {
        recs.insert(recs.end(), cell.records.begin(), cell.records.end());
      }
      std::stable_sort(recs.begin(), recs.end(),
                       [](const T1Record& a, const T1Record& b) { return a.wall_time_s < b.wall_time_s; });
      finish_campaign(flags, cfg, "sweep-ac", recs);
    } else if (*sweep_t) {
      std::vector<T1Record> recs;
      for (auto& cell : run_temperature_sweep(world, cfg.temperature_sweep.temperatures_mk,
                                              cfg.temperature_sweep.kinds, cfg.temperature_sweep.repeats,
                                              cfg.plan)) {
        recs.insert(recs.end(), cell.records.begin(), cell.records.end());
      }
      finish_campaign(flags, cfg, "sweep-temperature", recs);
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
}
