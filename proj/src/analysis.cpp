#include "tlsctl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <set>
#include <stdexcept>

#include "tlsctl/decay.hpp"
#include "tlsctl/units.hpp"

namespace tlsctl {
namespace {

constexpr ControlKind kAllKinds[] = {ControlKind::no_control, ControlKind::fast_random,
                                     ControlKind::ac, ControlKind::optimizer,
                                     ControlKind::champion};

bool usable(const T1Record& r) { return r.converged && r.t1_us && *r.t1_us > 0.0; }

double rate_sse(const std::vector<TemperaturePoint>& pts, const std::vector<std::size_t>& idx,
                double gamma0, double f_q, double gap) {
  double s = 0.0;
  for (std::size_t i : idx) {
    const double r = 1.0 / pts[i].t1_us - gamma0 - gamma_qp(pts[i].temperature_mk, f_q, gap);
    s += r * r;
  }
  return s;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json line_json(const LineFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"n_used", f.n_used}};
}

}  // namespace

double harmonic_mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("harmonic_mean: empty input");
  double inv = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) throw std::invalid_argument("harmonic_mean: values must be > 0");
    inv += 1.0 / v;
  }
  return static_cast<double>(values.size()) / inv;
}

std::vector<double> cumulative_hmean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("cumulative_hmean: empty input");
  std::vector<double> out;
  out.reserve(values.size());
  double inv = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] > 0.0)) throw std::invalid_argument("cumulative_hmean: values must be > 0");
    inv += 1.0 / values[k];
    out.push_back(static_cast<double>(k + 1) / inv);
  }
  return out;
}

double arithmetic_mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("arithmetic_mean: empty input");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = arithmetic_mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double n_effective(double sigma_fr_us, double sigma_ac_us) {
  if (!(sigma_ac_us > 0.0)) throw std::invalid_argument("n_effective: sigma_ac must be > 0");
  if (!(sigma_fr_us >= 0.0)) throw std::invalid_argument("n_effective: sigma_fr must be >= 0");
  const double ratio = sigma_fr_us / sigma_ac_us;
  return ratio * ratio;
}

double quality_factor(double f_q_ghz, double t1_us) {
  if (!(f_q_ghz > 0.0) || !(t1_us > 0.0)) {
    throw std::invalid_argument("quality_factor: inputs must be > 0");
  }
  return units::kTwoPi * f_q_ghz * 1.0e3 * t1_us;
}

LineFit fit_q_vs_frequency(const std::vector<FrequencyQ>& points, const std::vector<bool>& excluded) {
  if (!excluded.empty() && excluded.size() != points.size()) {
    throw std::invalid_argument("fit_q_vs_frequency: exclusion mask length mismatch");
  }
  double sx = 0, sy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!excluded.empty() && excluded[i]) continue;
    sx += points[i].f_q_ghz;
    sy += points[i].q;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("fit_q_vs_frequency: need at least 2 points");
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!excluded.empty() && excluded[i]) continue;
    const double dx = points[i].f_q_ghz - mx;
    sxx += dx * dx;
    sxy += dx * (points[i].q - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_q_vs_frequency: frequencies are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.n_used = n;
  return fit;
}

double fit_sigma_vs_mu(const std::vector<std::pair<double, double>>& mu_sigma) {
  if (mu_sigma.empty()) throw std::invalid_argument("fit_sigma_vs_mu: empty input");
  double sxy = 0, sxx = 0;
  for (const auto& [mu, sigma] : mu_sigma) {
    if (!(mu > 0.0)) throw std::invalid_argument("fit_sigma_vs_mu: mu must be > 0");
    sxy += mu * sigma;
    sxx += mu * mu;
  }
  return sxy / sxx;
}

TemperatureFit fit_temperature_model(const std::vector<TemperaturePoint>& points, double f_q_ghz,
                                     const TemperatureFitOptions& opt) {
  if (!(f_q_ghz > 0.0)) throw std::invalid_argument("fit_temperature_model: f_q must be > 0");
  std::vector<double> low;
  std::vector<std::size_t> high;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!(p.t1_us > 0.0) || !(p.temperature_mk >= 0.0)) {
      throw std::invalid_argument("fit_temperature_model: points need T >= 0 and t1 > 0");
    }
    if (p.temperature_mk < opt.low_cutoff_mk) low.push_back(p.t1_us);
    if (p.temperature_mk >= opt.fit_cutoff_mk) high.push_back(i);
  }
  if (low.empty()) throw std::invalid_argument("fit_temperature_model: no point below the low cutoff");
  if (high.empty()) throw std::invalid_argument("fit_temperature_model: no point at or above the fit cutoff");

  TemperatureFit fit;
  fit.n_low = low.size();
  fit.n_fit = high.size();
  fit.gamma0_per_us = 1.0 / arithmetic_mean(low);

  auto objective = [&](double gap) { return rate_sse(points, high, fit.gamma0_per_us, f_q_ghz, gap); };

  // Coarse log scan to bracket the minimum, then golden section.
  constexpr int kScan = 240;
  const double log_lo = std::log(opt.gap_lo_ghz), log_hi = std::log(opt.gap_hi_ghz);
  int best = 0;
  double best_val = INFINITY;
  std::vector<double> grid(kScan + 1);
  for (int i = 0; i <= kScan; ++i) {
    grid[i] = std::exp(log_lo + (log_hi - log_lo) * i / kScan);
    const double v = objective(grid[i]);
    if (v < best_val) best_val = v, best = i;
  }
  double a = grid[std::max(best - 1, 0)];
  double b = grid[std::min(best + 1, kScan)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = objective(c), fd = objective(d);
  int iter = 0;
  while ((b - a) > opt.rel_tolerance * 0.5 * (a + b) && iter < 200) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
    ++iter;
  }
  fit.gap_ghz = 0.5 * (a + b);
  fit.converged = iter < 200 && best > 0 && best < kScan;

  for (const auto& p : points) {
    const double model_rate = fit.gamma0_per_us + gamma_qp(p.temperature_mk, f_q_ghz, fit.gap_ghz);
    fit.model_t1_us.push_back(1.0 / model_rate);
    fit.rate_residual.push_back(1.0 / p.t1_us - model_rate);
    fit.relative_residual.push_back(p.t1_us * model_rate - 1.0);
  }
  return fit;
}

std::vector<double> usable_t1(const std::vector<T1Record>& records, ControlKind kind) {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.control.kind == kind && usable(r)) out.push_back(*r.t1_us);
  }
  return out;
}

std::size_t excluded_count(const std::vector<T1Record>& records, ControlKind kind) {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [&](const T1Record& r) {
    return r.control.kind == kind && !usable(r);
  }));
}

KindStats kind_stats(const std::vector<T1Record>& records, ControlKind kind) {
  KindStats s;
  const auto v = usable_t1(records, kind);
  s.count = v.size();
  s.excluded_count = excluded_count(records, kind);
  if (v.empty()) return s;
  s.mean_us = arithmetic_mean(v);
  s.hmean_us = harmonic_mean(v);
  s.std_us = sample_std(v);
  s.min_us = *std::min_element(v.begin(), v.end());
  s.max_us = *std::max_element(v.begin(), v.end());
  return s;
}

AnalysisReport analyze_records(const std::vector<T1Record>& records, const AnalysisOptions& options) {
  AnalysisReport report;
  std::set<std::string> hashes;
  std::vector<std::string> ids;
  for (const auto& r : records) {
    hashes.insert(r.config_hash);
    if (std::find(ids.begin(), ids.end(), r.qubit_id) == ids.end()) ids.push_back(r.qubit_id);
  }
  report.config_hash = hashes.size() == 1 ? *hashes.begin() : (hashes.empty() ? "" : "mixed");

  std::vector<FrequencyQ> q_ac, q_fr_max;
  std::vector<bool> excl_ac, excl_fr;
  std::vector<std::pair<double, double>> sm_nc, sm_fr, sm_ac;

  for (const auto& id : ids) {
    std::vector<T1Record> mine;
    for (const auto& r : records) {
      if (r.qubit_id == id) mine.push_back(r);
    }
    QubitReport qr;
    qr.qubit_id = id;
    if (auto it = options.f_q_ghz.find(id); it != options.f_q_ghz.end()) qr.f_q_ghz = it->second;

    for (ControlKind k : kAllKinds) {
      const bool present = std::any_of(mine.begin(), mine.end(),
                                       [&](const T1Record& r) { return r.control.kind == k; });
      if (present) qr.per_kind.emplace(std::string(to_string(k)), kind_stats(mine, k));
    }
    auto stats = [&](ControlKind k) -> const KindStats* {
      auto it = qr.per_kind.find(std::string(to_string(k)));
      return it == qr.per_kind.end() || it->second.count == 0 ? nullptr : &it->second;
    };
    const KindStats* ac = stats(ControlKind::ac);
    const KindStats* fr = stats(ControlKind::fast_random);
    const KindStats* nc = stats(ControlKind::no_control);

    if (ac && fr && ac->count >= 2 && ac->std_us > 0.0) qr.n_eff = n_effective(fr->std_us, ac->std_us);
    if (ac) {
      if (fr) {
        qr.convergence["fast_random_hmean_over_ac_mean"] = fr->hmean_us / ac->mean_us;
        qr.convergence["fast_random_hmean_over_ac_hmean"] = fr->hmean_us / ac->hmean_us;
      }
      if (nc) {
        qr.convergence["no_control_hmean_over_ac_mean"] = nc->hmean_us / ac->mean_us;
        qr.convergence["no_control_hmean_over_ac_hmean"] = nc->hmean_us / ac->hmean_us;
      }
    }
    const bool excluded = std::find(options.excluded_from_q_fit.begin(), options.excluded_from_q_fit.end(),
                                    id) != options.excluded_from_q_fit.end();
    if (qr.f_q_ghz) {
      const double f = *qr.f_q_ghz;
      if (ac) {
        qr.q["ac_hmean"] = quality_factor(f, ac->hmean_us);
        qr.q["ac_mean"] = quality_factor(f, ac->mean_us);
        q_ac.push_back({f, qr.q["ac_hmean"]});
        excl_ac.push_back(excluded);
      }
      if (nc) qr.q["no_control_hmean"] = quality_factor(f, nc->hmean_us);
      if (fr) {
        qr.q["fast_random_hmean"] = quality_factor(f, fr->hmean_us);
        qr.q["fast_random_min"] = quality_factor(f, *fr->min_us);
        qr.q["fast_random_max"] = quality_factor(f, *fr->max_us);
        q_fr_max.push_back({f, qr.q["fast_random_max"]});
        excl_fr.push_back(excluded);
      }
    }
    if (ac && ac->mean_us > 0.0) {
      sm_ac.emplace_back(ac->mean_us, ac->std_us);
      if (nc) sm_nc.emplace_back(ac->mean_us, nc->std_us);
      if (fr) sm_fr.emplace_back(ac->mean_us, fr->std_us);
    }

    if (qr.f_q_ghz) {
      std::vector<TemperaturePoint> tp;
      bool has_low = false, has_high = false;
      for (const auto& r : mine) {
        if (r.control.kind != ControlKind::ac || !usable(r)) continue;
        tp.push_back({r.temperature_mk, *r.t1_us});
        has_low |= r.temperature_mk < 40.0;
        has_high |= r.temperature_mk >= 135.0;
      }
      if (has_low && has_high) qr.temperature_fit = fit_temperature_model(tp, *qr.f_q_ghz);
    }
    report.qubits.push_back(std::move(qr));
  }

  auto try_line = [](const std::vector<FrequencyQ>& pts, const std::vector<bool>& ex) -> std::optional<LineFit> {
    const auto kept = std::count(ex.begin(), ex.end(), false);
    if (kept < 2) return std::nullopt;
    try {
      return fit_q_vs_frequency(pts, ex);
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
  };
  report.q_vs_f_ac = try_line(q_ac, excl_ac);
  report.q_vs_f_fast_random_max = try_line(q_fr_max, excl_fr);
  if (!sm_ac.empty()) report.sigma_mu_slope_ac = fit_sigma_vs_mu(sm_ac);
  if (!sm_nc.empty()) report.sigma_mu_slope_no_control = fit_sigma_vs_mu(sm_nc);
  if (!sm_fr.empty()) report.sigma_mu_slope_fast_random = fit_sigma_vs_mu(sm_fr);
  return report;
}

nlohmann::ordered_json report_to_json(const AnalysisReport& report) {
  nlohmann::ordered_json j;
  j["format"] = "tlsctl-analysis";
  j["format_version"] = 1;
  j["config_hash"] = report.config_hash;
  nlohmann::ordered_json qubits = nlohmann::ordered_json::array();
  for (const auto& q : report.qubits) {
    nlohmann::ordered_json qj;
    qj["qubit_id"] = q.qubit_id;
    qj["f_q_ghz"] = opt_json(q.f_q_ghz);
    nlohmann::ordered_json kinds = nlohmann::ordered_json::object();
    for (const auto& [name, s] : q.per_kind) {
      kinds[name] = {{"mean_us", s.mean_us},   {"hmean_us", s.hmean_us},
                     {"std_us", s.std_us},     {"count", s.count},
                     {"excluded_count", s.excluded_count},
                     {"min_us", opt_json(s.min_us)}, {"max_us", opt_json(s.max_us)}};
    }
    qj["per_kind"] = std::move(kinds);
    qj["n_eff"] = opt_json(q.n_eff);
    qj["q"] = q.q;
    qj["convergence"] = q.convergence;
    if (q.temperature_fit) {
      const auto& t = *q.temperature_fit;
      qj["temperature_fit"] = {{"gamma0_per_us", t.gamma0_per_us}, {"gap_ghz", t.gap_ghz},
                               {"converged", t.converged},          {"n_low", t.n_low},
                               {"n_fit", t.n_fit}};
    } else {
      qj["temperature_fit"] = nullptr;
    }
    qubits.push_back(std::move(qj));
  }
  j["qubits"] = std::move(qubits);
  j["q_vs_f_ac"] = report.q_vs_f_ac ? line_json(*report.q_vs_f_ac) : nlohmann::ordered_json(nullptr);
  j["q_vs_f_fast_random_max"] = report.q_vs_f_fast_random_max
                                    ? line_json(*report.q_vs_f_fast_random_max)
                                    : nlohmann::ordered_json(nullptr);
  j["sigma_mu_slope"] = {{"no_control", opt_json(report.sigma_mu_slope_no_control)},
                         {"fast_random", opt_json(report.sigma_mu_slope_fast_random)},
                         {"ac", opt_json(report.sigma_mu_slope_ac)}};
  return j;
}

void write_report_files(const AnalysisReport& report, const std::vector<T1Record>& records,
                        const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "report.json");
    out << report_to_json(report).dump(2) << '\n';
  }
  auto open_csv = [&](const char* name, const char* header) {
    auto out = std::make_unique<std::ofstream>(fs::path(dir) / name);
    *out << "# config_hash=" << report.config_hash << '\n' << header << '\n';
    return out;
  };

  {
    auto out = open_csv("fig1_series.csv", "qubit_id,wall_time_s,control_kind,voltage_v,t1_us");
    for (const auto& r : records) {
      if (!usable(r)) continue;
      *out << r.qubit_id << ',' << fmt(r.wall_time_s) << ',' << to_string(r.control.kind) << ','
           << fmt_opt(r.control.voltage_v) << ',' << fmt(*r.t1_us) << '\n';
    }
  }
  {
    auto out = open_csv("fig3b_cumulative.csv", "qubit_id,control_kind,index,wall_time_s,cumulative_hmean_us");
    for (const auto& q : report.qubits) {
      for (ControlKind k : {ControlKind::ac, ControlKind::no_control, ControlKind::fast_random}) {
        std::vector<double> t1, when;
        for (const auto& r : records) {
          if (r.qubit_id == q.qubit_id && r.control.kind == k && usable(r)) {
            t1.push_back(*r.t1_us);
            when.push_back(r.wall_time_s);
          }
        }
        if (t1.empty()) continue;
        const auto cum = cumulative_hmean(t1);
        for (std::size_t i = 0; i < cum.size(); ++i) {
          *out << q.qubit_id << ',' << to_string(k) << ',' << i << ',' << fmt(when[i]) << ','
               << fmt(cum[i]) << '\n';
        }
      }
    }
  }
  auto qget = [](const QubitReport& q, const char* key) -> std::optional<double> {
    auto it = q.q.find(key);
    return it == q.q.end() ? std::nullopt : std::optional<double>(it->second);
  };
  {
    auto out = open_csv("fig3c_qf.csv",
                        "qubit_id,f_q_ghz,q_ac_hmean,q_no_control_hmean,q_fast_random_min,q_fast_random_max");
    for (const auto& q : report.qubits) {
      *out << q.qubit_id << ',' << fmt_opt(q.f_q_ghz) << ',' << fmt_opt(qget(q, "ac_hmean")) << ','
           << fmt_opt(qget(q, "no_control_hmean")) << ',' << fmt_opt(qget(q, "fast_random_min"))
           << ',' << fmt_opt(qget(q, "fast_random_max")) << '\n';
    }
  }
  auto std_of = [](const QubitReport& q, ControlKind k) -> std::optional<double> {
    auto it = q.per_kind.find(std::string(to_string(k)));
    if (it == q.per_kind.end() || it->second.count == 0) return std::nullopt;
    return it->second.std_us;
  };
  {
    auto out = open_csv("fig4c_sigma_mu.csv",
                        "qubit_id,mu_ac_us,sigma_ac_us,sigma_no_control_us,sigma_fast_random_us");
    for (const auto& q : report.qubits) {
      auto it = q.per_kind.find("ac");
      if (it == q.per_kind.end() || it->second.count == 0) continue;
      *out << q.qubit_id << ',' << fmt(it->second.mean_us) << ',' << fmt_opt(std_of(q, ControlKind::ac))
           << ',' << fmt_opt(std_of(q, ControlKind::no_control)) << ','
           << fmt_opt(std_of(q, ControlKind::fast_random)) << '\n';
    }
  }
  {
    auto out = open_csv("fig4d_neff.csv", "qubit_id,n_eff");
    for (const auto& q : report.qubits) {
      if (q.n_eff) *out << q.qubit_id << ',' << fmt(*q.n_eff) << '\n';
    }
  }
  {
    auto out = open_csv("fig5b_collapse.csv",
                        "qubit_id,vpp_v,f_ac_hz,volts_per_second,count,mean_t1_us,hmean_t1_us");
    for (const auto& q : report.qubits) {
      std::vector<std::pair<double, double>> cells;
      for (const auto& r : records) {
        if (r.qubit_id != q.qubit_id || r.control.kind != ControlKind::ac) continue;
        if (!r.control.vpp_v || !r.control.f_ac_hz) continue;
        const std::pair<double, double> key{*r.control.vpp_v, *r.control.f_ac_hz};
        if (std::find(cells.begin(), cells.end(), key) == cells.end()) cells.push_back(key);
      }
      for (const auto& [vpp, f] : cells) {
        std::vector<double> t1;
        for (const auto& r : records) {
          if (r.qubit_id == q.qubit_id && r.control.kind == ControlKind::ac && usable(r) &&
              r.control.vpp_v == vpp && r.control.f_ac_hz == f) {
            t1.push_back(*r.t1_us);
          }
        }
        *out << q.qubit_id << ',' << fmt(vpp) << ',' << fmt(f) << ',' << fmt(2.0 * vpp * f) << ','
             << t1.size() << ',' << (t1.empty() ? "" : fmt(arithmetic_mean(t1))) << ','
             << (t1.empty() ? "" : fmt(harmonic_mean(t1))) << '\n';
      }
    }
  }
  {
    auto out = open_csv("fig5d_fit.csv",
                        "qubit_id,temperature_mk,t1_us,model_t1_us,relative_residual,role");
    for (const auto& q : report.qubits) {
      if (!q.temperature_fit) continue;
      const auto& fit = *q.temperature_fit;
      std::size_t i = 0;
      for (const auto& r : records) {
        if (r.qubit_id != q.qubit_id || r.control.kind != ControlKind::ac || !usable(r)) continue;
        const char* role = r.temperature_mk < 40.0 ? "gamma0" : (r.temperature_mk >= 135.0 ? "gap" : "none");
        *out << q.qubit_id << ',' << fmt(r.temperature_mk) << ',' << fmt(*r.t1_us) << ','
             << fmt(fit.model_t1_us[i]) << ',' << fmt(fit.relative_residual[i]) << ',' << role << '\n';
        ++i;
      }
    }
  }
}

}  // namespace tlsctl
