// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run all criteria
//   acceptance --only N   run criterion N (1-10)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tlsctl/analysis.hpp"
#include "tlsctl/config.hpp"
#include "tlsctl/decay.hpp"
#include "tlsctl/measurement.hpp"
#include "tlsctl/protocols.hpp"
#include "tlsctl/units.hpp"

using namespace tlsctl;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Reference-config interleave campaigns, cached per seed within one process.
const std::vector<T1Record>& reference_campaign(std::uint64_t seed) {
  static std::map<std::uint64_t, std::vector<T1Record>> cache;
  auto it = cache.find(seed);
  if (it != cache.end()) return it->second;
  const RunConfig cfg = reference_config();
  World w = make_world(cfg.qubit, cfg.bath, seed, cfg.run.temperature_mk);
  return cache[seed] = run_interleave(w, cfg.interleave, cfg.plan);
}

Outcome gaussian_identity() {
  const double mu = 1.0, sigma = 0.5;
  const int n = 1000000;
  std::ostringstream d;
  bool ok = true;
  for (double t : {0.1, 0.5, 1.0}) {
    CounterRng rng(2024, 0);
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double y = std::exp(-(mu + sigma * rng.normal()) * t);
      sum += y;
      sum2 += y * y;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / (n - 1));
    const double z = (gaussian_average_survival(mu, sigma, t).value - mean) / se;
    ok = ok && std::abs(z) < 3.0;
    d << " t=" << t << ":z=" << fmt("%.2f", z);
  }
  return {ok, d.str()};
}

Outcome fit_recovery() {
  std::ostringstream d;
  bool ok = true;
  for (double t1 : {100.0, 1000.0, 2500.0}) {
    QubitSpec q;
    q.gamma0_per_us = 1.0 / t1;
    World w = make_world(q, BathState{}, static_cast<std::uint64_t>(t1), 0.0);
    MeasurementSettings s{make_delays(DelaySpacing::log, 101, t1 / 100.0, 4.0 * t1), 400, 600.0};
    std::vector<double> err;
    for (int trial = 0; trial < 200; ++trial) {
      const MeasurementResult r = run_t1_measurement(w, ZeroWave{}, s);
      err.push_back(r.fit.t1_us ? std::abs(*r.fit.t1_us / t1 - 1.0) : 1.0);
    }
    const double m = median(err);
    ok = ok && m < 0.03;
    d << " T1=" << t1 << "us:median_err=" << fmt("%.4f", m);
  }
  return {ok, d.str()};
}

Outcome ac_harmonic_law() {
  // One broad, voltage-tunable defect resonant at 0 V on top of gamma0.
  QubitSpec q;
  const double delta0 = 2.0, gain = 0.001;
  TlsDefect d = TlsDefect::from_user_units(0.0, delta0, gain, 22.4, 5.0, 1.0, 100.0);
  d.diff_sigma = 0.0;
  d.epsilon0 = std::sqrt(q.f_q_ghz * q.f_q_ghz - delta0 * delta0);
  BathState bath;
  bath.defects = {d};
  bath.xi = {0.0};
  const TriangleWave wave{0.1, 16.0};

  double sum = 0.0, sum2 = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double v = -8.0 + 16.0 * (i + 0.5) / n;
    const double g = gamma_total(q, bath, v, 10.0, wave);
    sum += g;
    sum2 += g * g;
  }
  const double mean_rate = sum / n;
  const double oracle = 1.0 / mean_rate;
  const double cv = std::sqrt(sum2 / n - mean_rate * mean_rate) / mean_rate;

  World w = make_world(q, bath, 99, 10.0);
  const MeasurementPlan plan = MeasurementPlan::defaults();
  std::ostringstream o;
  o << " oracle=" << fmt("%.1f", oracle) << "us cv=" << fmt("%.3f", cv) << " fits:";
  bool ok = true;
  for (int rep = 0; rep < 5; ++rep) {
    const MeasurementResult r = run_t1_measurement(w, wave, plan.ac);
    const double ratio = r.fit.t1_us ? *r.fit.t1_us / oracle : 0.0;
    ok = ok && std::abs(ratio - 1.0) < 0.10;
    o << " " << fmt("%.3f", ratio);
  }
  return {ok, o.str()};
}

Outcome stabilization() {
  const auto& recs = reference_campaign(reference_config().run.seed);
  const double s_ac = sample_std(usable_t1(recs, ControlKind::ac));
  const double s_nc = sample_std(usable_t1(recs, ControlKind::no_control));
  const double s_fr = sample_std(usable_t1(recs, ControlKind::fast_random));
  const std::size_t cycles = recs.size() / 6;
  const bool ok = cycles >= 40 && s_ac <= s_nc / 5.0 && s_ac <= s_fr / 5.0;
  return {ok, " cycles=" + std::to_string(cycles) + " std_ac=" + fmt("%.1f", s_ac) + " std_nc=" + fmt("%.1f", s_nc) +
                  " std_fr=" + fmt("%.1f", s_fr) + " nc/ac=" + fmt("%.2f", s_nc / s_ac) +
                  " fr/ac=" + fmt("%.2f", s_fr / s_ac)};
}

Outcome convergence() {
  int within10 = 0, within30 = 0;
  std::ostringstream d;
  d << " ratios:";
  for (std::uint64_t seed = 1; seed <= 11; ++seed) {
    const auto& recs = reference_campaign(seed);
    const double fr_final = cumulative_hmean(usable_t1(recs, ControlKind::fast_random)).back();
    const double ac_mean = arithmetic_mean(usable_t1(recs, ControlKind::ac));
    const double r = fr_final / ac_mean;
    within10 += std::abs(r - 1.0) <= 0.10;
    within30 += std::abs(r - 1.0) <= 0.30;
    d << " " << fmt("%.3f", r);
  }
  d << " within10=" << within10 << "/11 within30=" << within30 << "/11";
  return {within10 >= 7 && within30 == 11, d.str()};
}

Outcome n_eff_magnitude() {
  const auto& recs = reference_campaign(reference_config().run.seed);
  const double n = n_effective(sample_std(usable_t1(recs, ControlKind::fast_random)),
                               sample_std(usable_t1(recs, ControlKind::ac)));
  return {n >= 50.0, " n_eff=" + fmt("%.1f", n)};
}

Outcome sweep_collapse() {
  const RunConfig cfg = reference_config();
  World w = make_world(cfg.qubit, cfg.bath, cfg.run.seed, cfg.run.temperature_mk);
  const auto cells = run_ac_sweep(w, {16.0}, {0.1, 0.4, 1.6}, 3, cfg.plan);
  const auto pair = run_ac_sweep(w, {8.0}, {0.2}, 3, cfg.plan);
  auto mean_t1 = [](const AcSweepCell& c) { return arithmetic_mean(usable_t1(c.records, ControlKind::ac)); };
  const double a = mean_t1(cells[0]), b = mean_t1(cells[1]), c = mean_t1(cells[2]), p = mean_t1(pair[0]);
  const bool monotone = a > b && b > c;
  const double rel = std::abs(p / a - 1.0);
  return {monotone && rel <= 0.10, " 16V@0.1/0.4/1.6Hz=" + fmt("%.0f", a) + "/" + fmt("%.0f", b) + "/" +
                                       fmt("%.0f", c) + "us  8V@0.2Hz=" + fmt("%.0f", p) +
                                       "us pair_diff=" + fmt("%.3f", rel)};
}

Outcome temperature_fit() {
  const std::vector<double> temps = {10, 20, 30, 60, 80, 100, 120, 135, 150, 165, 180, 200, 220, 250};
  CounterRng rng(77, 0);
  std::vector<double> err;
  bool procedure_ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<TemperaturePoint> pts;
    for (double t : temps) {
      const double t1 = 1.0 / (4e-4 + gamma_qp(t, 4.5, 43.5));
      pts.push_back({t, t1 * (1.0 + 0.05 * rng.normal())});
    }
    const TemperatureFit f = fit_temperature_model(pts, 4.5);
    err.push_back(std::abs(f.gap_ghz / 43.5 - 1.0));
    const double low_mean = (pts[0].t1_us + pts[1].t1_us + pts[2].t1_us) / 3.0;
    procedure_ok = procedure_ok && f.converged && f.n_low == 3 && f.n_fit == 7 &&
                   std::abs(f.gamma0_per_us * low_mean - 1.0) < 1e-12;
    if (trial == 0) {
      // Points between the windows must not influence the gap.
      auto moved = pts;
      for (auto& p : moved) {
        if (p.temperature_mk >= 40.0 && p.temperature_mk < 135.0) p.t1_us *= 0.3;
      }
      procedure_ok = procedure_ok && fit_temperature_model(moved, 4.5).gap_ghz == f.gap_ghz;
    }
  }
  const double m = median(err);
  return {m < 0.02 && procedure_ok, " median_gap_err=" + fmt("%.4f", m) + (procedure_ok ? "" : " procedure_mismatch")};
}

Outcome formulas() {
  bool ok = true;
  const double q = quality_factor(4.459, 2713.0);
  ok = ok && std::abs(q / 7.6e7 - 1.0) < 0.005;
  ok = ok && n_effective(10.0, 1.0) == 100.0;
  const std::vector<double> x = {1.0, 2.0, 4.0};
  ok = ok && std::abs(harmonic_mean(x) - 12.0 / 7.0) < 1e-15;
  const auto c = cumulative_hmean(x);
  ok = ok && c[0] == 1.0 && std::abs(c[1] - 4.0 / 3.0) < 1e-15;
  ok = ok && std::abs(gaussian_average_survival(0.7, 0.0, 3.0).value / std::exp(-2.1) - 1.0) < 1e-15;
  ok = ok && std::abs(lz_crossing_probability(1.0, units::kTwoPi / std::log(2.0)) - 0.5) < 1e-15;
  ok = ok && TriangleWave{0.1, 16.0}.slope_v_per_s() == 3.2;
  ok = ok && std::abs(quality_factor(1.0 / (units::kTwoPi * 1e3), 1.0) - 1.0) < 1e-15;
  return {ok, " Q(4.459GHz,2713us)=" + fmt("%.4e", q)};
}

Outcome determinism() {
  const RunConfig cfg = reference_config();
  ScheduleSpec short_schedule = cfg.interleave;
  short_schedule.max_cycles = 2;
  auto campaign = [&]() {
    std::string out;
    World w = make_world(cfg.qubit, cfg.bath, 5, cfg.run.temperature_mk);
    out += to_jsonl(run_interleave(w, short_schedule, cfg.plan));
    out += to_jsonl(run_optimizer(w, {1000.0, 8}, cfg.plan));
    out += to_jsonl(run_champion(w, {2000.0, 4, 100, 4.0, 400, 600.0}, cfg.plan));
    for (const auto& cell : run_ac_sweep(w, {8.0, 16.0}, {0.1}, 1, cfg.plan)) out += to_jsonl(cell.records);
    for (const auto& cell : run_temperature_sweep(w, {10.0, 150.0}, {ControlKind::ac, ControlKind::fast_random}, 1,
                                                  cfg.plan)) {
      out += to_jsonl(cell.records);
    }
    return out;
  };
  const std::string a = campaign(), b = campaign();
  return {a == b && !a.empty(), " bytes=" + std::to_string(a.size()) + (a == b ? " identical" : " DIFFER")};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  const std::vector<Criterion> criteria = {
      {1, "gaussian-average identity", gaussian_identity},
      {2, "fit recovery", fit_recovery},
      {3, "AC harmonic-average law", ac_harmonic_law},
      {4, "stabilization", stabilization},
      {5, "convergence", convergence},
      {6, "n_eff magnitude", n_eff_magnitude},
      {7, "sweep-rate collapse", sweep_collapse},
      {8, "temperature fit", temperature_fit},
      {9, "formula spot-checks", formulas},
      {10, "determinism", determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string(" exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s #%d %s:%s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
