#include "tlsctl/protocols.hpp"

#include <stdexcept>

#include "tlsctl/units.hpp"

namespace tlsctl {
namespace {

struct Control {
  WaveformSpec wave;
  ControlDescriptor descriptor;
  const MeasurementSettings* settings;
};

Control control_for(World& world, ControlKind kind, const MeasurementPlan& plan) {
  switch (kind) {
    case ControlKind::ac:
      return {plan.ac_wave, {kind, std::nullopt, plan.ac_wave.f_ac_hz, plan.ac_wave.vpp}, &plan.ac};
    case ControlKind::no_control:
      return {ZeroWave{}, {kind, 0.0, std::nullopt, std::nullopt}, &plan.no_control};
    case ControlKind::fast_random: {
      const double v = draw_random_voltage(world.control_rng, plan.fast_random_v_max);
      return {DcWave{v}, {kind, v, std::nullopt, std::nullopt}, &plan.fast_random};
    }
    default:
      throw std::invalid_argument("control kind '" + std::string(to_string(kind)) +
                                  "' is not a schedulable measurement");
  }
}

}  // namespace

MeasurementPlan MeasurementPlan::defaults() {
  MeasurementPlan plan;
  plan.ac = {make_delays(DelaySpacing::log, 101, 10.0, 12000.0), 400, 600.0};
  plan.no_control = plan.ac;
  plan.fast_random = {make_delays(DelaySpacing::log, 25, 10.0, 12000.0), 400, 150.0};
  return plan;
}

void ScheduleSpec::validate() const {
  if (cycle.empty()) throw std::invalid_argument("schedule: cycle composition is empty");
  if (max_cycles && *max_cycles < 0) throw std::invalid_argument("schedule: max_cycles must be >= 0");
  if (!(active_hours >= 0.0)) throw std::invalid_argument("schedule: active_hours must be >= 0");
  if (!max_cycles && active_hours == 0.0) {
    throw std::invalid_argument("schedule: set max_cycles or active_hours");
  }
  for (const auto& b : breaks) {
    if (!(b.duration_s >= 0.0)) throw std::invalid_argument("schedule: break duration must be >= 0");
    if (!(b.after_active_hours >= 0.0)) throw std::invalid_argument("schedule: break offset must be >= 0");
  }
  for (auto k : cycle) {
    if (k != ControlKind::ac && k != ControlKind::no_control && k != ControlKind::fast_random) {
      throw std::invalid_argument("schedule: cycle may only contain ac, no_control, fast_random");
    }
  }
}

double draw_random_voltage(CounterRng& rng, double v_max) { return rng.uniform(-v_max, v_max); }

T1Record make_record(const World& world, const ControlDescriptor& control,
                     const MeasurementResult& result) {
  T1Record r;
  r.wall_time_s = result.start_s;
  r.qubit_id = world.qubit.id;
  r.control = control;
  r.temperature_mk = world.temperature_mk;
  r.t1_us = result.fit.t1_us;
  r.t1_stderr_us = result.fit.t1_stderr_us;
  r.converged = result.fit.converged;
  r.seed = world.seed;
  return r;
}

std::vector<T1Record> run_interleave(World& world, const ScheduleSpec& schedule,
                                     const MeasurementPlan& plan, const MeasureFn& measure) {
  schedule.validate();
  std::vector<T1Record> records;
  const double budget_s = schedule.active_hours * units::kSecondsPerHour;
  double active_s = 0.0;
  std::size_t next_break = 0;
  for (int cycle = 0;; ++cycle) {
    if (schedule.max_cycles && cycle >= *schedule.max_cycles) break;
    if (budget_s > 0.0 && active_s >= budget_s) break;
    for (ControlKind kind : schedule.cycle) {
      const Control c = control_for(world, kind, plan);
      const MeasurementResult res = measure(world, c.wave, *c.settings);
      records.push_back(make_record(world, c.descriptor, res));
      active_s += c.settings->duration_s;
    }
    while (next_break < schedule.breaks.size() &&
           active_s >= schedule.breaks[next_break].after_active_hours * units::kSecondsPerHour) {
      advance_diffusion(world.bath, schedule.breaks[next_break].duration_s);
      ++next_break;
    }
  }
  return records;
}

std::vector<T1Record> run_optimizer(World& world, const OptimizerSettings& settings,
                                    const MeasurementPlan& plan, const MeasureFn& measure) {
  if (!(settings.threshold_us > 0.0)) throw std::invalid_argument("optimizer: threshold must be > 0");
  if (settings.max_measurements < 0) throw std::invalid_argument("optimizer: max_measurements must be >= 0");
  std::vector<T1Record> records;
  std::optional<double> held;
  for (int m = 0; m < settings.max_measurements; ++m) {
    const double v = held ? *held : draw_random_voltage(world.control_rng, plan.fast_random_v_max);
    const MeasurementResult res = measure(world, DcWave{v}, plan.fast_random);
    records.push_back(
        make_record(world, {ControlKind::optimizer, v, std::nullopt, std::nullopt}, res));
    const bool success = res.fit.converged && res.fit.t1_us && *res.fit.t1_us > settings.threshold_us;
    held = success ? std::optional<double>(v) : std::nullopt;
  }
  return records;
}

std::vector<int> optimizer_redraw_runs(const std::vector<T1Record>& records, double threshold_us) {
  std::vector<int> runs;
  int current = -1;  // -1: not in a run
  for (const auto& r : records) {
    const bool success = r.converged && r.t1_us && *r.t1_us > threshold_us;
    if (current >= 0) ++current;
    if (success) {
      if (current > 0) runs.push_back(current);
      current = -1;
    } else if (current < 0) {
      current = 0;
    }
  }
  if (current > 3) runs.push_back(current);
  return runs;
}

DelayGrid champion_fine_grid(double coarse_t1_us, const ChampionSettings& settings) {
  const double t_max = settings.fine_span_factor * coarse_t1_us;
  return make_delays(DelaySpacing::linear, settings.fine_points,
                     t_max / static_cast<double>(settings.fine_points), t_max);
}

std::vector<T1Record> run_champion(World& world, const ChampionSettings& settings,
                                   const MeasurementPlan& plan, const MeasureFn& measure) {
  std::vector<T1Record> records;
  for (int scan = 0; scan < settings.coarse_scans; ++scan) {
    const double v = draw_random_voltage(world.control_rng, plan.fast_random_v_max);
    const MeasurementResult coarse = measure(world, DcWave{v}, plan.fast_random);
    records.push_back(
        make_record(world, {ControlKind::fast_random, v, std::nullopt, std::nullopt}, coarse));
    if (!coarse.fit.converged || !coarse.fit.t1_us ||
        !(*coarse.fit.t1_us > settings.coarse_threshold_us)) {
      continue;
    }
    const MeasurementSettings fine{champion_fine_grid(*coarse.fit.t1_us, settings),
                                   settings.fine_shots_per_point, settings.fine_duration_s};
    const MeasurementResult res = measure(world, DcWave{v}, fine);
    records.push_back(
        make_record(world, {ControlKind::champion, v, std::nullopt, std::nullopt}, res));
  }
  return records;
}

std::vector<AcSweepCell> run_ac_sweep(World& world, const std::vector<double>& vpp_list,
                                      const std::vector<double>& f_ac_list, int repeats,
                                      const MeasurementPlan& plan, const MeasureFn& measure) {
  if (repeats < 1) throw std::invalid_argument("ac sweep: repeats must be >= 1");
  std::vector<AcSweepCell> cells;
  for (double vpp : vpp_list) {
    for (double f : f_ac_list) {
      TriangleWave{f, vpp}.validate();
      cells.push_back({vpp, f, {}});
    }
  }
  for (int rep = 0; rep < repeats; ++rep) {
    for (auto& cell : cells) {
      const TriangleWave wave{cell.f_ac_hz, cell.vpp};
      const MeasurementResult res = measure(world, wave, plan.ac);
      cell.records.push_back(
          make_record(world, {ControlKind::ac, std::nullopt, cell.f_ac_hz, cell.vpp}, res));
    }
  }
  return cells;
}

std::vector<TemperatureCell> run_temperature_sweep(World& world,
                                                   const std::vector<double>& temperatures_mk,
                                                   const std::vector<ControlKind>& kinds,
                                                   int repeats, const MeasurementPlan& plan,
                                                   const MeasureFn& measure) {
  if (repeats < 1) throw std::invalid_argument("temperature sweep: repeats must be >= 1");
  for (double t : temperatures_mk) {
    if (!(t >= 0.0)) throw std::invalid_argument("temperature sweep: temperatures must be >= 0");
  }
  std::vector<TemperatureCell> cells;
  for (double t : temperatures_mk) {
    world.temperature_mk = t;
    TemperatureCell cell{t, {}};
    for (int rep = 0; rep < repeats; ++rep) {
      for (ControlKind kind : kinds) {
        const Control c = control_for(world, kind, plan);
        const MeasurementResult res = measure(world, c.wave, *c.settings);
        cell.records.push_back(make_record(world, c.descriptor, res));
      }
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

}  // namespace tlsctl
