#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "tlsctl/measurement.hpp"
#include "tlsctl/records.hpp"

namespace tlsctl {

using MeasureFn =
    std::function<MeasurementResult(World&, const WaveformSpec&, const MeasurementSettings&)>;

/// Measurement settings per control kind, plus the control waveforms.
struct MeasurementPlan {
  MeasurementSettings ac;
  MeasurementSettings no_control;
  MeasurementSettings fast_random;
  TriangleWave ac_wave{0.1, 16.0};
  double fast_random_v_max = 8.0;

  /// 101 log delays 10 µs–12 ms over 600 s for AC and no-control; 25 log
  /// delays over 150 s for fast-random; 400 shots per point throughout.
  static MeasurementPlan defaults();
};

struct BreakSpec {
  double after_active_hours = 0.0;
  double duration_s = 0.0;
};

struct ScheduleSpec {
  std::vector<ControlKind> cycle = {ControlKind::ac,          ControlKind::no_control,
                                    ControlKind::fast_random, ControlKind::fast_random,
                                    ControlKind::fast_random, ControlKind::fast_random};
  std::optional<int> max_cycles;
  double active_hours = 0.0;  ///< 0 disables the active-time limit
  std::vector<BreakSpec> breaks;

  void validate() const;
};

/// Uniform DC voltage on [−v_max, +v_max].
double draw_random_voltage(CounterRng& rng, double v_max = 8.0);

T1Record make_record(const World& world, const ControlDescriptor& control,
                     const MeasurementResult& result);

/// Repeats the cycle (AC, no-control, 4× fast-random by default) until the
/// cycle cap or the active-time budget is reached, idling through breaks.
std::vector<T1Record> run_interleave(World& world, const ScheduleSpec& schedule,
                                     const MeasurementPlan& plan,
                                     const MeasureFn& measure = run_t1_measurement);

struct OptimizerSettings {
  double threshold_us = 1000.0;
  int max_measurements = 100;
};

/// Hold the voltage while T1 beats the threshold; redraw on every miss.
std::vector<T1Record> run_optimizer(World& world, const OptimizerSettings& settings,
                                    const MeasurementPlan& plan,
                                    const MeasureFn& measure = run_t1_measurement);

/// Number of fresh voltages needed to recover after each miss. A trailing
/// unfinished run is reported only once it already exceeds three attempts.
std::vector<int> optimizer_redraw_runs(const std::vector<T1Record>& records, double threshold_us);

struct ChampionSettings {
  double coarse_threshold_us = 2000.0;
  int coarse_scans = 20;
  int fine_points = 100;
  double fine_span_factor = 4.0;
  int fine_shots_per_point = 400;
  double fine_duration_s = 600.0;
};

/// Linear grid ending at span_factor × the coarse estimate.
DelayGrid champion_fine_grid(double coarse_t1_us, const ChampionSettings& settings);

/// Fast-random coarse scans; a coarse T1 above threshold holds that voltage
/// for a fine linear scan, recorded as kind champion.
std::vector<T1Record> run_champion(World& world, const ChampionSettings& settings,
                                   const MeasurementPlan& plan,
                                   const MeasureFn& measure = run_t1_measurement);

struct AcSweepCell {
  double vpp = 0.0;
  double f_ac_hz = 0.0;
  double volts_per_second() const { return 2.0 * vpp * f_ac_hz; }
  double product() const { return vpp * f_ac_hz; }
  std::vector<T1Record> records;
};

/// AC measurements on the vpp × f_ac grid; repeats cycle round-robin over
/// cells so slow drift is shared evenly.
std::vector<AcSweepCell> run_ac_sweep(World& world, const std::vector<double>& vpp_list,
                                      const std::vector<double>& f_ac_list, int repeats,
                                      const MeasurementPlan& plan,
                                      const MeasureFn& measure = run_t1_measurement);

struct TemperatureCell {
  double temperature_mk = 0.0;
  std::vector<T1Record> records;
};

std::vector<TemperatureCell> run_temperature_sweep(World& world,
                                                   const std::vector<double>& temperatures_mk,
                                                   const std::vector<ControlKind>& kinds,
                                                   int repeats, const MeasurementPlan& plan,
                                                   const MeasureFn& measure = run_t1_measurement);

}  // namespace tlsctl
