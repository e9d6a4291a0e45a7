#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tlsctl/bath.hpp"
#include "tlsctl/decay.hpp"
#include "tlsctl/rng.hpp"

namespace tlsctl {

enum class DelaySpacing { log, linear };

struct DelayGrid {
  DelaySpacing spacing = DelaySpacing::log;
  std::vector<double> delays_us;

  std::size_t size() const { return delays_us.size(); }
  double t_min() const { return delays_us.front(); }
  double t_max() const { return delays_us.back(); }
};

/// Geometric (log) or arithmetic (linear) progression with exact endpoints.
DelayGrid make_delays(DelaySpacing spacing, int n, double t_min_us, double t_max_us);

struct P1Curve {
  std::vector<double> delays_us;
  std::vector<double> p1;
  std::vector<std::int64_t> shots;

  void validate() const;
};

struct T1Fit {
  std::optional<double> t1_us;  ///< unset when the fit did not converge
  double amplitude = 0.0;
  double offset = 0.0;
  std::optional<double> t1_stderr_us;
  bool converged = false;
  double residual_rms = 0.0;
  int iterations = 0;
};

struct FitOptions {
  bool fit_offset = true;
  int max_iterations = 500;
};

/// Weighted least squares of A·exp(−t/T1) + B with binomial weights and box
/// bounds T1 ∈ [t_min/10, 100·t_max], A ∈ (0, 1.2], B ∈ [−0.1, 0.5].
/// Requires at least four points.
T1Fit fit_exponential(const P1Curve& curve, const FitOptions& options = {});

struct MeasurementSettings {
  DelayGrid grid;
  int shots_per_point = 400;
  double duration_s = 600.0;

  void validate() const;
};

/// Everything one experiment timeline owns. The bath clock is the world clock.
struct World {
  QubitSpec qubit;
  BathState bath;
  double temperature_mk = 10.0;
  std::uint64_t seed = 0;
  CounterRng shot_rng;
  CounterRng control_rng;

  double clock_s() const { return bath.clock_s; }
};

World make_world(const QubitSpec& qubit, const BathConfig& bath_config, std::uint64_t seed,
                 double temperature_mk = 10.0);
/// Wraps an existing bath; used for hand-built test worlds.
World make_world(const QubitSpec& qubit, BathState bath, std::uint64_t seed,
                 double temperature_mk = 10.0);

struct MeasurementResult {
  P1Curve curve;
  T1Fit fit;
  double start_s = 0.0;
  double phase = 0.0;
};

/// Excitation-delay-measure shots over the grid. Shots are taken in rounds
/// (one shot per delay per round) spread evenly over duration_s; the bath
/// diffuses between n_points equal wall-time slices. Bias is frozen per shot.
MeasurementResult run_t1_measurement(World& world, const WaveformSpec& control,
                                     const MeasurementSettings& settings);

/// Noiseless survival with the readout assignment channel applied.
double readout_survival(const QubitSpec& q, double gamma_per_us, double t_us);

}  // namespace tlsctl
