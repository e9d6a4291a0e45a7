#include "tlsctl/measurement.hpp"

#include <cmath>
#include <stdexcept>

namespace tlsctl {

DelayGrid make_delays(DelaySpacing spacing, int n, double t_min_us, double t_max_us) {
  if (n < 2) throw std::invalid_argument("make_delays: need at least 2 points");
  if (!(t_min_us > 0.0)) throw std::invalid_argument("make_delays: t_min must be > 0");
  if (!(t_max_us > t_min_us)) throw std::invalid_argument("make_delays: t_max must exceed t_min");
  DelayGrid grid;
  grid.spacing = spacing;
  grid.delays_us.resize(static_cast<std::size_t>(n));
  const double last = static_cast<double>(n - 1);
  for (int k = 0; k < n; ++k) {
    const double frac = static_cast<double>(k) / last;
    grid.delays_us[k] = spacing == DelaySpacing::log
                            ? t_min_us * std::pow(t_max_us / t_min_us, frac)
                            : t_min_us + (t_max_us - t_min_us) * frac;
  }
  grid.delays_us.front() = t_min_us;
  grid.delays_us.back() = t_max_us;
  return grid;
}

void P1Curve::validate() const {
  if (delays_us.size() != p1.size() || delays_us.size() != shots.size()) {
    throw std::invalid_argument("P1Curve: column lengths differ");
  }
  for (std::size_t k = 0; k < p1.size(); ++k) {
    if (!(p1[k] >= 0.0 && p1[k] <= 1.0)) throw std::invalid_argument("P1Curve: p1 outside [0, 1]");
    if (shots[k] < 1) throw std::invalid_argument("P1Curve: shots must be >= 1");
    if (!(delays_us[k] >= 0.0)) throw std::invalid_argument("P1Curve: negative delay");
  }
}

void MeasurementSettings::validate() const {
  if (grid.size() < 4) throw std::invalid_argument("measurement: delay grid needs at least 4 points for a fit");
  if (shots_per_point < 1) throw std::invalid_argument("measurement: shots_per_point must be >= 1");
  if (!(duration_s > 0.0)) throw std::invalid_argument("measurement: duration_s must be > 0");
}

World make_world(const QubitSpec& qubit, const BathConfig& bath_config, std::uint64_t seed,
                 double temperature_mk) {
  return make_world(qubit, sample_bath(bath_config, seed), seed, temperature_mk);
}

World make_world(const QubitSpec& qubit, BathState bath, std::uint64_t seed,
                 double temperature_mk) {
  qubit.validate();
  if (!(temperature_mk >= 0.0)) throw std::invalid_argument("world: temperature must be >= 0");
  World w;
  w.qubit = qubit;
  w.bath = std::move(bath);
  w.temperature_mk = temperature_mk;
  w.seed = seed;
  w.shot_rng = CounterRng(seed, streams::kShots);
  w.control_rng = CounterRng(seed, streams::kControl);
  return w;
}

double readout_survival(const QubitSpec& q, double gamma_per_us, double t_us) {
  const double s = std::exp(-gamma_per_us * t_us);
  return (1.0 - q.read_err_e) * s + q.read_err_g * (1.0 - s);
}

MeasurementResult run_t1_measurement(World& world, const WaveformSpec& control,
                                     const MeasurementSettings& settings) {
  settings.validate();
  const QubitSpec& q = world.qubit;
  const auto& delays = settings.grid.delays_us;
  const std::size_t n = delays.size();
  const std::size_t rounds = static_cast<std::size_t>(settings.shots_per_point);
  const double total = static_cast<double>(n * rounds);

  MeasurementResult result;
  result.start_s = world.clock_s();
  result.phase = world.shot_rng.uniform();
  const double t0 = result.start_s;

  const auto* sweep = std::get_if<TriangleWave>(&control);
  if (sweep) sweep->validate();

  std::vector<std::int64_t> counts(n, 0);
  std::vector<double> p_fixed(n);
  for (std::size_t slice = 0; slice < n; ++slice) {
    double base = q.gamma0_per_us + gamma_qp(world.temperature_mk, q);
    if (sweep) {
      base += gamma_lz(q, world.bath, *sweep);
      const TlsRateEvaluator tls(q, world.bath);
      for (std::size_t i = slice * rounds; i < (slice + 1) * rounds; ++i) {
        const std::size_t k = i % n;
        const double t_rel = settings.duration_s * (static_cast<double>(i) + 0.5) / total;
        const double gamma = base + tls(waveform_voltage(control, t_rel, result.phase));
        if (world.shot_rng.uniform() < readout_survival(q, gamma, delays[k])) ++counts[k];
      }
    } else {
      const double gamma = base + gamma_tls(q, world.bath, waveform_voltage(control, 0.0, 0.0));
      for (std::size_t k = 0; k < n; ++k) p_fixed[k] = readout_survival(q, gamma, delays[k]);
      for (std::size_t i = slice * rounds; i < (slice + 1) * rounds; ++i) {
        if (world.shot_rng.uniform() < p_fixed[i % n]) ++counts[i % n];
      }
    }
    const double frac = static_cast<double>(slice + 1) / static_cast<double>(n);
    advance_diffusion_to(world.bath, t0 + settings.duration_s * frac);
  }

  result.curve.delays_us = delays;
  result.curve.shots.assign(n, static_cast<std::int64_t>(rounds));
  result.curve.p1.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    result.curve.p1[k] = static_cast<double>(counts[k]) / static_cast<double>(rounds);
  }
  result.fit = fit_exponential(result.curve);
  return result;
}

}  // namespace tlsctl
