#include "tlsctl/bath.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "tlsctl/units.hpp"

namespace tlsctl {
namespace {

void require_range(const Range& r, const char* name, bool positive) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
    throw std::invalid_argument(std::string("bath.") + name + ": inverted or non-finite range");
  }
  if (positive && !(r.lo > 0.0)) {
    throw std::invalid_argument(std::string("bath.") + name + ": lower bound must be positive");
  }
}

void ou_step(BathState& state, double dt_s) {
  for (std::size_t i = 0; i < state.defects.size(); ++i) {
    const TlsDefect& d = state.defects[i];
    const double decay = std::exp(-dt_s / d.diff_tau);
    // 1 - exp(-2x) computed without cancellation for small steps.
    const double spread = d.diff_sigma * std::sqrt(-std::expm1(-2.0 * dt_s / d.diff_tau));
    state.xi[i] = state.xi[i] * decay + spread * state.rng.normal();
  }
}

}  // namespace

TlsDefect TlsDefect::from_user_units(double epsilon0_ghz, double delta0_ghz,
                                     double dipole_gain_ghz_per_v, double g_bare_over_2pi_khz,
                                     double gamma2_over_2pi_mhz, double diff_sigma_mhz,
                                     double diff_tau_s) {
  TlsDefect d;
  d.epsilon0 = epsilon0_ghz;
  d.delta0 = delta0_ghz;
  d.dipole_gain = dipole_gain_ghz_per_v;
  d.g_bare = units::khz_to_rad_per_us(g_bare_over_2pi_khz);
  d.gamma2 = units::mhz_to_rad_per_us(gamma2_over_2pi_mhz);
  d.diff_sigma = diff_sigma_mhz * 1.0e-3;
  d.diff_tau = diff_tau_s;
  d.validate();
  return d;
}

void TlsDefect::validate() const {
  if (!(delta0 > 0.0)) throw std::invalid_argument("TlsDefect: delta0 must be > 0");
  if (!(gamma2 > 0.0)) throw std::invalid_argument("TlsDefect: gamma2 must be > 0");
  if (!(g_bare >= 0.0)) throw std::invalid_argument("TlsDefect: g_bare must be >= 0");
  if (!(diff_sigma >= 0.0)) throw std::invalid_argument("TlsDefect: diff_sigma must be >= 0");
  if (!(diff_tau > 0.0)) throw std::invalid_argument("TlsDefect: diff_tau must be > 0");
}

void BathConfig::validate() const {
  if (n_tls < 0) throw std::invalid_argument("bath.n_tls: must be >= 0");
  if (!(center_ghz > 0.0)) throw std::invalid_argument("bath.center_ghz: must be > 0");
  if (!(window_ghz >= 0.0)) throw std::invalid_argument("bath.window_ghz: must be >= 0");
  if (!(center_ghz - window_ghz > 0.0)) {
    throw std::invalid_argument("bath.window_ghz: window extends below zero frequency");
  }
  if (!(dipole_gain_scale_ghz_per_v >= 0.0)) {
    throw std::invalid_argument("bath.dipole_gain_scale_ghz_per_v: must be >= 0");
  }
  require_range(delta0_ghz, "delta0_ghz", true);
  require_range(g_bare_over_2pi_khz, "g_bare_over_2pi_khz", true);
  require_range(gamma2_over_2pi_mhz, "gamma2_over_2pi_mhz", true);
  require_range(diff_sigma_mhz, "diff_sigma_mhz", true);
  require_range(diff_tau_s, "diff_tau_s", true);
  if (n_tls > 0 && delta0_ghz.lo > center_ghz + window_ghz) {
    throw std::invalid_argument("bath.delta0_ghz: no tunneling energy fits below the window");
  }
}

BathState sample_bath(const BathConfig& config, std::uint64_t seed) {
  config.validate();
  CounterRng rng(seed, streams::kBathSample);
  BathState state;
  state.rng = CounterRng(seed, streams::kDiffusion);
  state.defects.reserve(static_cast<std::size_t>(config.n_tls));
  state.xi.reserve(static_cast<std::size_t>(config.n_tls));
  for (int i = 0; i < config.n_tls; ++i) {
    const double splitting =
        rng.uniform(config.center_ghz - config.window_ghz, config.center_ghz + config.window_ghz);
    double delta0 = rng.log_uniform(config.delta0_ghz.lo, config.delta0_ghz.hi);
    // Rejection keeps the draw log-uniform on [lo, min(hi, splitting)].
    for (int tries = 0; delta0 > splitting; ++tries) {
      if (tries > 10000) throw std::runtime_error("sample_bath: delta0 rejection did not terminate");
      delta0 = rng.log_uniform(config.delta0_ghz.lo, config.delta0_ghz.hi);
    }
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    TlsDefect d;
    d.delta0 = delta0;
    d.epsilon0 = sign * std::sqrt(std::max(0.0, splitting * splitting - delta0 * delta0));
    d.dipole_gain = config.dipole_gain_scale_ghz_per_v * rng.normal();
    d.g_bare = units::khz_to_rad_per_us(
        rng.log_uniform(config.g_bare_over_2pi_khz.lo, config.g_bare_over_2pi_khz.hi));
    d.gamma2 = units::mhz_to_rad_per_us(
        rng.log_uniform(config.gamma2_over_2pi_mhz.lo, config.gamma2_over_2pi_mhz.hi));
    d.diff_sigma = 1.0e-3 * rng.log_uniform(config.diff_sigma_mhz.lo, config.diff_sigma_mhz.hi);
    d.diff_tau = rng.log_uniform(config.diff_tau_s.lo, config.diff_tau_s.hi);
    state.xi.push_back(d.diff_sigma * rng.normal());
    state.defects.push_back(d);
  }
  return state;
}

double tls_splitting(const TlsDefect& d, double bias_v, double xi_ghz) {
  const double asym = d.epsilon0 + d.dipole_gain * bias_v + xi_ghz;
  return std::hypot(asym, d.delta0);
}

double transverse_coupling(const TlsDefect& d, double splitting_ghz) {
  if (splitting_ghz < d.delta0) {
    throw std::invalid_argument("transverse_coupling: splitting below tunneling energy");
  }
  return d.g_bare * d.delta0 / splitting_ghz;
}

void advance_diffusion(BathState& state, double dt_s) {
  if (!(dt_s >= 0.0)) throw std::invalid_argument("advance_diffusion: dt must be >= 0");
  ou_step(state, dt_s);
  state.clock_s += dt_s;
}

void advance_diffusion_to(BathState& state, double t_s) {
  const double dt = t_s - state.clock_s;
  if (!(dt >= 0.0)) throw std::invalid_argument("advance_diffusion_to: target lies in the past");
  ou_step(state, dt);
  state.clock_s = t_s;
}

nlohmann::json bath_to_json(const BathState& state) {
  nlohmann::json defects = nlohmann::json::array();
  for (std::size_t i = 0; i < state.defects.size(); ++i) {
    const TlsDefect& d = state.defects[i];
    defects.push_back({{"epsilon0_ghz", d.epsilon0},
                       {"delta0_ghz", d.delta0},
                       {"dipole_gain_ghz_per_v", d.dipole_gain},
                       {"g_bare_rad_per_us", d.g_bare},
                       {"gamma2_rad_per_us", d.gamma2},
                       {"diff_sigma_ghz", d.diff_sigma},
                       {"diff_tau_s", d.diff_tau},
                       {"xi_ghz", state.xi[i]}});
  }
  return {{"format", "tlsctl-bath"},
          {"format_version", 1},
          {"clock_s", state.clock_s},
          {"rng", {{"seed", state.rng.seed()},
                   {"stream", state.rng.stream()},
                   {"position", state.rng.position()}}},
          {"defects", std::move(defects)}};
}

BathState bath_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "tlsctl-bath") {
    throw std::invalid_argument("bath_from_json: not a tlsctl bath document");
  }
  BathState state;
  state.clock_s = j.at("clock_s").get<double>();
  const auto& r = j.at("rng");
  state.rng = CounterRng(r.at("seed").get<std::uint64_t>(), r.at("stream").get<std::uint64_t>());
  state.rng.seek(r.at("position").get<std::uint64_t>());
  for (const auto& e : j.at("defects")) {
    TlsDefect d;
    d.epsilon0 = e.at("epsilon0_ghz").get<double>();
    d.delta0 = e.at("delta0_ghz").get<double>();
    d.dipole_gain = e.at("dipole_gain_ghz_per_v").get<double>();
    d.g_bare = e.at("g_bare_rad_per_us").get<double>();
    d.gamma2 = e.at("gamma2_rad_per_us").get<double>();
    d.diff_sigma = e.at("diff_sigma_ghz").get<double>();
    d.diff_tau = e.at("diff_tau_s").get<double>();
    d.validate();
    state.defects.push_back(d);
    state.xi.push_back(e.at("xi_ghz").get<double>());
  }
  return state;
}

}  // namespace tlsctl
