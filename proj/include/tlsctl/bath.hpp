#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "tlsctl/rng.hpp"

namespace tlsctl {

/// One electric-field-tunable defect in the standard tunneling model.
/// Energies in GHz, couplings and linewidths in rad/µs.
struct TlsDefect {
  double epsilon0 = 0.0;     ///< asymmetry at zero bias, GHz (signed)
  double delta0 = 1.0;       ///< tunneling energy, GHz
  double dipole_gain = 0.0;  ///< asymmetry shift per electrode volt, GHz/V
  double g_bare = 0.0;       ///< bare transverse coupling, rad/µs
  double gamma2 = 1.0;       ///< TLS linewidth, rad/µs
  double diff_sigma = 0.0;   ///< stationary std of the diffusion offset, GHz
  double diff_tau = 1.0;     ///< diffusion correlation time, s

  /// Builds a defect from user units: coupling g/2π in kHz, linewidth and
  /// diffusion amplitude in MHz.
  static TlsDefect from_user_units(double epsilon0_ghz, double delta0_ghz,
                                   double dipole_gain_ghz_per_v, double g_bare_over_2pi_khz,
                                   double gamma2_over_2pi_mhz, double diff_sigma_mhz,
                                   double diff_tau_s);

  void validate() const;
  friend bool operator==(const TlsDefect&, const TlsDefect&) = default;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Range&, const Range&) = default;
};

/// Ensemble parameters. Held in user units; converted when sampling.
struct BathConfig {
  int n_tls = 1200;
  double center_ghz = 4.5;  ///< usually the qubit frequency
  double window_ghz = 1.0;  ///< half-width of the splitting window
  Range delta0_ghz{0.1, 4.5};
  double dipole_gain_scale_ghz_per_v = 0.1;
  Range g_bare_over_2pi_khz{6.0, 18.0};
  Range gamma2_over_2pi_mhz{1.0, 5.0};
  Range diff_sigma_mhz{2.0, 20.0};
  Range diff_tau_s{1.0e2, 1.0e4};

  void validate() const;
  friend bool operator==(const BathConfig&, const BathConfig&) = default;
};

struct BathState {
  std::vector<TlsDefect> defects;
  std::vector<double> xi;  ///< current diffusion offset per defect, GHz
  double clock_s = 0.0;
  CounterRng rng;          ///< diffusion stream

  std::size_t size() const { return defects.size(); }
  friend bool operator==(const BathState&, const BathState&) = default;
};

BathState sample_bath(const BathConfig& config, std::uint64_t seed);

/// sqrt((epsilon0 + gain·bias + xi)² + delta0²), GHz.
double tls_splitting(const TlsDefect& d, double bias_v, double xi_ghz);

/// g_bare · delta0 / splitting, rad/µs. Throws if splitting < delta0.
double transverse_coupling(const TlsDefect& d, double splitting_ghz);

/// Exact Ornstein-Uhlenbeck step of every offset, then clock += dt.
void advance_diffusion(BathState& state, double dt_s);

/// Same as advance_diffusion, but lands the clock exactly on t_s.
void advance_diffusion_to(BathState& state, double t_s);

nlohmann::json bath_to_json(const BathState& state);
BathState bath_from_json(const nlohmann::json& j);

}  // namespace tlsctl
