#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tlsctl/bath.hpp"

namespace tlsctl {

struct QubitSpec {
  std::string id = "q0";
  double f_q_ghz = 4.5;
  double gamma0_per_us = 2.5e-4;  ///< residual (non-TLS) loss rate
  double gap_ghz = 43.5;          ///< superconducting gap Δ/h
  double chi_over_2pi_khz = 200.0;    // metadata only
  double kappa_over_2pi_khz = 100.0;  // metadata only
  double read_err_e = 0.02;  ///< P(read 0 | state 1)
  double read_err_g = 0.01;  ///< P(read 1 | state 0)

  void validate() const;
  friend bool operator==(const QubitSpec&, const QubitSpec&) = default;
};

struct ZeroWave {
  friend bool operator==(const ZeroWave&, const ZeroWave&) = default;
};
struct DcWave {
  double volts = 0.0;
  friend bool operator==(const DcWave&, const DcWave&) = default;
};
/// Symmetric triangle: 0 V at phase 0 rising, +vpp/2 at a quarter period.
struct TriangleWave {
  double f_ac_hz = 0.1;
  double vpp = 16.0;
  void validate() const;
  double slope_v_per_s() const { return 2.0 * vpp * f_ac_hz; }
  friend bool operator==(const TriangleWave&, const TriangleWave&) = default;
};
using WaveformSpec = std::variant<ZeroWave, DcWave, TriangleWave>;

double waveform_voltage(const WaveformSpec& w, double t_s, double phase);

/// Lorentzian TLS loss Σ 2 g_eff² γ2 / (γ2² + δ²), µs⁻¹.
double gamma_tls(const QubitSpec& q, const BathState& bath, double bias_v);

/// Thermal-equilibrium quasiparticle loss for a single junction, µs⁻¹.
double gamma_qp(double temperature_mk, double f_q_ghz, double gap_ghz);
inline double gamma_qp(double temperature_mk, const QubitSpec& q) {
  return gamma_qp(temperature_mk, q.f_q_ghz, q.gap_ghz);
}

/// 1 − exp(−2π g²/v); g in rad/µs, v in rad/µs per µs.
double lz_crossing_probability(double g_eff, double sweep_rate);

/// Mean loss rate from Landau-Zener swaps at resonance crossings, µs⁻¹.
double gamma_lz(const QubitSpec& q, const BathState& bath, const TriangleWave& w);

double gamma_total(const QubitSpec& q, const BathState& bath, double bias_v,
                   double temperature_mk, const std::optional<TriangleWave>& sweep);

struct SurvivalAverage {
  double value = 1.0;
  bool valid = true;  ///< false once t ≥ 2μ/σ², outside the short-time regime
};

/// ⟨e^{−Γt}⟩ for Γ ~ N(mu, sigma²): exp(−mu·t + sigma²t²/2).
SurvivalAverage gaussian_average_survival(double mu, double sigma, double t_us);

/// TLS loss at arbitrary bias for a frozen set of offsets. Precomputes the
/// bias-independent parts so per-shot evaluation is a tight loop.
class TlsRateEvaluator {
 public:
  TlsRateEvaluator(const QubitSpec& q, const BathState& bath);
  double operator()(double bias_v) const;

 private:
  double f_q_;
  std::vector<double> asym_;    // epsilon0 + xi
  std::vector<double> gain_;
  std::vector<double> delta0_sq_;
  std::vector<double> numer_;   // 2 g² Δ0² γ2
  std::vector<double> gamma_sq_;
};

}  // namespace tlsctl
