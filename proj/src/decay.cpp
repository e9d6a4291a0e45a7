#include "tlsctl/decay.hpp"

#include <cmath>
#include <stdexcept>

#include "tlsctl/units.hpp"

namespace tlsctl {

void QubitSpec::validate() const {
  if (!(f_q_ghz > 0.0)) throw std::invalid_argument("qubit.f_q_ghz: must be > 0");
  if (!(gamma0_per_us >= 0.0)) throw std::invalid_argument("qubit.gamma0_per_us: must be >= 0");
  if (!(gap_ghz > 0.0)) throw std::invalid_argument("qubit.gap_ghz: must be > 0");
  if (!(read_err_e >= 0.0 && read_err_e < 0.5)) {
    throw std::invalid_argument("qubit.read_err_e: must lie in [0, 0.5)");
  }
  if (!(read_err_g >= 0.0 && read_err_g < 0.5)) {
    throw std::invalid_argument("qubit.read_err_g: must lie in [0, 0.5)");
  }
}

void TriangleWave::validate() const {
  if (!(f_ac_hz > 0.0)) throw std::invalid_argument("triangle: f_ac_hz must be > 0");
  if (!(vpp >= 0.0)) throw std::invalid_argument("triangle: vpp must be >= 0");
}

double waveform_voltage(const WaveformSpec& w, double t_s, double phase) {
  if (std::holds_alternative<ZeroWave>(w)) return 0.0;
  if (const auto* dc = std::get_if<DcWave>(&w)) return dc->volts;
  const auto& tri = std::get<TriangleWave>(w);
  double u = t_s * tri.f_ac_hz + phase;
  u -= std::floor(u);
  const double amp = 0.5 * tri.vpp;
  if (u < 0.25) return 4.0 * u * amp;
  if (u < 0.75) return (2.0 - 4.0 * u) * amp;
  return (4.0 * u - 4.0) * amp;
}

double gamma_tls(const QubitSpec& q, const BathState& bath, double bias_v) {
  double total = 0.0;
  for (std::size_t i = 0; i < bath.defects.size(); ++i) {
    const TlsDefect& d = bath.defects[i];
    const double splitting = tls_splitting(d, bias_v, bath.xi[i]);
    const double g = transverse_coupling(d, splitting);
    const double detuning = units::kGhzToRadPerUs * (q.f_q_ghz - splitting);
    total += 2.0 * g * g * d.gamma2 / (d.gamma2 * d.gamma2 + detuning * detuning);
  }
  return total;
}

double gamma_qp(double temperature_mk, double f_q_ghz, double gap_ghz) {
  if (!(temperature_mk >= 0.0)) throw std::invalid_argument("gamma_qp: temperature must be >= 0");
  if (temperature_mk == 0.0) return 0.0;
  const double kt = units::kBoltzmannGhzPerMk * temperature_mk;
  const double x_qp = std::sqrt(units::kTwoPi * kt / gap_ghz) * std::exp(-gap_ghz / kt);
  // ω_q/π = 2 f_q; GHz → µs⁻¹ is ×10³.
  return x_qp * 2.0e3 * f_q_ghz * std::sqrt(2.0 * gap_ghz / f_q_ghz);
}

double lz_crossing_probability(double g_eff, double sweep_rate) {
  if (!(sweep_rate > 0.0)) throw std::invalid_argument("lz_crossing_probability: sweep rate must be > 0");
  if (!(g_eff >= 0.0)) throw std::invalid_argument("lz_crossing_probability: g_eff must be >= 0");
  return -std::expm1(-units::kTwoPi * g_eff * g_eff / sweep_rate);
}

double gamma_lz(const QubitSpec& q, const BathState& bath, const TriangleWave& w) {
  w.validate();
  if (w.vpp == 0.0) return 0.0;
  const double half = 0.5 * w.vpp;
  // Each bias root is traversed twice per period.
  const double crossings_per_us = 2.0 * w.f_ac_hz / units::kUsPerSecond;
  const double slope_v_per_us = w.slope_v_per_s() / units::kUsPerSecond;
  double total = 0.0;
  for (std::size_t i = 0; i < bath.defects.size(); ++i) {
    const TlsDefect& d = bath.defects[i];
    if (d.dipole_gain == 0.0 || d.delta0 >= q.f_q_ghz) continue;
    const double asym = d.epsilon0 + bath.xi[i];
    const double s = std::sqrt(q.f_q_ghz * q.f_q_ghz - d.delta0 * d.delta0);
    const double g_cross = d.g_bare * d.delta0 / q.f_q_ghz;
    const double de_dv = std::abs(d.dipole_gain) * s / q.f_q_ghz;  // GHz/V at the crossing
    const double sweep_rate = de_dv * units::kGhzToRadPerUs * slope_v_per_us;
    const double p = lz_crossing_probability(g_cross, sweep_rate);
    for (const double target : {s, -s}) {
      const double root = (target - asym) / d.dipole_gain;
      if (root >= -half && root <= half) total += crossings_per_us * p;
    }
  }
  return total;
}

double gamma_total(const QubitSpec& q, const BathState& bath, double bias_v,
                   double temperature_mk, const std::optional<TriangleWave>& sweep) {
  double total = q.gamma0_per_us + gamma_tls(q, bath, bias_v) + gamma_qp(temperature_mk, q);
  if (sweep) total += gamma_lz(q, bath, *sweep);
  return total;
}

SurvivalAverage gaussian_average_survival(double mu, double sigma, double t_us) {
  if (!(mu > 0.0)) throw std::invalid_argument("gaussian_average_survival: mu must be > 0");
  if (!(sigma >= 0.0)) throw std::invalid_argument("gaussian_average_survival: sigma must be >= 0");
  if (!(t_us >= 0.0)) throw std::invalid_argument("gaussian_average_survival: t must be >= 0");
  SurvivalAverage out;
  out.value = std::exp(-mu * t_us + 0.5 * sigma * sigma * t_us * t_us);
  out.valid = sigma == 0.0 || t_us < 2.0 * mu / (sigma * sigma);
  return out;
}

TlsRateEvaluator::TlsRateEvaluator(const QubitSpec& q, const BathState& bath) : f_q_(q.f_q_ghz) {
  const std::size_t n = bath.defects.size();
  asym_.resize(n);
  gain_.resize(n);
  delta0_sq_.resize(n);
  numer_.resize(n);
  gamma_sq_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const TlsDefect& d = bath.defects[i];
    asym_[i] = d.epsilon0 + bath.xi[i];
    gain_[i] = d.dipole_gain;
    delta0_sq_[i] = d.delta0 * d.delta0;
    numer_[i] = 2.0 * d.g_bare * d.g_bare * delta0_sq_[i] * d.gamma2;
    gamma_sq_[i] = d.gamma2 * d.gamma2;
  }
}

double TlsRateEvaluator::operator()(double bias_v) const {
  const std::size_t n = asym_.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = asym_[i] + gain_[i] * bias_v;
    const double e_sq = x * x + delta0_sq_[i];
    const double detuning = units::kGhzToRadPerUs * (f_q_ - std::sqrt(e_sq));
    total += numer_[i] / (e_sq * (gamma_sq_[i] + detuning * detuning));
  }
  return total;
}

}  // namespace tlsctl
