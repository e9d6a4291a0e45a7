#pragma once

// Internal unit conventions:
//   time           µs (wall clock in s)
//   frequency      GHz
//   rates          rad/µs for couplings and linewidths, µs⁻¹ for decay rates
//   temperature    mK
//   voltage        V
// User-facing config takes couplings in kHz and linewidths in MHz; conversion
// happens once, at the boundary, through the helpers below.

namespace tlsctl::units {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// 1 GHz of detuning expressed in rad/µs.
inline constexpr double kGhzToRadPerUs = kTwoPi * 1.0e3;

/// Boltzmann constant over Planck constant, GHz per mK.
inline constexpr double kBoltzmannGhzPerMk = 1.380649e-23 / 6.62607015e-34 * 1e-12;

inline constexpr double kUsPerSecond = 1.0e6;
inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kSecondsPerDay = 86400.0;

constexpr double mhz_to_rad_per_us(double mhz) { return kTwoPi * mhz; }
constexpr double khz_to_rad_per_us(double khz) { return kTwoPi * 1.0e-3 * khz; }
constexpr double rad_per_us_to_mhz(double w) { return w / kTwoPi; }
constexpr double rad_per_us_to_khz(double w) { return w / (kTwoPi * 1.0e-3); }

}  // namespace tlsctl::units
