#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tlsctl/records.hpp"

namespace tlsctl {

/// n / Σ(1/x). Rejects empty input and any value ≤ 0.
double harmonic_mean(std::span<const double> values);

/// Element k is the harmonic mean of the first k+1 values.
std::vector<double> cumulative_hmean(std::span<const double> values);

double arithmetic_mean(std::span<const double> values);
/// Sample standard deviation (n − 1 denominator); 0 for a single value.
double sample_std(std::span<const double> values);

/// (σ_FR / σ_AC)².
double n_effective(double sigma_fr_us, double sigma_ac_us);

/// Q = 2π f_q T1 with f_q in GHz and T1 in µs.
double quality_factor(double f_q_ghz, double t1_us);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t n_used = 0;
};

struct FrequencyQ {
  double f_q_ghz = 0.0;
  double q = 0.0;
};

/// Ordinary least squares; `excluded[i]` drops point i. Needs two points
/// with distinct frequencies after exclusion.
LineFit fit_q_vs_frequency(const std::vector<FrequencyQ>& points, const std::vector<bool>& excluded = {});

/// Proportional least squares through the origin: Σxy / Σx².
double fit_sigma_vs_mu(const std::vector<std::pair<double, double>>& mu_sigma);

struct TemperaturePoint {
  double temperature_mk = 0.0;
  double t1_us = 0.0;
};

struct TemperatureFit {
  double gamma0_per_us = 0.0;
  double gap_ghz = 0.0;
  bool converged = false;
  std::size_t n_low = 0;   ///< points that pinned gamma0
  std::size_t n_fit = 0;   ///< points used for the gap
  std::vector<double> model_t1_us;      ///< per input point
  std::vector<double> rate_residual;    ///< Γ_obs − Γ_model, µs⁻¹, per input point
  std::vector<double> relative_residual;  ///< t1_obs / t1_model − 1, per input point
};

struct TemperatureFitOptions {
  double low_cutoff_mk = 40.0;    ///< T below this pins gamma0
  double fit_cutoff_mk = 135.0;   ///< only T at or above this fit the gap
  double gap_lo_ghz = 10.0;
  double gap_hi_ghz = 100.0;
  double rel_tolerance = 1e-4;
};

/// Γ(T) = Γ0 + Γ_qp(T; Δ) with Γ0 from the low-temperature average of T1 and
/// Δ by golden-section least squares in rate space.
TemperatureFit fit_temperature_model(const std::vector<TemperaturePoint>& points, double f_q_ghz,
                                     const TemperatureFitOptions& options = {});

struct KindStats {
  double mean_us = 0.0;
  double hmean_us = 0.0;
  double std_us = 0.0;
  std::size_t count = 0;
  std::size_t excluded_count = 0;
  std::optional<double> min_us;
  std::optional<double> max_us;
};

/// Converged, positive T1 values of one kind in record order.
std::vector<double> usable_t1(const std::vector<T1Record>& records, ControlKind kind);
std::size_t excluded_count(const std::vector<T1Record>& records, ControlKind kind);
KindStats kind_stats(const std::vector<T1Record>& records, ControlKind kind);

struct QubitReport {
  std::string qubit_id;
  std::optional<double> f_q_ghz;
  std::map<std::string, KindStats> per_kind;
  std::optional<double> n_eff;
  std::map<std::string, double> q;  ///< keys like "ac_hmean", "fast_random_max"
  std::map<std::string, double> convergence;  ///< ratios of final h-means to the AC mean
  std::optional<TemperatureFit> temperature_fit;  ///< AC records spanning the fit windows
};

struct AnalysisReport {
  std::string config_hash;
  std::vector<QubitReport> qubits;
  std::optional<LineFit> q_vs_f_ac;
  std::optional<LineFit> q_vs_f_fast_random_max;
  std::optional<double> sigma_mu_slope_no_control;
  std::optional<double> sigma_mu_slope_fast_random;
  std::optional<double> sigma_mu_slope_ac;
};

struct AnalysisOptions {
  std::map<std::string, double> f_q_ghz;  ///< per qubit id
  std::vector<std::string> excluded_from_q_fit;
};

AnalysisReport analyze_records(const std::vector<T1Record>& records, const AnalysisOptions& options);

nlohmann::ordered_json report_to_json(const AnalysisReport& report);

/// Writes the report document and one CSV per figure analog into `dir`.
void write_report_files(const AnalysisReport& report, const std::vector<T1Record>& records,
                        const std::string& dir);

}  // namespace tlsctl
