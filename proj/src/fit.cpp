#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "tlsctl/measurement.hpp"

namespace tlsctl {
namespace {

constexpr int kMaxParams = 3;
using Vec = std::array<double, kMaxParams>;
using Mat = std::array<double, kMaxParams * kMaxParams>;

// Solves m·x = b for an n×n system by Gaussian elimination with partial
// pivoting. Returns false on a (numerically) singular matrix.
bool solve(Mat m, Vec b, int n, Vec& x) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(m[r * n + col]) > std::abs(m[pivot * n + col])) pivot = r;
    }
    if (!(std::abs(m[pivot * n + col]) > 0.0)) return false;
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(m[col * n + c], m[pivot * n + c]);
      std::swap(b[col], b[pivot]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = m[r * n + col] / m[col * n + col];
      for (int c = col; c < n; ++c) m[r * n + c] -= f * m[col * n + c];
      b[r] -= f * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= m[r * n + c] * x[c];
    x[r] = s / m[r * n + r];
    if (!std::isfinite(x[r])) return false;
  }
  return true;
}

// Parameters are (A, ln T1, B); B is dropped when the offset is fixed.
struct Problem {
  const P1Curve& curve;
  bool fit_offset;
  Vec lo, hi;
  std::vector<double> weights;

  int n_params() const { return fit_offset ? 3 : 2; }

  double model(const Vec& p, double t) const {
    return p[0] * std::exp(-t * std::exp(-p[1])) + (fit_offset ? p[2] : 0.0);
  }

  void clamp(Vec& p) const {
    for (int i = 0; i < n_params(); ++i) p[i] = std::clamp(p[i], lo[i], hi[i]);
  }

  void update_weights(const Vec& p) {
    weights.resize(curve.delays_us.size());
    for (std::size_t k = 0; k < weights.size(); ++k) {
      const double n = static_cast<double>(curve.shots[k]);
      const double eps = 0.5 / (n + 1.0);
      const double q = std::clamp(model(p, curve.delays_us[k]), eps, 1.0 - eps);
      weights[k] = n / (q * (1.0 - q));
    }
  }

  double objective(const Vec& p) const {
    double s = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      const double r = curve.p1[k] - model(p, curve.delays_us[k]);
      s += weights[k] * r * r;
    }
    return s;
  }

  // Normal equations JᵀWJ and JᵀWr at p.
  void normal_equations(const Vec& p, Mat& jtj, Vec& jtr) const {
    const int np = n_params();
    jtj.fill(0.0);
    jtr.fill(0.0);
    const double rate = std::exp(-p[1]);
    for (std::size_t k = 0; k < weights.size(); ++k) {
      const double t = curve.delays_us[k];
      const double e = std::exp(-t * rate);
      const Vec grad = {e, p[0] * e * t * rate, 1.0};
      const double r = curve.p1[k] - model(p, t);
      for (int i = 0; i < np; ++i) {
        jtr[i] += weights[k] * grad[i] * r;
        for (int j = 0; j < np; ++j) jtj[i * np + j] += weights[k] * grad[i] * grad[j];
      }
    }
  }
};

enum class LmStatus { converged, stalled, iteration_cap };

LmStatus levenberg_marquardt(const Problem& prob, Vec& p, int max_iter, int& iterations) {
  const int np = prob.n_params();
  double lambda = 1e-3;
  double obj = prob.objective(p);
  for (int it = 0; it < max_iter; ++it, ++iterations) {
    Mat jtj;
    Vec jtr;
    prob.normal_equations(p, jtj, jtr);
    Mat damped = jtj;
    for (int i = 0; i < np; ++i) damped[i * np + i] += lambda * std::max(jtj[i * np + i], 1e-300);
    Vec step{};
    if (!solve(damped, jtr, np, step)) {
      lambda *= 10.0;
      if (lambda > 1e16) return LmStatus::stalled;
      continue;
    }
    Vec cand = p;
    for (int i = 0; i < np; ++i) cand[i] += step[i];
    prob.clamp(cand);
    const double cand_obj = prob.objective(cand);
    double change = 0.0;
    for (int i = 0; i < np; ++i) change = std::max(change, std::abs(cand[i] - p[i]));
    if (cand_obj <= obj) {
      const bool tiny = change < 1e-12 || obj - cand_obj <= 1e-15 * obj;
      p = cand;
      obj = cand_obj;
      lambda = std::max(lambda / 10.0, 1e-12);
      if (tiny) return LmStatus::converged;
    } else {
      lambda *= 10.0;
      if (lambda > 1e16) return LmStatus::stalled;
    }
  }
  return LmStatus::iteration_cap;
}

double initial_t1(const P1Curve& c, double amp, double offset) {
  const double t0 = c.delays_us.front();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t k = 0; k < c.delays_us.size() && c.delays_us[k] <= 10.0 * t0; ++k) {
    const double frac = (c.p1[k] - offset) / amp;
    if (!(frac > 0.0)) continue;
    const double t = c.delays_us[k];
    const double y = std::log(frac);
    sx += t, sy += y, sxx += t * t, sxy += t * y;
    ++m;
  }
  if (m >= 2) {
    const double denom = m * sxx - sx * sx;
    if (denom > 0.0) {
      const double slope = (m * sxy - sx * sy) / denom;
      if (slope < 0.0) return -1.0 / slope;
    }
  }
  for (std::size_t k = 0; k < c.delays_us.size(); ++k) {
    if (c.p1[k] - offset < amp / std::exp(1.0)) return c.delays_us[k];
  }
  return c.delays_us.back();
}

}  // namespace

T1Fit fit_exponential(const P1Curve& curve, const FitOptions& options) {
  curve.validate();
  if (curve.delays_us.size() < 4) throw std::invalid_argument("fit_exponential: need at least 4 points");

  const double t_min = *std::min_element(curve.delays_us.begin(), curve.delays_us.end());
  const double t_max = *std::max_element(curve.delays_us.begin(), curve.delays_us.end());
  T1Fit out;
  const double amp0 = curve.p1.front() - curve.p1.back();
  const double off0 = options.fit_offset ? curve.p1.back() : 0.0;
  out.amplitude = amp0;
  out.offset = off0;
  if (!(amp0 > 0.0)) return out;  // no decay to fit

  Problem prob{curve, options.fit_offset, {}, {}, {}};
  prob.lo = {1e-9, std::log(t_min / 10.0), -0.1};
  prob.hi = {1.2, std::log(100.0 * t_max), 0.5};

  Vec p = {amp0, std::log(initial_t1(curve, amp0, off0)), off0};
  prob.clamp(p);

  int iterations = 0;
  bool capped = false;
  // Reweighting passes: weights follow the current model prediction.
  for (int pass = 0; pass < 8; ++pass) {
    prob.update_weights(p);
    const Vec before = p;
    const LmStatus status = levenberg_marquardt(prob, p, options.max_iterations, iterations);
    if (status == LmStatus::iteration_cap) {
      capped = true;
      break;
    }
    double change = 0.0;
    for (int i = 0; i < prob.n_params(); ++i) change = std::max(change, std::abs(p[i] - before[i]));
    if (change < 1e-10) break;
  }
  out.iterations = iterations;
  out.amplitude = p[0];
  out.offset = options.fit_offset ? p[2] : 0.0;

  double ss = 0.0;
  for (std::size_t k = 0; k < curve.p1.size(); ++k) {
    const double r = curve.p1[k] - prob.model(p, curve.delays_us[k]);
    ss += r * r;
  }
  out.residual_rms = std::sqrt(ss / static_cast<double>(curve.p1.size()));

  if (capped) return out;
  // Pinned at the long-T1 bound or zero amplitude means the curve never decayed.
  if (p[1] >= prob.hi[1] - 1e-9 || p[0] <= prob.lo[0] * (1.0 + 1e-9)) return out;

  prob.update_weights(p);
  Mat jtj;
  Vec jtr;
  prob.normal_equations(p, jtj, jtr);
  const int np = prob.n_params();
  Vec unit{}, col{};
  unit[1] = 1.0;
  if (!solve(jtj, unit, np, col) || !(col[1] > 0.0)) return out;

  const double t1 = std::exp(p[1]);
  out.t1_us = t1;
  out.t1_stderr_us = t1 * std::sqrt(col[1]);
  out.converged = true;
  return out;
}

}  // namespace tlsctl
