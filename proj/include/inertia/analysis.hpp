#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "inertia/dynamics.hpp"
#include "inertia/objective.hpp"

namespace inertia {

using Series = std::vector<std::pair<double, double>>;  // (t, value), sorted in t

enum class FitMode { pointwise, windowed_max };

struct RateFit {
  double exponent = 0.0;   // slope of log f vs log t
  double intercept = 0.0;  // in log f
  double t_lo = 0.0, t_hi = 0.0;
  double residual_rms = 0.0;
  FitMode mode = FitMode::pointwise;
};

/// Last window [t_hi/decade_span, t_hi] over which f stays above `floor`,
/// for rate fitting on series that hit the floating-point floor.
inline std::pair<double, double> last_positive_decade(const Series& s,
                                                      double floor = 1e-15,
                                                      double decade_span = 10.0) {
  double t_hi = 0.0;
  for (const auto& [t, f] : s)
    if (f > floor) t_hi = t;
  if (t_hi == 0.0) throw std::invalid_argument("last_positive_decade: no value above floor");
  return {t_hi / decade_span, t_hi};
}

/// Ordinary least squares on (log t, log f) over [t_lo, t_hi]. In
/// windowed_max mode f is first replaced by its maximum over a sliding
/// half-decade window centred at each sample (the oscillation envelope).
inline RateFit fit_rate(const Series& series, double t_lo, double t_hi,
                        FitMode mode = FitMode::pointwise) {
  if (!(t_lo < t_hi)) throw std::invalid_argument("fit_rate: need t_lo < t_hi");
  Series data = series;
  if (mode == FitMode::windowed_max) {
    const double half = std::pow(10.0, 0.25);  // half-decade window
    for (std::size_t i = 0; i < series.size(); ++i) {
      double m = 0.0;
      for (const auto& [t, f] : series)
        if (t >= series[i].first / half && t <= series[i].first * half)
          m = std::max(m, f);
      data[i].second = m;
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& [t, f] : data) {
    if (t < t_lo || t > t_hi) continue;
    if (!(f > 0.0))
      throw std::invalid_argument("fit_rate: non-positive value in window; clamp and shrink window");
    const double x = std::log(t), y = std::log(f);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 20) throw std::invalid_argument("fit_rate: fewer than 20 samples in window");
  RateFit fit;
  fit.mode = mode;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  const double det = n * sxx - sx * sx;
  fit.exponent = (n * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.exponent * sx) / n;
  double ss = 0.0;
  for (const auto& [t, f] : data) {
    if (t < t_lo || t > t_hi) continue;
    const double r = std::log(f) - (fit.intercept + fit.exponent * std::log(t));
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  return fit;
}

struct IntegralDiagnostic {
  double delta = 0.0;
  Series cumulative;           // (t, partial integral of u^delta g(u))
  bool converged = false;      // tail_fraction <= 0.05
  double tail_fraction = 0.0;  // increment over the last factor-of-2 span / total
};

/// Trapezoidal partial integrals of t^delta g(t) with a tail-convergence
/// verdict: the increment over [t_max/2, t_max] must be at most 5% of the
/// total for `converged`.
inline IntegralDiagnostic cumulative_weighted_integral(const Series& series, double delta) {
  if (series.size() < 2)
    throw std::invalid_argument("cumulative_weighted_integral: need at least 2 samples");
  for (std::size_t i = 1; i < series.size(); ++i)
    if (series[i].first <= series[i - 1].first)
      throw std::invalid_argument("cumulative_weighted_integral: series not sorted in t");
  IntegralDiagnostic diag;
  diag.delta = delta;
  diag.cumulative.reserve(series.size());
  double total = 0.0;
  double prev_w = std::pow(series[0].first, delta) * series[0].second;
  diag.cumulative.emplace_back(series[0].first, 0.0);
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double w = std::pow(series[i].first, delta) * series[i].second;
    total += 0.5 * (w + prev_w) * (series[i].first - series[i - 1].first);
    diag.cumulative.emplace_back(series[i].first, total);
    prev_w = w;
  }
  const double t_max = series.back().first;
  double at_half = 0.0;
  for (const auto& [t, v] : diag.cumulative)
    if (t <= 0.5 * t_max) at_half = v;
  diag.tail_fraction = total > 0.0 ? (total - at_half) / total : 0.0;
  diag.converged = diag.tail_fraction <= 0.05;
  return diag;
}

struct AveragedPoint {
  Vec z;
  double f_gap_z = 0.0;
  double mean_f_gap = 0.0;  // same trapezoid weights applied to F - F*
};

/// Weighted trajectory average z(t) = int_{t/2}^t u^delta x(u) du / int u^delta du
/// (trapezoid on the records covering [t/2, t]). mean_f_gap uses identical
/// weights, so F(z) <= mean_f_gap holds by convexity.
inline AveragedPoint averaged_point(const Trajectory& traj, double t, double delta,
                                    const Objective& obj) {
  std::vector<const TrajectoryRecord*> window;
  for (const auto& rec : traj.records)
    if (rec.t >= 0.5 * t && rec.t <= t) window.push_back(&rec);
  if (window.size() < 20)
    throw std::invalid_argument("averaged_point: fewer than 20 samples cover [t/2, t]");
  Vec num = Vec::Zero(obj.dim);
  double den = 0.0, fnum = 0.0;
  for (std::size_t i = 0; i + 1 < window.size(); ++i) {
    const auto &a = *window[i], &b = *window[i + 1];
    const double h = b.t - a.t;
    const double wa = 0.5 * h * std::pow(a.t, delta);
    const double wb = 0.5 * h * std::pow(b.t, delta);
    num += wa * a.x + wb * b.x;
    fnum += wa * a.f_gap + wb * b.f_gap;
    den += wa + wb;
  }
  AveragedPoint out;
  out.z = num / den;
  out.f_gap_z = obj.gap(out.z);
  out.mean_f_gap = fnum / den;
  return out;
}

/// Minimum of f over the samples in [t/2, t].
inline double windowed_inf(const Series& series, double t) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& [u, f] : series)
    if (u >= 0.5 * t && u <= t) m = std::min(m, f);
  if (!std::isfinite(m) && m > 0)
    throw std::invalid_argument("windowed_inf: no samples in [t/2, t]");
  return m;
}

/// Finite-horizon liminf proxy: min over the last decade of
/// t^(delta+1) log(t) f(t). Shrinks as the horizon grows when
/// liminf t^(delta+1) log(t) f(t) = 0.
inline double check_liminf_scaling(const Series& series, double delta) {
  if (series.empty() || series.back().first < 100.0 * series.front().first)
    throw std::invalid_argument("check_liminf_scaling: series must span >= 2 decades");
  const double t_max = series.back().first;
  double m = std::numeric_limits<double>::infinity();
  for (const auto& [t, f] : series)
    if (t >= 0.1 * t_max) m = std::min(m, std::pow(t, delta + 1.0) * std::log(t) * f);
  return m;
}

struct LemmaReport {
  int trials = 0;
  int violations = 0;
  std::string first_failure;
  bool ok() const { return violations == 0; }
};

/// Randomized checks of the scalar/vector inequalities used by the rate
/// proofs:
///   |<u,v>| <= (a/2)|u|^2 + (1/2a)|v|^2
///   |u|^2 <= (1+a)|u+v|^2 + (1+1/a)|v|^2
///   x^d (x^(1-d) - K1) <= K2  =>  x <= (K2^(1-d) + K1)^(1/(1-d))
///   x - K x^d >= K(d-1)(dK)^(d/(1-d)) for x >= 0
inline LemmaReport check_inequality_lemmas(std::uint64_t seed, int trials) {
  if (trials < 1000) throw std::invalid_argument("check_inequality_lemmas: need >= 1000 trials");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> dims(1, 8);
  LemmaReport report;
  report.trials = trials;
  const double tol = 1e-9;  // relative slack for rounding
  auto fail = [&](const std::string& what) {
    ++report.violations;
    if (report.first_failure.empty()) report.first_failure = what;
  };
  for (int trial = 0; trial < trials; ++trial) {
    const int n = dims(rng);
    Vec u(n), v(n);
    for (int i = 0; i < n; ++i) {
      u(i) = gauss(rng) * std::pow(10.0, 3.0 * (unif(rng) - 0.5));
      v(i) = gauss(rng) * std::pow(10.0, 3.0 * (unif(rng) - 0.5));
    }
    const double a = std::pow(10.0, 4.0 * (unif(rng) - 0.5));

    const double lhs1 = std::abs(u.dot(v));
    const double rhs1 = 0.5 * a * u.squaredNorm() + 0.5 / a * v.squaredNorm();
    if (lhs1 > rhs1 * (1.0 + tol)) fail("young inequality violated");

    const double lhs2 = u.squaredNorm();
    const double rhs2 = (1.0 + a) * (u + v).squaredNorm() + (1.0 + 1.0 / a) * v.squaredNorm();
    if (lhs2 > rhs2 * (1.0 + tol)) fail("norm splitting inequality violated");

    const double d = 0.05 + 0.9 * unif(rng);
    const double k1 = std::pow(10.0, 2.0 * (unif(rng) - 0.5));
    const double k2 = std::pow(10.0, 2.0 * (unif(rng) - 0.5));
    const double x = std::pow(10.0, 3.0 * (unif(rng) - 0.5));
    if (std::pow(x, d) * (std::pow(x, 1.0 - d) - k1) <= k2) {
      const double bound = std::pow(std::pow(k2, 1.0 - d) + k1, 1.0 / (1.0 - d));
      if (x > bound * (1.0 + tol)) fail("implication bound violated");
    }

    const double kk = std::pow(10.0, 2.0 * (unif(rng) - 0.5));
    const double gmin = kk * (d - 1.0) * std::pow(d * kk, d / (1.0 - d));
    const double gx = x - kk * std::pow(x, d);
    if (gx < gmin - tol * (1.0 + std::abs(gmin))) fail("power-minimum bound violated");
  }
  return report;
}

}  // namespace inertia
