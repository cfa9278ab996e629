#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "inertia/objective.hpp"

namespace inertia {

/// Parameters of the discrete schemes. The convergence-guarantee region is
/// alpha >= 3, s <= 1/L, beta in [0, 2 sqrt s); runs outside it are allowed
/// and flagged on the log.
struct SchemeConfig {
  double alpha = 3.0;
  double beta = 0.0;
  double s = 0.1;
  int max_iter = 1000;
  Vec x0;

  void validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("SchemeConfig: alpha must be positive");
    if (beta < 0.0) throw std::invalid_argument("SchemeConfig: beta must be non-negative");
    if (!(s > 0.0)) throw std::invalid_argument("SchemeConfig: s must be positive");
    if (max_iter <= 0) throw std::invalid_argument("SchemeConfig: max_iter must be positive");
    if (x0.size() == 0) throw std::invalid_argument("SchemeConfig: x0 is empty");
  }
};

inline bool within_guarantee(const SchemeConfig& cfg, const Objective& obj) {
  if (!obj.lipschitz_grad) return false;
  return cfg.alpha >= 3.0 && cfg.s <= 1.0 / *obj.lipschitz_grad &&
         cfg.beta < 2.0 * std::sqrt(cfg.s);
}

struct IterateRecord {
  int k;
  Vec x;
  double f_gap;
  double grad_norm;
};

struct IterateLog {
  SchemeConfig cfg;
  std::string objective_name;
  bool guarantee = false;  // convergence-guarantee hypotheses satisfied
  bool diverged = false;   // non-finite iterate or f_gap > 1e12; log truncated
  std::vector<IterateRecord> records;
};

namespace detail {

inline bool record_iterate(IterateLog& log, int k, const Vec& x, const Objective& obj) {
  const double f_gap = obj.gap(x);
  if (!x.allFinite() || !std::isfinite(f_gap) || f_gap > 1e12) {
    log.diverged = true;
    return false;
  }
  log.records.push_back({k, x, f_gap, obj.grad(x).norm()});
  return true;
}

}  // namespace detail

/// Inertial gradient algorithm with the Hessian term replaced by gradient
/// differences:
///   x_k = y_{k-1} - s grad F(y_{k-1})
///   y_k = x_k + a_k (x_k - x_{k-1}) - beta sqrt(s) (grad F(x_k) - grad F(x_{k-1}))
///         - (beta sqrt(s) / k) grad F(x_{k-1}),   a_k = (k-1)/(k+alpha-1).
/// Seeding: x_0 = x_{-1} = y_0 = x0, so a_1 = 0 and the first step is a plain
/// gradient step. beta = 0 is exactly Nesterov's accelerated gradient method.
inline IterateLog igahd_run(const SchemeConfig& cfg, const Objective& obj) {
  cfg.validate();
  if (cfg.x0.size() != obj.dim)
    throw std::invalid_argument("igahd_run: x0 dimension does not match objective");
  IterateLog log;
  log.cfg = cfg;
  log.objective_name = obj.name;
  log.guarantee = within_guarantee(cfg, obj);
  log.records.reserve(cfg.max_iter);

  const double bs = cfg.beta * std::sqrt(cfg.s);
  Vec x_prev = cfg.x0;
  Vec g_prev = obj.grad(x_prev);
  Vec y = cfg.x0;
  for (int k = 1; k <= cfg.max_iter; ++k) {
    const Vec x = y - cfg.s * obj.grad(y);
    if (!detail::record_iterate(log, k, x, obj)) break;
    const Vec g = obj.grad(x);
    const double a_k = (k - 1.0) / (k + cfg.alpha - 1.0);
    y = x + a_k * (x - x_prev) - bs * (g - g_prev) - (bs / k) * g_prev;
    x_prev = x;
    g_prev = g;
  }
  return log;
}

/// Plain gradient descent baseline x_{k+1} = x_k - s grad F(x_k).
inline IterateLog gradient_descent_run(double s, int max_iter, const Vec& x0,
                                       const Objective& obj) {
  SchemeConfig cfg;
  cfg.alpha = 3.0;
  cfg.beta = 0.0;
  cfg.s = s;
  cfg.max_iter = max_iter;
  cfg.x0 = x0;
  cfg.validate();
  IterateLog log;
  log.cfg = cfg;
  log.objective_name = obj.name;
  log.guarantee = obj.lipschitz_grad && s <= 1.0 / *obj.lipschitz_grad;
  Vec x = x0;
  for (int k = 1; k <= max_iter; ++k) {
    x = x - s * obj.grad(x);
    if (!detail::record_iterate(log, k, x, obj)) break;
  }
  return log;
}

struct OscillationMetric {
  int local_max_count = 0;
  double total_variation = 0.0;
};

/// Strict local maxima and total variation of k -> f_gap_k for k >= from_iter.
inline OscillationMetric oscillation_metric(const IterateLog& log, int from_iter) {
  if (static_cast<int>(log.records.size()) <= from_iter + 10)
    throw std::invalid_argument("oscillation_metric: log too short");
  OscillationMetric m;
  const auto& r = log.records;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i].k < from_iter) continue;
    if (i > 0 && r[i].k - 1 == r[i - 1].k)
      m.total_variation += std::abs(r[i].f_gap - r[i - 1].f_gap);
    if (i > 0 && i + 1 < r.size() && r[i].f_gap > r[i - 1].f_gap &&
        r[i].f_gap > r[i + 1].f_gap)
      ++m.local_max_count;
  }
  return m;
}

/// CSV export: `k,f_gap,grad_norm`, 17 significant digits.
inline void write_iterates_csv(std::ostream& os, const IterateLog& log) {
  os << "k,f_gap,grad_norm\n";
  char buf[64];
  for (const auto& rec : log.records) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", rec.k, rec.f_gap, rec.grad_norm);
    os << buf;
  }
}

}  // namespace inertia
