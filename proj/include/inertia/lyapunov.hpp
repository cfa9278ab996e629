#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "inertia/dynamics.hpp"
#include "inertia/objective.hpp"

namespace inertia {

struct BoundNotApplicable : std::domain_error {
  using std::domain_error::domain_error;
};

/// poly(r) = r^3 - (1+c0) r^2 - 2(1+sqrt 2) r - 4.
inline double r_star_poly(double r, double c0) {
  return ((r - (1.0 + c0)) * r - 2.0 * (1.0 + std::sqrt(2.0))) * r - 4.0;
}

/// Unique positive root of r_star_poly. poly(0) = -4 < 0 and the cubic is
/// increasing past its largest critical point, so a sign change brackets the
/// root; bisection to 1e-14 interval width, then one Newton polish.
inline double solve_r_star(double c0) {
  if (c0 < 0.0) throw std::invalid_argument("solve_r_star: c0 must be non-negative");
  double lo = 0.0;
  double hi = std::max(10.0, 2.0 * (1.0 + c0) + 10.0);
  while (r_star_poly(hi, c0) <= 0.0) hi *= 2.0;
  while (hi - lo > 1e-14 * hi) {
    const double mid = 0.5 * (lo + hi);
    (r_star_poly(mid, c0) < 0.0 ? lo : hi) = mid;
  }
  double r = 0.5 * (lo + hi);
  const double dp = (3.0 * r - 2.0 * (1.0 + c0)) * r - 2.0 * (1.0 + std::sqrt(2.0));
  if (dp != 0.0) r -= r_star_poly(r, c0) / dp;
  return r;
}

/// Closed-form constants for the sharp-geometry regime (growth exponent 2,
/// flatness exponent gamma). For alpha == 1 + 2/gamma the c0-dependent fields
/// are undefined (NaN); only the critical-case bound applies there.
struct SharpConstants {
  double gamma = 2.0;
  double alpha = 3.0;
  double beta = 0.0;
  double mu = 1.0;

  double lambda = 0.0;   // 2 alpha / (gamma + 2)
  double k_alpha = 0.0;  // (2 alpha gamma / (gamma+2)^2)(alpha - 1 - 2/gamma)
  double c0 = 0.0;       // beta sqrt(mu) gamma (gamma lambda - 1)/(gamma lambda - 2)
  double r_star = 0.0;
  double c1 = 0.0;  // (1 + 2/r*)^2
  double c2 = 0.0;  // (1+c0)/r* + (1+sqrt2)/r*^2 + 4/(3 r*^3)
  double t1 = 0.0;  // alpha r* / ((gamma+2) sqrt(mu)) + beta (alpha - lambda)

  bool critical() const { return std::abs(alpha - (1.0 + 2.0 / gamma)) <= 1e-12; }
  double rate_exponent() const { return gamma * lambda; }  // 2 alpha gamma / (gamma+2)

  static SharpConstants make(double gamma, double alpha, double beta, double mu) {
    if (gamma < 1.0) throw std::invalid_argument("SharpConstants: gamma must be >= 1");
    if (!(mu > 0.0)) throw std::invalid_argument("SharpConstants: mu must be positive");
    if (beta < 0.0) throw std::invalid_argument("SharpConstants: beta must be non-negative");
    SharpConstants c;
    c.gamma = gamma;
    c.alpha = alpha;
    c.beta = beta;
    c.mu = mu;
    c.lambda = 2.0 * alpha / (gamma + 2.0);
    c.k_alpha = 2.0 * alpha * gamma / ((gamma + 2.0) * (gamma + 2.0)) *
                (alpha - 1.0 - 2.0 / gamma);
    const double gl = gamma * c.lambda;
    if (c.critical()) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      c.c0 = c.r_star = c.c1 = c.c2 = c.t1 = nan;
    } else {
      c.c0 = beta * std::sqrt(mu) * gamma * (gl - 1.0) / (gl - 2.0);
      c.r_star = solve_r_star(c.c0);
      c.c1 = (1.0 + 2.0 / c.r_star) * (1.0 + 2.0 / c.r_star);
      c.c2 = (1.0 + c.c0) / c.r_star + (1.0 + std::sqrt(2.0)) / (c.r_star * c.r_star) +
             4.0 / (3.0 * c.r_star * c.r_star * c.r_star);
      c.t1 = alpha * c.r_star / ((gamma + 2.0) * std::sqrt(mu)) +
             beta * (alpha - c.lambda);
    }
    return c;
  }
};

/// The rate function phi~(t), the right-hand-side weight of the energy
/// differential inequality.
inline double phi_rate(double t, const SharpConstants& c) {
  if (!(t > 0.0)) throw std::domain_error("phi_rate: t must be positive");
  if (c.k_alpha == 0.0) return 0.0;  // critical case: zero prefactor (c0 undefined)
  const double g2 = c.gamma + 2.0, sm = std::sqrt(c.mu);
  return c.k_alpha / (c.mu * t * t) *
         (sm * (1.0 + c.c0) + 2.0 * c.alpha / (g2 * t) * (1.0 + std::sqrt(2.0)) +
          4.0 * c.alpha * c.alpha / (g2 * g2 * sm * t * t));
}

/// Primitive Phi~(t) = -int_t^inf phi~; non-positive, Phi~ -> 0 as t -> inf.
inline double phi_primitive(double t, const SharpConstants& c) {
  if (!(t > 0.0)) throw std::domain_error("phi_primitive: t must be positive");
  if (c.k_alpha == 0.0) return 0.0;  // critical case: zero prefactor (c0 undefined)
  const double g2 = c.gamma + 2.0, sm = std::sqrt(c.mu);
  return -c.k_alpha / c.mu *
         (sm * (1.0 + c.c0) / t + c.alpha * (1.0 + std::sqrt(2.0)) / (g2 * t * t) +
          4.0 * c.alpha * c.alpha / (3.0 * g2 * g2 * sm * t * t * t));
}

/// E(t) = (t^2 + t beta (lambda - alpha))(F - F*)
///        + |lambda (x - x*) + t y|^2 / 2, with y = x' + beta grad F.
inline double energy_sharp(const DynState& s, const Objective& obj,
                           const SharpConstants& c) {
  const double shift = c.beta * (c.lambda - c.alpha);
  return (s.t * s.t + s.t * shift) * obj.gap(s.x) +
         0.5 * (c.lambda * (s.x - obj.x_star) + s.t * s.y).squaredNorm();
}

/// H(t) = E(t) (t + beta(lambda - alpha))^(gamma lambda - 2)
///             exp(-Phi~(t + beta(lambda - alpha))); non-increasing past
/// max(t0, beta(alpha - lambda)) when alpha > 1 + 2/gamma.
inline double energy_H_sharp(const DynState& s, const Objective& obj,
                             const SharpConstants& c) {
  const double u = s.t + c.beta * (c.lambda - c.alpha);
  if (!(u > 0.0)) throw std::domain_error("energy_H_sharp: t <= beta (alpha - lambda)");
  return energy_sharp(s, obj, c) * std::pow(u, c.gamma * c.lambda - 2.0) *
         std::exp(-phi_primitive(u, c));
}

/// Both published forms of the multiplicative factor in the closed-form K;
/// they coincide algebraically since lambda = 2 alpha / (gamma + 2).
inline double sharp_K_factor_compact(const SharpConstants& c) {
  return 1.0 + c.beta * c.gamma * std::sqrt(c.mu) / c.r_star;
}
inline double sharp_K_factor_expanded(const SharpConstants& c) {
  return 1.0 +
         c.beta * (c.alpha - c.lambda) * (c.gamma + 2.0) * std::sqrt(c.mu) /
             (c.alpha * c.r_star);
}

/// K = C1 exp((2 gamma/(gamma+2)) C2 (alpha - 1 - 2/gamma)) factor E_m(t0)
///     (alpha r* / ((gamma+2) sqrt mu))^(2 alpha gamma/(gamma+2)).
inline double sharp_K_closed_form(const SharpConstants& c, double e_m_t0) {
  const double expo = 2.0 * c.gamma / (c.gamma + 2.0) * c.c2 *
                      (c.alpha - 1.0 - 2.0 / c.gamma);
  const double base = c.alpha * c.r_star / ((c.gamma + 2.0) * std::sqrt(c.mu));
  return c.c1 * std::exp(expo) * sharp_K_factor_compact(c) * e_m_t0 *
         std::pow(base, c.rate_exponent());
}

/// Non-asymptotic bound F(x(t)) - F* <= K / (t + beta(lambda - alpha))^(gamma lambda)
/// with the closed-form K; valid for t >= t1 and t0 <= alpha r*/((gamma+2) sqrt mu).
inline double bound_sharp_general(double t, const SharpConstants& c, double e_m_t0,
                                  double t0) {
  if (c.critical() || !(c.alpha > 1.0 + 2.0 / c.gamma))
    throw BoundNotApplicable("bound_sharp_general: needs alpha > 1 + 2/gamma");
  const double t1_free = c.alpha * c.r_star / ((c.gamma + 2.0) * std::sqrt(c.mu));
  if (t0 > t1_free)
    throw BoundNotApplicable("bound_sharp_general: needs t0 <= alpha r*/((gamma+2) sqrt mu)");
  if (t < c.t1) throw BoundNotApplicable("bound_sharp_general: needs t >= t1");
  const double u = t + c.beta * (c.lambda - c.alpha);
  return sharp_K_closed_form(c, e_m_t0) / std::pow(u, c.rate_exponent());
}

/// Abstract variant of the same bound, using a directly evaluated H(t_ref)
/// instead of the closed-form K: F - F* <= H(t_ref)/(t + beta(lambda-alpha))^(gamma lambda)
/// for t >= t_ref > max(t0, beta(alpha - lambda)).
inline double bound_sharp_from_H(double t, const SharpConstants& c, double h_at_t_ref) {
  const double u = t + c.beta * (c.lambda - c.alpha);
  if (!(u > 0.0)) throw BoundNotApplicable("bound_sharp_from_H: t too small");
  return h_at_t_ref / std::pow(u, c.rate_exponent());
}

/// Critical case alpha = 1 + 2/gamma:
/// F - F* <= ((t0+beta)^2 + (lambda^2 + sqrt mu)/mu) e^(beta/t0) E_m(t0)/(t(t-beta)).
inline double bound_sharp_critical(double t, const SharpConstants& c, double e_m_t0,
                                   double t0) {
  if (!c.critical())
    throw BoundNotApplicable("bound_sharp_critical: needs alpha = 1 + 2/gamma");
  if (t < t0 + c.beta) throw BoundNotApplicable("bound_sharp_critical: needs t >= t0 + beta");
  const double pre = (t0 + c.beta) * (t0 + c.beta) +
                     (c.lambda * c.lambda + std::sqrt(c.mu)) / c.mu;
  return pre * std::exp(c.beta / t0) * e_m_t0 / (t * (t - c.beta));
}

/// H(t) sampled along a trajectory for t past max(t0, beta(alpha - lambda)).
inline std::vector<std::pair<double, double>> series_H_sharp(const Trajectory& traj,
                                                             const Objective& obj,
                                                             const SharpConstants& c) {
  std::vector<std::pair<double, double>> out;
  const double tmin = std::max(traj.spec.t0, c.beta * (c.alpha - c.lambda));
  for (const auto& rec : traj.records) {
    if (rec.t <= tmin) continue;
    DynState s{rec.t, rec.x, rec.y};
    out.emplace_back(rec.t, energy_H_sharp(s, obj, c));
  }
  return out;
}

/// G(t) = H(t) + beta int u (u + beta(lambda-alpha))^(gamma lambda - 1)
///        e^(-Phi~) |grad F|^2 du, trapezoid on the sampled records.
inline std::vector<std::pair<double, double>> series_G_sharp(const Trajectory& traj,
                                                             const Objective& obj,
                                                             const SharpConstants& c) {
  std::vector<std::pair<double, double>> out;
  const double tmin = std::max(traj.spec.t0, c.beta * (c.alpha - c.lambda));
  double integral = 0.0, prev_t = 0.0, prev_w = 0.0;
  bool first = true;
  for (const auto& rec : traj.records) {
    if (rec.t <= tmin) continue;
    const double u = rec.t + c.beta * (c.lambda - c.alpha);
    const double w = rec.t * std::pow(u, c.gamma * c.lambda - 1.0) *
                     std::exp(-phi_primitive(u, c)) * rec.grad_norm * rec.grad_norm;
    if (!first) integral += 0.5 * (w + prev_w) * (rec.t - prev_t);
    DynState s{rec.t, rec.x, rec.y};
    out.emplace_back(rec.t, energy_H_sharp(s, obj, c) + c.beta * integral);
    prev_t = rec.t;
    prev_w = w;
    first = false;
  }
  return out;
}

/// Constants for the flat-geometry regime (gamma1 >= gamma2 > 2).
struct FlatConstants {
  double gamma1 = 4.0;
  double gamma2 = 4.0;
  double alpha = 3.0;
  double beta = 0.0;
  double mu = 1.0;

  double p = 0.0;        // 4 / (gamma1 - 2)
  double lambda = 0.0;   // 2 / (gamma1 - 2)
  double xi = 0.0;       // lambda (lambda + 1 - alpha)
  double c1_flat = 0.0;  // (p+1)(lambda-alpha) - lambda gamma1 (2(lambda-alpha)+1)
  double k_growth = 0.0; // mu / 2
  double t_m = 0.0;      // smallest t > beta(alpha-lambda) with
                         // beta c1_flat t^p/(t+beta(lambda-alpha))^(p+1) <= 1/2

  double rate_exponent() const { return 2.0 * gamma1 / (gamma1 - 2.0); }  // p + 2

  /// C2 of the flat analysis, which depends on the reference time t1.
  double c2_at(double t1) const {
    const double shift = beta * (lambda - alpha);
    return -std::pow(t1, p - 2.0 / gamma2) /
           std::pow(t1 + shift, 2.0 * (p + 1.0) / gamma2) * xi /
           (2.0 * std::pow(k_growth, 2.0 / gamma2));
  }

  static FlatConstants make(double gamma1, double gamma2, double alpha, double beta,
                            double mu) {
    if (!(gamma1 > 2.0) || !(gamma2 > 2.0) || gamma1 < gamma2)
      throw std::invalid_argument("FlatConstants: need gamma1 >= gamma2 > 2");
    if (!(mu > 0.0)) throw std::invalid_argument("FlatConstants: mu must be positive");
    FlatConstants c;
    c.gamma1 = gamma1;
    c.gamma2 = gamma2;
    c.alpha = alpha;
    c.beta = beta;
    c.mu = mu;
    c.p = 4.0 / (gamma1 - 2.0);
    c.lambda = 2.0 / (gamma1 - 2.0);
    c.xi = c.lambda * (c.lambda + 1.0 - alpha);
    c.c1_flat = (c.p + 1.0) * (c.lambda - alpha) -
                c.lambda * gamma1 * (2.0 * (c.lambda - alpha) + 1.0);
    c.k_growth = 0.5 * mu;
    c.t_m = solve_t_m(c);
    return c;
  }

 private:
  static double solve_t_m(const FlatConstants& c) {
    const double tmin = c.beta * (c.alpha - c.lambda);
    const double scale = c.beta * c.c1_flat;
    if (scale <= 0.0) return tmin;
    auto g = [&](double t) {
      return scale * std::pow(t, c.p) / std::pow(t + c.beta * (c.lambda - c.alpha), c.p + 1.0);
    };
    double lo = tmin + 1e-12 * std::max(1.0, tmin);
    if (g(lo) <= 0.5) return lo;
    double hi = std::max(2.0 * tmin + 1.0, 1.0);
    while (g(hi) > 0.5) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) > 0.5 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
};

/// Flat-case Lyapunov energy
/// E(t) = (t^2 + t beta(lambda-alpha))(F - F*) + (xi/2)|x - x*|^2
///        + |lambda (x - x*) + t y|^2 / 2.
inline double energy_flat(const DynState& s, const Objective& obj,
                          const FlatConstants& c) {
  const double shift = c.beta * (c.lambda - c.alpha);
  return (s.t * s.t + s.t * shift) * obj.gap(s.x) +
         0.5 * c.xi * (s.x - obj.x_star).squaredNorm() +
         0.5 * (c.lambda * (s.x - obj.x_star) + s.t * s.y).squaredNorm();
}

/// H(t) = t^p E(t).
inline double energy_H_flat(const DynState& s, const Objective& obj,
                            const FlatConstants& c) {
  return std::pow(s.t, c.p) * energy_flat(s, obj, c);
}

/// Decomposition E(t) = (t + beta(lambda-alpha)) a(t) + t (b(t) + xi c(t)).
struct FlatDecomposition {
  double a;  // t (F - F*)
  double b;  // |lambda (x - x*) + t y|^2 / (2t)
  double c;  // |x - x*|^2 / (2t)
};

inline FlatDecomposition flat_decomposition(const DynState& s, const Objective& obj,
                                            const FlatConstants& c) {
  FlatDecomposition d;
  d.a = s.t * obj.gap(s.x);
  d.b = (c.lambda * (s.x - obj.x_star) + s.t * s.y).squaredNorm() / (2.0 * s.t);
  d.c = (s.x - obj.x_star).squaredNorm() / (2.0 * s.t);
  return d;
}

/// v(t) = t (t + beta(lambda-alpha))^(p+1) (F - F*); bounded on certified
/// flat runs.
inline double flat_v(double t, double f_gap, const FlatConstants& c) {
  return t * std::pow(t + c.beta * (c.lambda - c.alpha), c.p + 1.0) * f_gap;
}

/// G(t) = H(t) - beta c1_flat int_t1^t u^(p-1) a(u) du, trapezoid on samples;
/// non-increasing past t1 by the flat analysis.
inline std::vector<std::pair<double, double>> series_G_flat(const Trajectory& traj,
                                                            const Objective& obj,
                                                            const FlatConstants& c,
                                                            double t1) {
  std::vector<std::pair<double, double>> out;
  double integral = 0.0, prev_t = 0.0, prev_w = 0.0;
  bool first = true;
  for (const auto& rec : traj.records) {
    if (rec.t < t1) continue;
    const double w = std::pow(rec.t, c.p) * rec.f_gap;  // u^(p-1) a(u) = u^p (F - F*)
    if (!first) integral += 0.5 * (w + prev_w) * (rec.t - prev_t);
    DynState s{rec.t, rec.x, rec.y};
    out.emplace_back(rec.t, energy_H_flat(s, obj, c) - c.beta * c.c1_flat * integral);
    prev_t = rec.t;
    prev_w = w;
    first = false;
  }
  return out;
}

/// F(t) = G(t) + beta int_t1^t u^(p+1)(u + beta(lambda-alpha)) |grad F|^2 du.
inline std::vector<std::pair<double, double>> series_F_flat(const Trajectory& traj,
                                                            const Objective& obj,
                                                            const FlatConstants& c,
                                                            double t1) {
  auto g = series_G_flat(traj, obj, c, t1);
  double integral = 0.0, prev_t = 0.0, prev_w = 0.0;
  bool first = true;
  std::size_t i = 0;
  for (const auto& rec : traj.records) {
    if (rec.t < t1) continue;
    const double w = std::pow(rec.t, c.p + 1.0) *
                     (rec.t + c.beta * (c.lambda - c.alpha)) * rec.grad_norm *
                     rec.grad_norm;
    if (!first) integral += 0.5 * (w + prev_w) * (rec.t - prev_t);
    g[i].second += c.beta * integral;
    ++i;
    prev_t = rec.t;
    prev_w = w;
    first = false;
  }
  return g;
}

}  // namespace inertia
