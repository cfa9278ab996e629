#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace inertia {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Thrown when a construction request is valid syntax but outside what the
/// library supports (e.g. rank-deficient least squares).
struct NotSupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A differentiable convex test problem with value/gradient oracles, a known
/// unique minimizer and optional geometry certificates.
///
/// gamma_flat:    certified flatness exponent (F - F* <= <grad, x-x*>/gamma)
/// gamma_growth:  certified growth exponent ((mu/2)|x-x*|^gamma <= F - F*)
/// mu:            growth constant
/// lipschitz_grad: gradient Lipschitz constant, used by step-size rules
struct Objective {
  int dim = 0;
  std::string name;
  std::function<double(const Vec&)> eval;
  std::function<Vec(const Vec&)> grad;
  double f_star = 0.0;
  Vec x_star;
  std::optional<double> gamma_flat;
  std::optional<double> gamma_growth;
  std::optional<double> mu;
  std::optional<double> lipschitz_grad;

  double gap(const Vec& x) const { return eval(x) - f_star; }
};

/// F(x) = (mu/2) |x - x_star|^2.
inline Objective make_quadratic(int dim, double mu, Vec x_star) {
  if (dim <= 0) throw std::invalid_argument("make_quadratic: dim must be positive");
  if (mu <= 0.0) throw std::invalid_argument("make_quadratic: mu must be positive");
  if (x_star.size() != dim) throw std::invalid_argument("make_quadratic: x_star has wrong dimension");
  Objective obj;
  obj.dim = dim;
  obj.name = "quadratic";
  obj.f_star = 0.0;
  obj.x_star = x_star;
  obj.eval = [mu, x_star](const Vec& x) { return 0.5 * mu * (x - x_star).squaredNorm(); };
  obj.grad = [mu, x_star](const Vec& x) { return Vec(mu * (x - x_star)); };
  obj.gamma_flat = 2.0;
  obj.gamma_growth = 2.0;
  obj.mu = mu;
  obj.lipschitz_grad = mu;
  return obj;
}

/// F(x) = (mu/2) |x - x_star|^gamma, gamma >= 2.
/// Satisfies the flatness identity F - F* = <grad, x-x*>/gamma exactly.
inline Objective make_power_norm(int dim, double gamma, double mu, Vec x_star) {
  if (dim <= 0) throw std::invalid_argument("make_power_norm: dim must be positive");
  if (mu <= 0.0) throw std::invalid_argument("make_power_norm: mu must be positive");
  if (gamma < 2.0) throw std::invalid_argument("make_power_norm: gamma < 2 is not C^2, excluded");
  if (x_star.size() != dim) throw std::invalid_argument("make_power_norm: x_star has wrong dimension");
  Objective obj;
  obj.dim = dim;
  obj.name = "power_norm";
  obj.f_star = 0.0;
  obj.x_star = x_star;
  obj.eval = [mu, gamma, x_star](const Vec& x) {
    return 0.5 * mu * std::pow((x - x_star).norm(), gamma);
  };
  obj.grad = [mu, gamma, x_star](const Vec& x) {
    const Vec d = x - x_star;
    const double r = d.norm();
    if (r == 0.0) return Vec(Vec::Zero(x.size()));
    // grad = (mu*gamma/2) r^(gamma-2) (x - x_star)
    return Vec(0.5 * mu * gamma * std::pow(r, gamma - 2.0) * d);
  };
  obj.gamma_flat = gamma;
  obj.gamma_growth = gamma;
  obj.mu = mu;
  if (gamma == 2.0) obj.lipschitz_grad = mu;
  return obj;
}

/// F(x) = |Ax - b|^2 with full-rank square A, so the minimizer is unique.
/// mu = 2 sigma_min(A)^2, L = 2 sigma_max(A)^2.
inline Objective make_least_squares(const Mat& A, const Vec& b) {
  if (A.rows() != A.cols() || A.rows() == 0)
    throw std::invalid_argument("make_least_squares: A must be square and non-empty");
  if (b.size() != A.rows())
    throw std::invalid_argument("make_least_squares: b has wrong dimension");
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (smin <= 1e-12 * smax)
    throw NotSupportedError("make_least_squares: A is rank deficient, minimizer not unique");
  Objective obj;
  obj.dim = static_cast<int>(A.rows());
  obj.name = "least_squares";
  obj.x_star = svd.solve(b);
  obj.eval = [A, b](const Vec& x) { return (A * x - b).squaredNorm(); };
  obj.grad = [A, b](const Vec& x) { return Vec(2.0 * A.transpose() * (A * x - b)); };
  obj.f_star = obj.eval(obj.x_star);
  obj.gamma_flat = 2.0;
  obj.gamma_growth = 2.0;
  obj.mu = 2.0 * smin * smin;
  obj.lipschitz_grad = 2.0 * smax * smax;
  return obj;
}

/// Outcome of a sample-based geometry check. `worst_margin` is the minimum of
/// (lhs - rhs slack) over all samples; the inequality held iff ok.
/// `constant` carries the empirical Lojasiewicz constant when one is estimated.
struct VerifyResult {
  bool ok = false;
  double worst_margin = 0.0;
  double constant = 0.0;
};

namespace detail {

/// Uniform sample in the closed ball B(center, radius).
inline Vec sample_ball(std::mt19937_64& rng, const Vec& center, double radius) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vec dir(center.size());
  for (Eigen::Index i = 0; i < dir.size(); ++i) dir(i) = gauss(rng);
  const double n = dir.norm();
  if (n == 0.0) return center;
  const double r = radius * std::pow(unif(rng), 1.0 / static_cast<double>(center.size()));
  return center + (r / n) * dir;
}

constexpr double kGeometryTol = 1e-12;  // absolute slack for geometric inequalities

}  // namespace detail

/// Checks (mu/2) |x - x*|^gamma <= F(x) - F* on `samples` points in
/// B(x_star, radius).
inline VerifyResult verify_growth(const Objective& obj, int samples, double radius,
                                  std::uint64_t seed) {
  if (!obj.gamma_growth || !obj.mu)
    throw std::invalid_argument("verify_growth: objective lacks growth metadata");
  if (samples <= 0 || radius <= 0.0)
    throw std::invalid_argument("verify_growth: samples and radius must be positive");
  std::mt19937_64 rng(seed);
  VerifyResult res;
  res.ok = true;
  res.worst_margin = std::numeric_limits<double>::infinity();
  const double gamma = *obj.gamma_growth, mu = *obj.mu;
  for (int i = 0; i < samples; ++i) {
    const Vec x = detail::sample_ball(rng, obj.x_star, radius);
    const double margin =
        obj.gap(x) - 0.5 * mu * std::pow((x - obj.x_star).norm(), gamma);
    res.worst_margin = std::min(res.worst_margin, margin);
    if (margin < -detail::kGeometryTol) res.ok = false;
  }
  return res;
}

/// Checks the flatness inequality F(x) - F* <= <grad F(x), x - x*>/gamma on
/// samples in B(x_star, radius). With a small radius this doubles as a
/// numeric probe of the local variant.
inline VerifyResult verify_flatness(const Objective& obj, double gamma, int samples,
                                    double radius, std::uint64_t seed) {
  if (samples <= 0 || radius <= 0.0)
    throw std::invalid_argument("verify_flatness: samples and radius must be positive");
  std::mt19937_64 rng(seed);
  VerifyResult res;
  res.ok = true;
  res.worst_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const Vec x = detail::sample_ball(rng, obj.x_star, radius);
    const double margin = obj.grad(x).dot(x - obj.x_star) / gamma - obj.gap(x);
    res.worst_margin = std::min(res.worst_margin, margin);
    if (margin < -detail::kGeometryTol) res.ok = false;
  }
  return res;
}

/// For gamma_growth == 2 checks 2 mu (F - F*) <= |grad F|^2; for gamma > 2
/// estimates the constant K in K (F - F*) <= |grad F|^(gamma/(gamma-1)) as the
/// minimal sampled ratio and reports it.
inline VerifyResult verify_lojasiewicz(const Objective& obj, int samples, double radius,
                                       std::uint64_t seed) {
  if (!obj.gamma_growth || !obj.mu)
    throw std::invalid_argument("verify_lojasiewicz: objective lacks growth metadata");
  if (*obj.gamma_growth < 2.0)
    throw std::invalid_argument("verify_lojasiewicz: needs gamma_growth >= 2");
  std::mt19937_64 rng(seed);
  VerifyResult res;
  res.ok = true;
  res.worst_margin = std::numeric_limits<double>::infinity();
  const double gamma = *obj.gamma_growth, mu = *obj.mu;
  if (gamma == 2.0) {
    for (int i = 0; i < samples; ++i) {
      const Vec x = detail::sample_ball(rng, obj.x_star, radius);
      const double margin = obj.grad(x).squaredNorm() - 2.0 * mu * obj.gap(x);
      res.worst_margin = std::min(res.worst_margin, margin);
      if (margin < -detail::kGeometryTol) res.ok = false;
    }
    res.constant = 2.0 * mu;
  } else {
    // The theory only asserts existence of K; report the empirical minimum of
    // |grad F|^(gamma/(gamma-1)) / (F - F*) over the samples.
    double kmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
      const Vec x = detail::sample_ball(rng, obj.x_star, radius);
      const double gap = obj.gap(x);
      if (gap <= 0.0) continue;
      kmin = std::min(kmin, std::pow(obj.grad(x).norm(), gamma / (gamma - 1.0)) / gap);
    }
    res.constant = kmin;
    res.ok = std::isfinite(kmin) && kmin > 0.0;
    res.worst_margin = kmin;
  }
  return res;
}

}  // namespace inertia
