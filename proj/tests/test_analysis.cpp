#include <doctest.h>

#include "inertia/analysis.hpp"
#include "inertia/objective.hpp"

using namespace inertia;

namespace {

Series log_grid_series(double t0, double t1, int n, auto f) {
  Series s;
  for (int i = 0; i < n; ++i) {
    const double t = t0 * std::pow(t1 / t0, double(i) / (n - 1));
    s.emplace_back(t, f(t));
  }
  return s;
}

}  // namespace

TEST_CASE("fit_rate: exact power laws and envelope mode") {
  auto s = log_grid_series(1.0, 1000.0, 200, [](double t) { return std::pow(t, -3.0); });
  auto fit = fit_rate(s, 1.0, 1000.0);
  CHECK(fit.exponent == doctest::Approx(-3.0).epsilon(1e-10));
  CHECK(fit.residual_rms <= 1e-12);

  auto flat = log_grid_series(1.0, 1000.0, 200, [](double) { return 2.5; });
  CHECK(fit_rate(flat, 1.0, 1000.0).exponent == doctest::Approx(0.0).epsilon(1e-12));

  // oscillatory decay: envelope fit recovers the -2 rate
  auto osc = log_grid_series(1.0, 1e4, 400, [](double t) {
    return std::pow(t, -2.0) * (2.0 + std::sin(5.0 * std::log(t)));
  });
  auto env = fit_rate(osc, 10.0, 1e4, FitMode::windowed_max);
  CHECK(std::abs(env.exponent + 2.0) <= 0.1);

  Series with_zero = s;
  with_zero[50].second = 0.0;
  CHECK_THROWS_AS(fit_rate(with_zero, 1.0, 1000.0), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate(s, 999.0, 1000.0), std::invalid_argument);  // < 20 samples
}

TEST_CASE("last_positive_decade") {
  auto s = log_grid_series(1.0, 1e4, 100,
                           [](double t) { return t < 100.0 ? 1.0 / t : 0.0; });
  auto [lo, hi] = last_positive_decade(s);
  CHECK(hi < 100.0);
  CHECK(lo == doctest::Approx(hi / 10.0));
  Series dead(30, {1.0, 0.0});
  for (std::size_t i = 0; i < dead.size(); ++i) dead[i].first = 1.0 + i;
  CHECK_THROWS_AS(last_positive_decade(dead), std::invalid_argument);
}

TEST_CASE("cumulative integral: closed forms and divergence verdicts") {
  // integrand t^delta g = t^-2 from 1 to 100: total 0.99
  const double delta = 4.0;
  auto s = log_grid_series(1.0, 100.0, 400,
                           [&](double t) { return std::pow(t, -delta - 2.0); });
  auto diag = cumulative_weighted_integral(s, delta);
  CHECK(diag.cumulative.back().second == doctest::Approx(0.99).epsilon(0.01));
  CHECK(diag.converged);

  // log divergence: g = t^{-delta-1}
  auto sdiv = log_grid_series(1.0, 1e4, 400,
                              [&](double t) { return std::pow(t, -delta - 1.0); });
  CHECK_FALSE(cumulative_weighted_integral(sdiv, delta).converged);

  // closed forms for t^-k, k in {1.5, 2, 3}: within 1% on dense log grids
  for (double k : {1.5, 2.0, 3.0}) {
    auto sk = log_grid_series(1.0, 100.0, 400,
                              [&](double t) { return std::pow(t, -k); });
    const double exact = (1.0 - std::pow(100.0, 1.0 - k)) / (k - 1.0);
    CHECK(cumulative_weighted_integral(sk, 0.0).cumulative.back().second ==
          doctest::Approx(exact).epsilon(0.01));
  }

  Series unsorted = {{1.0, 1.0}, {0.5, 1.0}};
  CHECK_THROWS_AS(cumulative_weighted_integral(unsorted, 0.0), std::invalid_argument);

  // cumulative sequence is non-decreasing for non-negative integrands
  double prev = -1.0;
  for (const auto& [t, v] : diag.cumulative) {
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("averaged point: constants, linear drift, Jensen") {
  auto quad = make_quadratic(2, 1.0, Vec::Zero(2));
  Trajectory traj;
  // x(u) = (u, 0) on a uniform grid over [1, 100]
  for (int i = 0; i <= 400; ++i) {
    TrajectoryRecord rec;
    rec.t = 1.0 + 99.0 * i / 400.0;
    rec.x = Vec(2);
    rec.x << rec.t, 0.0;
    rec.y = Vec::Zero(2);
    rec.f_gap = quad.gap(rec.x);
    rec.grad_norm = quad.grad(rec.x).norm();
    traj.records.push_back(rec);
  }
  // delta = 0: uniform average of u over [t/2, t] is 3t/4
  const auto pt = averaged_point(traj, 80.0, 0.0, quad);
  CHECK(pt.z(0) == doctest::Approx(60.0).epsilon(2e-3));  // half-grid-spacing window bias
  CHECK(pt.z(1) == doctest::Approx(0.0));
  // Jensen: F(z) below the matched weighted mean of F
  CHECK(pt.f_gap_z <= pt.mean_f_gap + 1e-12);

  // constant trajectory: the average is the constant
  Trajectory flat;
  for (int i = 0; i <= 100; ++i) {
    TrajectoryRecord rec;
    rec.t = 1.0 + i;
    rec.x = Vec(2);
    rec.x << 3.0, -1.0;
    rec.y = Vec::Zero(2);
    rec.f_gap = quad.gap(rec.x);
    rec.grad_norm = 0.0;
    flat.records.push_back(rec);
  }
  CHECK(averaged_point(flat, 100.0, 2.0, quad).z.isApprox(flat.records[0].x, 1e-12));

  CHECK_THROWS_AS(averaged_point(flat, 3.0, 0.0, quad), std::invalid_argument);
}

TEST_CASE("windowed inf") {
  Series mono = {{1, 10}, {2, 8}, {3, 5}, {4, 4}, {5, 3}, {6, 2.5}, {8, 2}, {10, 1}};
  CHECK(windowed_inf(mono, 10.0) == doctest::Approx(1.0));
  CHECK(windowed_inf(mono, 6.0) == doctest::Approx(2.5));

  Series dip = {{5, 3}, {6, 1}, {7, 0.2}, {8, 2}, {9, 2}, {10, 2}};
  CHECK(windowed_inf(dip, 10.0) == doctest::Approx(0.2));
  CHECK_THROWS_AS(windowed_inf(mono, 100.0), std::invalid_argument);
}

TEST_CASE("liminf proxy scaling") {
  Series zeros;
  for (int i = 0; i < 100; ++i) zeros.emplace_back(std::pow(10.0, 3.0 * i / 99.0), 0.0);
  CHECK(check_liminf_scaling(zeros, 2.0) == doctest::Approx(0.0));

  // f = t^{-d-1}/log^2 t: proxy = 1/log(t), shrinking with the horizon
  const double d = 2.0;
  auto f = [&](double t) { return std::pow(t, -d - 1.0) / (std::log(t) * std::log(t)); };
  auto s3 = log_grid_series(2.0, 1e3, 300, f);
  auto s4 = log_grid_series(2.0, 1e4, 400, f);
  CHECK(check_liminf_scaling(s4, d) < check_liminf_scaling(s3, d));

  Series narrow = {{1.0, 1.0}, {2.0, 1.0}};
  CHECK_THROWS_AS(check_liminf_scaling(narrow, 1.0), std::invalid_argument);
}

TEST_CASE("inequality lemmas: equality witnesses and random trials") {
  // u = v, a = 1: Cauchy-Schwarz-type bound holds with equality
  Vec u(3);
  u << 1.0, 2.0, -1.0;
  CHECK(std::abs(u.dot(u)) == doctest::Approx(0.5 * u.squaredNorm() + 0.5 * u.squaredNorm()));

  // g(x) = x - K x^d attains its minimum K(d-1)(dK)^{d/(1-d)} at x = (dK)^{1/(1-d)}
  const double K = 2.0, del = 0.4;
  const double x_min = std::pow(del * K, 1.0 / (1.0 - del));
  const double g_min = x_min - K * std::pow(x_min, del);
  CHECK(g_min == doctest::Approx(K * (del - 1.0) * std::pow(del * K, del / (1.0 - del))));

  const auto report = check_inequality_lemmas(424242, 10000);
  CHECK(report.trials == 10000);
  CHECK(report.violations == 0);
  CHECK(report.ok());
  CHECK_THROWS_AS(check_inequality_lemmas(1, 10), std::invalid_argument);
}
