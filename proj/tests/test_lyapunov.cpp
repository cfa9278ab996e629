#include <doctest.h>

#include "inertia/lyapunov.hpp"

using namespace inertia;

namespace {

Vec v1(double a) {
  Vec v(1);
  v << a;
  return v;
}

// independent bisection oracle for the cubic root, no Newton polish
double r_star_oracle(double c0) {
  double lo = 0.0, hi = 1000.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (r_star_poly(mid, c0) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("r_star: residual, bracketing, oracle agreement") {
  for (double c0 : {0.0, 0.1, 1.0, 10.0}) {
    const double r = solve_r_star(c0);
    CHECK(std::abs(r_star_poly(r, c0)) <= 1e-12);
    CHECK(r_star_poly(0.5 * r, c0) < 0.0);
    CHECK(r_star_poly(2.0 * r, c0) > 0.0);
    CHECK(r == doctest::Approx(r_star_oracle(c0)).epsilon(1e-12));
  }
  CHECK(solve_r_star(0.0) > 3.0);
  CHECK(solve_r_star(0.0) < 3.1);
  // the root exceeds 1 + c0 since poly(1 + c0) < 0
  CHECK(solve_r_star(10.0) > 11.0);
  CHECK_THROWS_AS(solve_r_star(-1.0), std::invalid_argument);
}

TEST_CASE("sharp constants: derived fields and the critical case") {
  auto c = SharpConstants::make(2.0, 4.0, 0.5, 1.0);
  CHECK(c.lambda == doctest::Approx(2.0));
  CHECK(c.lambda < c.alpha);
  CHECK(c.k_alpha == doctest::Approx(2.0 * 4.0 * 2.0 / 16.0 * (4.0 - 2.0)));
  CHECK(c.rate_exponent() == doctest::Approx(4.0));
  CHECK(c.c0 == doctest::Approx(0.5 * 1.0 * 2.0 * 3.0 / 2.0));  // beta sqrt(mu) gamma (gl-1)/(gl-2)
  CHECK(c.t1 > 0.0);
  CHECK_FALSE(c.critical());

  auto crit = SharpConstants::make(2.0, 2.0, 1.0, 1.0);
  CHECK(crit.critical());
  CHECK(crit.k_alpha == doctest::Approx(0.0));
  CHECK(std::isnan(crit.c0));

  // k_alpha changes sign exactly at alpha = 1 + 2/gamma
  CHECK(SharpConstants::make(2.0, 1.9, 0.0, 1.0).k_alpha < 0.0);
  CHECK(SharpConstants::make(2.0, 2.1, 0.0, 1.0).k_alpha > 0.0);
}

TEST_CASE("energy_sharp: hand values") {
  auto quad = make_quadratic(1, 1.0, v1(0.0));
  auto c = SharpConstants::make(2.0, 4.0, 1.0, 1.0);  // lambda = 2

  // minimizer at rest
  CHECK(energy_sharp({5.0, v1(0.0), v1(0.0)}, quad, c) == doctest::Approx(0.0));

  // t = beta (alpha - lambda) = 2: first term vanishes at x = x*
  const double t = c.beta * (c.alpha - c.lambda);
  CHECK(energy_sharp({t, v1(0.0), v1(3.0)}, quad, c) ==
        doctest::Approx(0.5 * t * t * 9.0));

  // full hand evaluation: t=10, x=0.1, y=0.01 gives 0.4 + 0.045
  CHECK(energy_sharp({10.0, v1(0.1), v1(0.01)}, quad, c) == doctest::Approx(0.445));
}

TEST_CASE("phi: primitive differentiates to the rate, vanishes at infinity") {
  auto c = SharpConstants::make(2.0, 4.0, 0.5, 1.0);
  for (double t : {1.0, 5.0, 20.0}) {
    const double h = 1e-6 * t;
    const double fd = (phi_primitive(t + h, c) - phi_primitive(t - h, c)) / (2.0 * h);
    CHECK(fd == doctest::Approx(phi_rate(t, c)).epsilon(1e-6));
    CHECK(phi_primitive(t, c) <= 0.0);
  }
  CHECK(std::abs(phi_primitive(1e9, c)) <= 1e-8);

  // critical case: zero prefactor kills the whole expression
  auto crit = SharpConstants::make(2.0, 2.0, 0.0, 1.0);
  CHECK(phi_primitive(3.0, crit) == doctest::Approx(0.0));
  CHECK(phi_rate(3.0, crit) == doctest::Approx(0.0));
  CHECK_THROWS_AS(phi_primitive(-1.0, c), std::domain_error);
}

TEST_CASE("closed-form K: factor identity and beta = 0 collapse") {
  for (double beta : {0.0, 0.3, 1.0, 2.5}) {
    auto c = SharpConstants::make(2.0, 4.0, beta, 1.0);
    const double fc = sharp_K_factor_compact(c), fe = sharp_K_factor_expanded(c);
    CHECK(std::abs(fc - fe) <= 1e-12 * std::abs(fc));
  }
  auto c0 = SharpConstants::make(2.0, 4.0, 0.0, 1.0);
  CHECK(sharp_K_factor_compact(c0) == doctest::Approx(1.0).epsilon(1e-14));

  // starting at the minimizer at rest: zero bound
  CHECK(bound_sharp_general(c0.t1 + 1.0, c0, 0.0, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("bound preconditions map to bound-not-applicable") {
  auto crit = SharpConstants::make(2.0, 2.0, 1.0, 1.0);
  CHECK_THROWS_AS(bound_sharp_general(10.0, crit, 1.0, 1.0), BoundNotApplicable);

  auto c = SharpConstants::make(2.0, 4.0, 0.5, 1.0);
  CHECK_THROWS_AS(bound_sharp_general(0.5 * c.t1, c, 1.0, 1.0), BoundNotApplicable);
  CHECK_THROWS_AS(bound_sharp_general(c.t1 + 1.0, c, 1.0, 1e9), BoundNotApplicable);
  CHECK_THROWS_AS(bound_sharp_critical(10.0, c, 1.0, 1.0), BoundNotApplicable);
  CHECK_THROWS_AS(bound_sharp_critical(1.0, crit, 1.0, 1.0), BoundNotApplicable);

  // critical bound, beta = 0 collapse: (t0^2 + (lambda^2 + sqrt mu)/mu) Em / t^2
  auto crit0 = SharpConstants::make(2.0, 2.0, 0.0, 1.0);
  const double expected = (1.0 + (1.0 + 1.0)) * 2.0 / 100.0;
  CHECK(bound_sharp_critical(10.0, crit0, 2.0, 1.0) == doctest::Approx(expected));
  CHECK(bound_sharp_critical(10.0, crit0, 0.0, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("flat constants: worked example and t_m definition") {
  auto c = FlatConstants::make(4.0, 4.0, 3.0, 1.0, 0.5);
  CHECK(c.p == doctest::Approx(2.0));
  CHECK(c.lambda == doctest::Approx(1.0));
  CHECK(c.xi == doctest::Approx(-1.0));
  CHECK(c.c1_flat == doctest::Approx(6.0));
  CHECK(c.k_growth == doctest::Approx(0.25));
  CHECK(c.rate_exponent() == doctest::Approx(4.0));

  // alpha >= (gamma1+2)/(gamma1-2) = 3 certifies c1_flat > 0
  CHECK(c.c1_flat > 0.0);

  // t_m satisfies the defining threshold with near-equality
  const double g = c.beta * c.c1_flat * std::pow(c.t_m, c.p) /
                   std::pow(c.t_m + c.beta * (c.lambda - c.alpha), c.p + 1.0);
  CHECK(g == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(c.t_m > c.beta * (c.alpha - c.lambda));

  // beta = 0: threshold holds immediately past the shift point
  auto c0 = FlatConstants::make(4.0, 4.0, 3.0, 0.0, 0.5);
  CHECK(c0.t_m == doctest::Approx(0.0).epsilon(1e-9));

  CHECK(c.c2_at(c.t_m) != 0.0);
  CHECK_THROWS_AS(FlatConstants::make(2.0, 2.0, 3.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(FlatConstants::make(4.0, 5.0, 3.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("energy_flat: hand values and decomposition") {
  auto p4 = make_power_norm(1, 4.0, 0.5, v1(0.0));
  auto c = FlatConstants::make(4.0, 4.0, 3.0, 1.0, 0.5);  // lambda=1, xi=-1

  CHECK(energy_flat({5.0, v1(0.0), v1(0.0)}, p4, c) == doctest::Approx(0.0));

  // t=2, x=1, y=0.5: gap = 0.5, shift = beta(lambda-alpha) = -2
  // E = (4 + 2*(-2))*0.5 + (-1/2)*1 + 0.5*(1 + 1)^2 = 0 - 0.5 + 2 = 1.5
  const DynState s{2.0, v1(1.0), v1(0.5)};
  CHECK(energy_flat(s, p4, c) == doctest::Approx(1.5));
  CHECK(energy_H_flat(s, p4, c) == doctest::Approx(4.0 * 1.5));  // t^p = 4

  const auto d = flat_decomposition(s, p4, c);  // gap = (mu/2)|x|^4 = 0.25
  CHECK(d.a == doctest::Approx(2.0 * 0.25));
  CHECK(d.b == doctest::Approx(4.0 / 4.0));
  CHECK(d.c == doctest::Approx(1.0 / 4.0));
  // E = (t + shift) a + t (b + xi c) reassembles
  CHECK((2.0 - 2.0) * d.a + 2.0 * (d.b + c.xi * d.c) == doctest::Approx(1.5));

  CHECK(flat_v(2.0, 0.5, c) == doctest::Approx(2.0 * std::pow(0.0, 3.0) * 0.5));
}
