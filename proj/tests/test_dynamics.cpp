#include <doctest.h>

#include "inertia/analysis.hpp"
#include "inertia/dynamics.hpp"
#include "inertia/objective.hpp"

using namespace inertia;

namespace {

Vec v1(double a) {
  Vec v(1);
  v << a;
  return v;
}

Objective constant_objective(int dim, double value) {
  Objective obj;
  obj.dim = dim;
  obj.name = "constant";
  obj.f_star = value;
  obj.x_star = Vec::Zero(dim);
  obj.eval = [value](const Vec&) { return value; };
  obj.grad = [dim](const Vec&) { return Vec(Vec::Zero(dim)); };
  return obj;
}

DynamicsSpec base_spec(Variant variant, double alpha, double beta, const Vec& x0,
                       double t_end = 100.0) {
  DynamicsSpec spec;
  spec.variant = variant;
  spec.alpha = alpha;
  spec.beta = beta;
  spec.t0 = 1.0;
  spec.t_end = t_end;
  spec.x0 = x0;
  return spec;
}

}  // namespace

TEST_CASE("vector field: hand-evaluated cases") {
  auto quad = make_quadratic(1, 1.0, v1(0.0));

  // avd, state (t=1, x=1, y=0): dx = y = 0, dy = -grad = -1
  DynamicsSpec avd = base_spec(Variant::avd, 3.0, 0.0, v1(1.0));
  auto [dx, dy] = vector_field(avd, quad, {1.0, v1(1.0), v1(0.0)});
  CHECK(dx(0) == doctest::Approx(0.0));
  CHECK(dy(0) == doctest::Approx(-1.0));

  // din_avd alpha=3 beta=1, state (t=2, x=1, y=1): grad=1, dx = 1-1 = 0,
  // dy = -(3/2)*0 - 1 = -1
  DynamicsSpec din = base_spec(Variant::din_avd, 3.0, 1.0, v1(1.0));
  auto [dx2, dy2] = vector_field(din, quad, {2.0, v1(1.0), v1(1.0)});
  CHECK(dx2(0) == doctest::Approx(0.0));
  CHECK(dy2(0) == doctest::Approx(-1.0));

  // modified variant picks up the extra (beta/t) grad term
  DynamicsSpec mod = base_spec(Variant::din_avd_modified, 3.0, 1.0, v1(1.0));
  auto [dx3, dy3] = vector_field(mod, quad, {2.0, v1(1.0), v1(1.0)});
  CHECK(dx3(0) == doctest::Approx(0.0));
  CHECK(dy3(0) == doctest::Approx(-1.5));

  CHECK_THROWS_AS(vector_field(din, quad, {0.0, v1(1.0), v1(1.0)}),
                  std::invalid_argument);
}

TEST_CASE("integrate: constant solution for zero gradient") {
  auto obj = constant_objective(2, 3.0);
  Vec x0(2);
  x0 << 1.0, -2.0;
  auto traj = integrate(base_spec(Variant::din_avd, 3.0, 1.0, x0), obj);
  REQUIRE(traj.records.size() >= 2);
  CHECK(traj.records.front().t == doctest::Approx(1.0));
  for (const auto& rec : traj.records) {
    CHECK((rec.x - x0).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(rec.f_gap == doctest::Approx(0.0));
  }
}

TEST_CASE("integrate: records, positivity, initial condition") {
  auto quad = make_quadratic(1, 1.0, v1(0.0));
  DynamicsSpec spec = base_spec(Variant::din_avd, 4.0, 1.0, v1(1.0), 1000.0);
  auto traj = integrate(spec, quad);
  CHECK(int(traj.records.size()) == spec.sample_count);
  // y(t0) = beta grad F(x0)
  CHECK(traj.records.front().y(0) == doctest::Approx(spec.beta * quad.grad(spec.x0)(0)));
  double prev_t = 0.0;
  for (const auto& rec : traj.records) {
    CHECK(rec.t > prev_t);
    CHECK(rec.f_gap >= -1e-12);
    prev_t = rec.t;
  }
  // windowed max of f_gap decreasing over [10, 1000]
  Series s;
  for (const auto& rec : traj.records) s.emplace_back(rec.t, rec.f_gap);
  CHECK(windowed_inf(s, 1000.0) < windowed_inf(s, 20.0));
}

TEST_CASE("integrate: self-convergence under tolerance halving") {
  // short horizon keeps the gap well above the floating-point floor, so the
  // relative comparison is meaningful
  auto quad = make_quadratic(1, 1.0, v1(0.0));
  DynamicsSpec spec = base_spec(Variant::din_avd, 4.0, 1.0, v1(2.0), 10.0);
  auto coarse = integrate(spec, quad);
  spec.rtol *= 0.5;
  spec.atol *= 0.5;
  auto fine = integrate(spec, quad);
  const double a = coarse.records.back().f_gap, b = fine.records.back().f_gap;
  CHECK(std::abs(a - b) <= 1e-6 * (std::abs(b) + 1e-300));
}

TEST_CASE("avd alpha=3 reaches the guaranteed 1/t^2 decay") {
  auto quad = make_quadratic(2, 1.0, Vec::Zero(2));
  Vec x0(2);
  x0 << 1.0, 0.5;
  auto traj = integrate(base_spec(Variant::avd, 3.0, 0.0, x0, 1000.0), quad);
  Series s;
  for (const auto& rec : traj.records) s.emplace_back(rec.t, rec.f_gap);
  auto [lo, hi] = last_positive_decade(s);
  const auto fit = fit_rate(s, lo, hi, FitMode::windowed_max);
  CHECK(fit.exponent <= -2.0 + 0.2);
}

TEST_CASE("residual check: pass, zero-gradient, negative control") {
  auto quad = make_quadratic(1, 1.0, v1(0.0));
  DynamicsSpec spec = base_spec(Variant::din_avd, 4.0, 1.0, v1(1.0), 21.0);
  spec.uniform_step = 0.01;
  auto traj = integrate(spec, quad);
  double max_grad = 0.0;
  for (const auto& rec : traj.records) max_grad = std::max(max_grad, rec.grad_norm);
  CHECK(residual_check(traj, quad) <= 1e-4 * (1.0 + max_grad));

  // constant trajectory: exact residual zero
  auto zero = constant_objective(1, 0.0);
  DynamicsSpec zspec = base_spec(Variant::din_avd, 3.0, 1.0, v1(1.0), 11.0);
  zspec.uniform_step = 0.1;
  auto ztraj = integrate(zspec, zero);
  CHECK(residual_check(ztraj, zero) <= 1e-10);

  // corrupting one state must blow the residual past the threshold
  auto bad = traj;
  bad.records[bad.records.size() / 2].x(0) += 1e-2;
  CHECK(residual_check(bad, quad) > 1e-4 * (1.0 + max_grad));

  Trajectory tiny;
  tiny.records.resize(3);
  CHECK_THROWS_AS(residual_check(tiny, quad), std::invalid_argument);
}

TEST_CASE("mechanical energy: non-increasing, closed-form start") {
  auto quad = make_quadratic(2, 1.0, Vec::Zero(2));
  Vec x0(2);
  x0 << 1.0, 1.0;
  DynamicsSpec spec = base_spec(Variant::din_avd, 4.0, 0.5, x0, 1000.0);
  auto traj = integrate(spec, quad);
  const double e0 =
      mechanical_energy_initial(quad, x0, spec.t0, spec.alpha, spec.beta);
  CHECK(mechanical_energy(traj.records.front(), spec) == doctest::Approx(e0));
  double prev = e0 + 1e-8 * e0;
  for (const auto& rec : traj.records) {
    const double e = mechanical_energy(rec, spec);
    CHECK(e <= prev + 1e-8 * e0);
    prev = e;
  }
}

TEST_CASE("hessian damping reduces oscillation of the gap") {
  auto quad = make_quadratic(2, 1.0, Vec::Zero(2));
  Vec x0(2);
  x0 << 1.0, 1.0;
  auto count_local_maxima = [&](double beta) {
    auto traj = integrate(base_spec(Variant::din_avd, 3.0, beta, x0, 1000.0), quad);
    int count = 0;
    const auto& r = traj.records;
    // only count maxima with meaningful amplitude: once the gap sits at the
    // floating-point floor, sign noise creates spurious ripples
    for (std::size_t i = 1; i + 1 < r.size(); ++i)
      if (r[i].t >= 10.0 && r[i].f_gap > 1e-13 && r[i].f_gap > r[i - 1].f_gap &&
          r[i].f_gap > r[i + 1].f_gap)
        ++count;
    return count;
  };
  CHECK(count_local_maxima(1.0) <= count_local_maxima(0.0));  // beta = 1/sqrt(L)
}

TEST_CASE("spec validation") {
  DynamicsSpec spec;
  spec.x0 = v1(1.0);
  spec.t0 = 0.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.t0 = 1.0;
  spec.t_end = 0.5;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.t_end = 10.0;
  spec.variant = Variant::avd;
  spec.beta = 1.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.beta = 0.0;
  CHECK_NOTHROW(spec.validate());
}
