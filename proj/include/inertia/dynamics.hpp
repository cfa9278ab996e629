#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

#include "inertia/objective.hpp"

namespace inertia {

enum class Variant { din_avd, avd, din_avd_modified };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::din_avd: return "din_avd";
    case Variant::avd: return "avd";
    case Variant::din_avd_modified: return "din_avd_modified";
  }
  return "?";
}

/// Configuration of one ODE integration. The second-order dynamics
///   x'' + (alpha/t) x' + beta H_F(x) x' + c(t) grad F(x) = 0
/// is integrated as a first-order system in (x, y) with y = x' + beta grad F(x),
/// which eliminates the Hessian; only the gradient oracle is evaluated.
struct DynamicsSpec {
  Variant variant = Variant::din_avd;
  double alpha = 3.0;
  double beta = 0.0;
  double t0 = 1.0;
  double t_end = 100.0;
  Vec x0;
  int sample_count = 400;     // log-spaced samples when uniform_step == 0
  double uniform_step = 0.0;  // > 0: uniform sampling with this step instead
  double rtol = 1e-9;
  double atol = 1e-12;

  void validate() const {
    if (!(t0 > 0.0) || !(t_end > t0)) throw std::invalid_argument("DynamicsSpec: need t_end > t0 > 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("DynamicsSpec: alpha must be positive");
    if (beta < 0.0) throw std::invalid_argument("DynamicsSpec: beta must be non-negative");
    if (variant == Variant::avd && beta != 0.0)
      throw std::invalid_argument("DynamicsSpec: avd requires beta == 0");
    if (x0.size() == 0) throw std::invalid_argument("DynamicsSpec: x0 is empty");
  }
};

struct DynState {
  double t = 0.0;
  Vec x;
  Vec y;  // y = x' + beta grad F(x); y(t0) = beta grad F(x0) since x'(t0) = 0
};

struct TrajectoryRecord {
  double t;
  Vec x;
  Vec y;
  double f_gap;
  double grad_norm;
};

struct Trajectory {
  DynamicsSpec spec;
  std::string objective_name;
  std::vector<TrajectoryRecord> records;
};

struct IntegrationError : std::runtime_error {
  IntegrationError(const std::string& what, DynState last)
      : std::runtime_error(what), last_state(std::move(last)) {}
  DynState last_state;
};

struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Right-hand side of the first-order reformulation.
///   din_avd:          x' = y - beta g,  y' = -(alpha/t)(y - beta g) - g
///   avd:              same with beta = 0
///   din_avd_modified: y' = -(alpha/t)(y - beta g) - (1 + beta/t) g
inline std::pair<Vec, Vec> vector_field(const DynamicsSpec& spec, const Objective& obj,
                                        const DynState& state) {
  if (!(state.t > 0.0)) throw std::invalid_argument("vector_field: t must be positive");
  const Vec g = obj.grad(state.x);
  const Vec xdot = state.y - spec.beta * g;
  Vec ydot = -(spec.alpha / state.t) * xdot;
  if (spec.variant == Variant::din_avd_modified)
    ydot -= (1.0 + spec.beta / state.t) * g;
  else
    ydot -= g;
  return {xdot, ydot};
}

/// Sample times requested from the integrator.
inline std::vector<double> sample_times(const DynamicsSpec& spec) {
  std::vector<double> times;
  if (spec.uniform_step > 0.0) {
    for (double t = spec.t0; t < spec.t_end + 0.5 * spec.uniform_step; t += spec.uniform_step)
      times.push_back(std::min(t, spec.t_end));
  } else {
    const int n = std::max(spec.sample_count, 2);
    const double l0 = std::log(spec.t0), l1 = std::log(spec.t_end);
    times.reserve(n);
    for (int i = 0; i < n; ++i)
      times.push_back(std::exp(l0 + (l1 - l0) * i / static_cast<double>(n - 1)));
    times.front() = spec.t0;
    times.back() = spec.t_end;
  }
  return times;
}

/// Integrates the dynamics with a Dormand-Prince 5(4) pair and dense output,
/// recording (t, x, y, F - F*, |grad F|) at the requested sample times.
inline Trajectory integrate(const DynamicsSpec& spec, const Objective& obj) {
  namespace ode = boost::numeric::odeint;
  spec.validate();
  if (obj.dim != spec.x0.size())
    throw std::invalid_argument("integrate: x0 dimension does not match objective");

  const Eigen::Index n = spec.x0.size();
  Vec z(2 * n);
  z.head(n) = spec.x0;
  z.tail(n) = spec.beta * obj.grad(spec.x0);  // x'(t0) = 0

  auto system = [&](const Vec& zz, Vec& dzdt, double t) {
    DynState s{t, zz.head(n), zz.tail(n)};
    auto [dx, dy] = vector_field(spec, obj, s);
    if (!dx.allFinite() || !dy.allFinite())
      throw OracleError("integrate: gradient oracle produced NaN/Inf at t=" + std::to_string(t));
    dzdt.resize(2 * n);
    dzdt.head(n) = dx;
    dzdt.tail(n) = dy;
  };

  Trajectory traj;
  traj.spec = spec;
  traj.objective_name = obj.name;
  const auto times = sample_times(spec);
  traj.records.reserve(times.size());

  auto observer = [&](const Vec& zz, double t) {
    TrajectoryRecord rec;
    rec.t = t;
    rec.x = zz.head(n);
    rec.y = zz.tail(n);
    rec.f_gap = obj.gap(rec.x);
    rec.grad_norm = obj.grad(rec.x).norm();
    traj.records.push_back(std::move(rec));
  };

  using stepper_t = ode::runge_kutta_dopri5<Vec, double, Vec, double, ode::vector_space_algebra>;
  auto stepper = ode::make_dense_output(spec.atol, spec.rtol, stepper_t());
  try {
    ode::integrate_times(stepper, system, z, times.begin(), times.end(),
                         std::min(1e-3, (spec.t_end - spec.t0) / 100.0), observer);
  } catch (const OracleError&) {
    throw;
  } catch (const std::exception& e) {
    DynState last{stepper.current_time(), Vec(stepper.current_state().head(n)),
                  Vec(stepper.current_state().tail(n))};
    throw IntegrationError(std::string("integrate: step-size control failed: ") + e.what(),
                           std::move(last));
  }
  return traj;
}

/// Max norm of the reconstructed ODE residual over interior records of a
/// uniformly sampled trajectory. x', x'' come from central differences; the
/// Hessian term beta H_F x' is evaluated as the time derivative of
/// t -> grad F(x(t)), again by central differences.
inline double residual_check(const Trajectory& traj, const Objective& obj) {
  const auto& r = traj.records;
  if (r.size() < 5) throw std::invalid_argument("residual_check: need at least 5 records");
  const double h = r[1].t - r[0].t;
  for (std::size_t i = 1; i + 1 < r.size(); ++i)
    if (std::abs((r[i + 1].t - r[i].t) - h) > 1e-9 * h)
      throw std::invalid_argument("residual_check: records are not uniformly spaced");

  const DynamicsSpec& spec = traj.spec;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    const Vec xdot = (r[i + 1].x - r[i - 1].x) / (2.0 * h);
    const Vec xddot = (r[i + 1].x - 2.0 * r[i].x + r[i - 1].x) / (h * h);
    const Vec gdot =
        (obj.grad(r[i + 1].x) - obj.grad(r[i - 1].x)) / (2.0 * h);  // = H_F(x) x'
    const Vec g = obj.grad(r[i].x);
    const double t = r[i].t;
    const double c =
        spec.variant == Variant::din_avd_modified ? 1.0 + spec.beta / t : 1.0;
    const Vec res = xddot + (spec.alpha / t) * xdot + spec.beta * gdot + c * g;
    worst = std::max(worst, res.norm());
  }
  return worst;
}

/// Mechanical energy E_m(t) = (1 + beta*alpha/t)(F - F*) + |y|^2 / 2,
/// non-increasing along every trajectory.
inline double mechanical_energy(const TrajectoryRecord& rec, const DynamicsSpec& spec) {
  return (1.0 + spec.beta * spec.alpha / rec.t) * rec.f_gap + 0.5 * rec.y.squaredNorm();
}

/// E_m(t0) in closed form: x'(t0) = 0, so y(t0) = beta grad F(x0).
inline double mechanical_energy_initial(const Objective& obj, const Vec& x0, double t0,
                                        double alpha, double beta) {
  return (1.0 + beta * alpha / t0) * obj.gap(x0) +
         0.5 * beta * beta * obj.grad(x0).squaredNorm();
}

/// CSV export: `t,f_gap,grad_norm[,x_0..x_{n-1}]`, 17 significant digits.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                                 bool with_x = false) {
  os << "t,f_gap,grad_norm";
  if (with_x)
    for (Eigen::Index i = 0; i < traj.spec.x0.size(); ++i) os << ",x_" << i;
  os << "\n";
  char buf[64];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g%c", v, sep);
    os << buf;
  };
  for (const auto& rec : traj.records) {
    put(rec.t, ',');
    put(rec.f_gap, ',');
    put(rec.grad_norm, with_x ? ',' : '\n');
    if (with_x)
      for (Eigen::Index i = 0; i < rec.x.size(); ++i)
        put(rec.x(i), i + 1 == rec.x.size() ? '\n' : ',');
  }
}

}  // namespace inertia
