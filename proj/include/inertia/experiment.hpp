#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "inertia/analysis.hpp"
#include "inertia/dynamics.hpp"
#include "inertia/lyapunov.hpp"
#include "inertia/objective.hpp"
#include "inertia/schemes.hpp"

namespace inertia {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// config parsing

/// Row-major comma-separated numeric file, no header.
inline Mat load_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open csv file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError("ragged csv file: " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("empty csv file: " + path);
  Mat m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

inline Vec load_csv_vector(const std::string& path) {
  Mat m = load_csv_matrix(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw ConfigError("csv file is not a vector: " + path);
}

namespace detail {

inline Vec seeded_normal(std::uint64_t seed, int dim) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = gauss(rng);
  return v;
}

inline double require_number(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConfigError("missing or non-numeric field: " + key);
  return j[key].get<double>();
}

}  // namespace detail

/// x0 / x_star spec: either a literal array or {"seed": S, "dim": n} for a
/// seeded standard-normal draw.
inline Vec vec_from_json(const json& j, const std::string& what) {
  if (j.is_array()) {
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
    return v;
  }
  if (j.is_object() && j.contains("seed") && j.contains("dim"))
    return detail::seeded_normal(j["seed"].get<std::uint64_t>(), j["dim"].get<int>());
  throw ConfigError(what + " must be an array or {seed, dim}");
}

/// Objective block: {"name": "quadratic"|"power_norm"|"least_squares", ...}.
/// least_squares takes either A_csv/b_csv paths or {"n": N, "seed": S}
/// generating A with i.i.d. N(0,1)/sqrt(N) entries and a seeded normal b.
inline Objective objective_from_json(const json& j) {
  if (!j.contains("name")) throw ConfigError("objective block lacks a name");
  const std::string name = j["name"].get<std::string>();
  if (name == "quadratic") {
    const int dim = static_cast<int>(detail::require_number(j, "dim"));
    Vec xs = j.contains("x_star") ? vec_from_json(j["x_star"], "x_star") : Vec(Vec::Zero(dim));
    return make_quadratic(dim, detail::require_number(j, "mu"), xs);
  }
  if (name == "power_norm") {
    const int dim = static_cast<int>(detail::require_number(j, "dim"));
    Vec xs = j.contains("x_star") ? vec_from_json(j["x_star"], "x_star") : Vec(Vec::Zero(dim));
    return make_power_norm(dim, detail::require_number(j, "gamma"),
                           detail::require_number(j, "mu"), xs);
  }
  if (name == "least_squares") {
    if (j.contains("A_csv")) {
      Mat A = load_csv_matrix(j["A_csv"].get<std::string>());
      Vec b = load_csv_vector(j["b_csv"].get<std::string>());
      return make_least_squares(A, b);
    }
    const int n = static_cast<int>(detail::require_number(j, "n"));
    const std::uint64_t seed =
        j.contains("seed") ? j["seed"].get<std::uint64_t>() : 12345;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat A(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) A(r, c) = gauss(rng) / std::sqrt(double(n));
    Vec b(n);
    for (int r = 0; r < n; ++r) b(r) = gauss(rng);
    return make_least_squares(A, b);
  }
  throw ConfigError("unknown objective name: " + name);
}

inline DynamicsSpec dynamics_from_json(const json& j, const Objective& obj) {
  DynamicsSpec spec;
  const std::string variant =
      j.contains("variant") ? j["variant"].get<std::string>() : "din_avd";
  if (variant == "din_avd")
    spec.variant = Variant::din_avd;
  else if (variant == "avd")
    spec.variant = Variant::avd;
  else if (variant == "din_avd_modified")
    spec.variant = Variant::din_avd_modified;
  else
    throw ConfigError("unknown dynamics variant: " + variant);
  spec.alpha = detail::require_number(j, "alpha");
  spec.beta = j.contains("beta") ? detail::require_number(j, "beta") : 0.0;
  spec.t0 = detail::require_number(j, "t0");
  spec.t_end = detail::require_number(j, "t_end");
  if (!j.contains("x0")) throw ConfigError("dynamics block lacks x0");
  spec.x0 = vec_from_json(j["x0"], "x0");
  if (j.contains("sample_count")) spec.sample_count = j["sample_count"].get<int>();
  if (j.contains("uniform_step")) spec.uniform_step = j["uniform_step"].get<double>();
  if (j.contains("rtol")) spec.rtol = j["rtol"].get<double>();
  if (j.contains("atol")) spec.atol = j["atol"].get<double>();
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("dynamics block invalid: ") + e.what());
  }
  if (spec.x0.size() != obj.dim) throw ConfigError("x0 dimension does not match objective");
  return spec;
}

/// Scheme block. `s` may be a string of the form "c/L" (e.g. "1/L", "0.01/L")
/// and `beta` the string "sqrt_s"; `beta_list_over_sqrt_L` requests a sweep
/// with beta = v/sqrt(L) per entry.
inline std::vector<SchemeConfig> schemes_from_json(const json& j, const Objective& obj) {
  SchemeConfig base;
  base.alpha = j.contains("alpha") ? detail::require_number(j, "alpha") : 3.0;
  base.max_iter = static_cast<int>(detail::require_number(j, "max_iter"));
  if (!j.contains("x0")) throw ConfigError("scheme block lacks x0");
  base.x0 = vec_from_json(j["x0"], "x0");
  if (base.x0.size() != obj.dim) throw ConfigError("x0 dimension does not match objective");

  if (j.contains("s") && j["s"].is_string()) {
    const std::string text = j["s"].get<std::string>();
    std::size_t consumed = 0;
    double numer = 0.0;
    try {
      numer = std::stod(text, &consumed);
    } catch (const std::exception&) {
      consumed = std::string::npos;
    }
    if (consumed == std::string::npos || text.substr(consumed) != "/L" || numer <= 0.0)
      throw ConfigError("scheme field s: expected a number or \"c/L\" with c > 0");
    if (!obj.lipschitz_grad) throw ConfigError("s = c/L requires a Lipschitz certificate");
    base.s = numer / *obj.lipschitz_grad;
  } else {
    base.s = detail::require_number(j, "s");
  }

  std::vector<SchemeConfig> out;
  if (j.contains("beta_list_over_sqrt_L")) {
    if (!obj.lipschitz_grad)
      throw ConfigError("beta_list_over_sqrt_L requires a Lipschitz certificate");
    for (const auto& v : j["beta_list_over_sqrt_L"]) {
      SchemeConfig cfg = base;
      cfg.beta = v.get<double>() / std::sqrt(*obj.lipschitz_grad);
      out.push_back(cfg);
    }
  } else if (j.contains("beta") && j["beta"].is_string()) {
    if (j["beta"].get<std::string>() != "sqrt_s")
      throw ConfigError("scheme field beta: expected a number or \"sqrt_s\"");
    base.beta = std::sqrt(base.s);
    out.push_back(base);
  } else {
    base.beta = j.contains("beta") ? detail::require_number(j, "beta") : 0.0;
    out.push_back(base);
  }
  for (auto& cfg : out)
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("scheme block invalid: ") + e.what());
    }
  return out;
}

// ---------------------------------------------------------------------------
// claim evaluation

struct ClaimResult {
  std::string id;
  bool pass = false;
  json details;
};

struct ExperimentResult {
  bool all_pass = true;
  std::vector<ClaimResult> claims;
  std::vector<std::string> artifacts;  // files written, relative to out dir
};

namespace detail {

inline Series series_from_trajectory(const Trajectory& traj, const std::string& kind) {
  Series s;
  s.reserve(traj.records.size());
  for (const auto& rec : traj.records) {
    if (kind == "f_gap")
      s.emplace_back(rec.t, rec.f_gap);
    else if (kind == "grad_norm_sq")
      s.emplace_back(rec.t, rec.grad_norm * rec.grad_norm);
    else
      throw ConfigError("unknown series kind: " + kind);
  }
  return s;
}

inline Series series_from_log(const IterateLog& log) {
  Series s;
  s.reserve(log.records.size());
  for (const auto& rec : log.records) s.emplace_back(double(rec.k), rec.f_gap);
  return s;
}

/// Monotone-decrease scan; returns the worst relative/absolute violation.
inline double worst_increase(const Series& s) {
  double worst = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i)
    worst = std::max(worst, s[i].second - s[i - 1].second);
  return worst;
}

}  // namespace detail

/// Context handed to claim evaluators: exactly one of `traj` / `logs` is set.
struct RunContext {
  const Objective* obj = nullptr;
  const Trajectory* traj = nullptr;
  const std::vector<IterateLog>* logs = nullptr;
};

inline ClaimResult evaluate_claim(const json& claim, const RunContext& ctx);

// --- individual claim evaluators -------------------------------------------

namespace claims {

inline ClaimResult fit_rate_claim(const json& c, const RunContext& ctx) {
  ClaimResult r{"fit_rate", false, {}};
  const std::string kind = c.value("series", "f_gap");
  const auto mode = c.value("mode", "pointwise") == std::string("windowed_max")
                        ? FitMode::windowed_max
                        : FitMode::pointwise;
  Series s = detail::series_from_trajectory(*ctx.traj, kind);
  auto [lo, hi] = last_positive_decade(s);
  const RateFit fit = fit_rate(s, lo, hi, mode);
  const double slope_max = detail::require_number(c, "slope_max");
  r.pass = fit.exponent <= slope_max;
  r.details = {{"series", kind},
               {"fitted_exponent", fit.exponent},
               {"slope_max", slope_max},
               {"window", {fit.t_lo, fit.t_hi}},
               {"residual_rms", fit.residual_rms},
               {"mode", fit.mode == FitMode::windowed_max ? "windowed_max" : "pointwise"}};
  if (c.contains("theoretical_exponent"))
    r.details["theoretical_exponent"] = c["theoretical_exponent"];
  return r;
}

inline ClaimResult scheme_rate_claim(const json& c, const RunContext& ctx) {
  ClaimResult r{"scheme_rate", false, {}};
  const auto& log = ctx.logs->at(c.value("run_index", 0));
  Series s = detail::series_from_log(log);
  const double k_lo = c.value("k_min", 100.0), k_hi = c.value("k_max", double(log.cfg.max_iter));
  const RateFit fit = fit_rate(s, k_lo, k_hi, FitMode::windowed_max);
  const double slope_max = detail::require_number(c, "slope_max");
  r.pass = fit.exponent <= slope_max && !log.diverged;
  r.details = {{"fitted_exponent", fit.exponent},
               {"slope_max", slope_max},
               {"window", {k_lo, k_hi}},
               {"diverged", log.diverged},
               {"guarantee", log.guarantee}};
  return r;
}

inline ClaimResult weighted_integral_claim(const json& c, const RunContext& ctx) {
  ClaimResult r{"weighted_integral", false, {}};
  const std::string kind = c.value("series", "grad_norm_sq");
  const double delta = detail::require_number(c, "delta");
  const bool must_converge = c.value("assert_converged", true);
  const auto diag =
      cumulative_weighted_integral(detail::series_from_trajectory(*ctx.traj, kind), delta);
  r.pass = must_converge ? diag.converged : true;
  r.details = {{"series", kind},
               {"delta", delta},
               {"converged", diag.converged},
               {"tail_fraction", diag.tail_fraction},
               {"total", diag.cumulative.back().second},
               {"asserted", must_converge}};
  return r;
}

inline ClaimResult scheme_sum_claim(const json& c, const RunContext& ctx) {
  ClaimResult r{"scheme_sum_converged", false, {}};
  const auto& log = ctx.logs->at(c.value("run_index", 0));
  const double delta = c.value("delta", 2.0);
  Series s;
  for (const auto& rec : log.records)
    s.emplace_back(double(rec.k), rec.grad_norm * rec.grad_norm);
  const auto diag = cumulative_weighted_integral(s, delta);
  r.pass = diag.converged;
  r.details = {{"delta", delta},
               {"converged", diag.converged},
               {"tail_fraction", diag.tail_fraction},
               {"total", diag.cumulative.back().second}};
  return r;
}

inline ClaimResult bound_sharp_claim(const json& c, const RunContext& ctx) {
  ClaimResult r{"bound_sharp_general", false, {}};
  const Objective& obj = *ctx.obj;
  const Trajectory& traj = *ctx.traj;
  if (!obj.gamma_flat || !obj.mu) throw ConfigError("bound_sharp_general needs geometry metadata");
  const auto sc = SharpConstants::make(*obj.gamma_flat, traj.spec.alpha, traj.spec.beta, *obj.mu);
  const double e_m0 = mechanical_energy_initial(obj, traj.spec.x0, traj.spec.t0,
                                                traj.spec.alpha, traj.spec.beta);
  const double slack = c.value("slack", 1e-9);
  double worst = std::numeric_limits<double>::infinity();
  int checked = 0;
  for (const auto& rec : traj.records) {
    if (rec.t < sc.t1) continue;
    const double margin = bound_sharp_general(rec.t, sc, e_m0, traj.spec.t0) - rec.f_gap;
    worst = std::min(worst, margin);
    ++checked;
  }
  const double fc = sharp_K_factor_compact(sc), fe = sharp_K_factor_expanded(sc);
  const bool factors_agree = std::abs(fc - fe) <= 1e-12 * std::abs(fc);
  r.pass = checked > 0 && worst >= -slack && factors_agree;
  r.details = {{"t1", sc.t1},
               {"rate_exponent", sc.rate_exponent()},
               {"checked_samples", checked},
               {"worst_margin", worst},
               {"factor_forms_agree", factors_agree},
               {"K", sharp_K_closed_form(sc, e_m0)}};
  return r;
}

inline ClaimResult bound_critical_claim(const json& c, const RunContext& ctx) {
  ClaimResult r{"bound_sharp_critical", false, {}};
  const Objective& obj = *ctx.obj;
  const Trajectory& traj = *ctx.traj;
  const auto sc = SharpConstants::make(*obj.gamma_flat, traj.spec.alpha, traj.spec.beta, *obj.mu);
  if (!sc.critical()) throw ConfigError("bound_sharp_critical: alpha is not 1 + 2/gamma");
  const double e_m0 = mechanical_energy_initial(obj, traj.spec.x0, traj.spec.t0,
                                                traj.spec.alpha, traj.spec.beta);
  const double slack = c.value("slack", 1e-9);
  double worst = std::numeric_limits<double>::infinity();
  int checked = 0;
  for (const auto& rec : traj.records) {
    if (rec.t < traj.spec.t0 + traj.spec.beta) continue;
    worst = std::min(worst, bound_sharp_critical(rec.t, sc, e_m0, traj.spec.t0) - rec.f_gap);
    ++checked;
  }
  r.pass = checked > 0 && worst >= -slack;
  r.details = {{"checked_samples", checked}, {"worst_margin", worst}};
  return r;
}

inline ClaimResult averaged_rate_claim(const json& c, const RunContext& ctx) {
  ClaimResult r{"averaged_rate", false, {}};
  const double delta = detail::require_number(c, "delta");
  const double slope_max = detail::require_number(c, "slope_max");
  const Trajectory& traj = *ctx.traj;
  const double t_end = traj.records.back().t;
  Series avg;
  double worst_jensen = std::numeric_limits<double>::infinity();
  for (const auto& rec : traj.records) {
    if (rec.t < 0.05 * t_end) continue;  // need [t/2, t] well covered
    const auto pt = averaged_point(traj, rec.t, delta, *ctx.obj);
    avg.emplace_back(rec.t, pt.f_gap_z);
    worst_jensen = std::min(worst_jensen, pt.mean_f_gap - pt.f_gap_z);
  }
  auto [lo, hi] = last_positive_decade(avg);
  const RateFit fit = fit_rate(avg, lo, hi);
  const bool jensen_ok = worst_jensen >= -1e-12;
  r.pass = fit.exponent <= slope_max && jensen_ok;
  r.details = {{"delta", delta},
               {"fitted_exponent", fit.exponent},
               {"slope_max", slope_max},
               {"jensen_ok", jensen_ok},
               {"jensen_worst_margin", worst_jensen}};
  return r;
}

inline ClaimResult windowed_inf_rate_claim(const json& c, const RunContext& ctx) {
  ClaimResult r{"windowed_inf_rate", false, {}};
  const double slope_max = detail::require_number(c, "slope_max");
  Series s = detail::series_from_trajectory(*ctx.traj, "f_gap");
  const double t_end = s.back().first;
  Series infs;
  for (const auto& [t, f] : s) {
    if (t < 0.05 * t_end) continue;
    infs.emplace_back(t, windowed_inf(s, t));
  }
  // default window: last decade with values above the floor; an explicit
  // t_min/t_max pair overrides it (useful when the gap swings across the floor)
  double lo, hi;
  if (c.contains("t_min") && c.contains("t_max")) {
    lo = detail::require_number(c, "t_min");
    hi = detail::require_number(c, "t_max");
  } else {
    std::tie(lo, hi) = last_positive_decade(infs);
  }
  const RateFit fit = fit_rate(infs, lo, hi);
  r.pass = fit.exponent <= slope_max;
  r.details = {{"fitted_exponent", fit.exponent},
               {"slope_max", slope_max},
               {"window", {fit.t_lo, fit.t_hi}}};
  return r;
}

inline ClaimResult liminf_claim(const json& c, const RunContext& ctx) {
  ClaimResult r{"liminf_shrinks", false, {}};
  const double delta = detail::require_number(c, "delta");
  Series full = detail::series_from_trajectory(*ctx.traj, "f_gap");
  Series early;
  const double cut = full.back().first / 10.0;
  for (const auto& pr : full)
    if (pr.first <= cut) early.push_back(pr);
  const double v_full = check_liminf_scaling(full, delta);
  const double v_early = check_liminf_scaling(early, delta);
  r.pass = v_full < v_early;
  r.details = {{"delta", delta},
               {"value_full_horizon", v_full},
               {"value_tenth_horizon", v_early}};
  return r;
}

inline ClaimResult flat_v_claim(const json& c, const RunContext& ctx) {
  ClaimResult r{"flat_v_bounded", false, {}};
  const Objective& obj = *ctx.obj;
  const Trajectory& traj = *ctx.traj;
  if (!obj.gamma_flat || !obj.mu) throw ConfigError("flat_v_bounded needs geometry metadata");
  const auto fc = FlatConstants::make(*obj.gamma_flat, obj.gamma_growth.value_or(*obj.gamma_flat),
                                      traj.spec.alpha, traj.spec.beta, *obj.mu);
  const double t_start = c.value("t_start", std::max(traj.spec.t0, fc.t_m));
  double vmax = 0.0, t_argmax = 0.0, v_end = 0.0;
  for (const auto& rec : traj.records) {
    if (rec.t < t_start) continue;
    const double v = flat_v(rec.t, rec.f_gap, fc);
    v_end = v;
    if (v > vmax) {
      vmax = v;
      t_argmax = rec.t;
    }
  }
  const double t_end = traj.records.back().t;
  const bool early_max = t_argmax <= 0.5 * t_end;
  const bool plateau = vmax > 0.0 && v_end >= 0.99 * vmax;
  r.pass = vmax > 0.0 && (early_max || plateau);
  r.details = {{"v_max", vmax},
               {"t_argmax", t_argmax},
               {"v_at_horizon", v_end},
               {"early_max", early_max},
               {"plateau", plateau}};
  return r;
}

inline ClaimResult energy_monotone_claim(const json& c, const RunContext& ctx) {
  ClaimResult r{"energy_monotone", false, {}};
  const std::string which = c.value("which", "mechanical");
  const Objective& obj = *ctx.obj;
  const Trajectory& traj = *ctx.traj;
  Series s;
  double slack = 0.0;
  if (which == "mechanical") {
    for (const auto& rec : traj.records)
      s.emplace_back(rec.t, mechanical_energy(rec, traj.spec));
    slack = c.value("slack_rel", 1e-8) * s.front().second;
  } else if (which == "H_sharp" || which == "G_sharp") {
    const auto sc =
        SharpConstants::make(*obj.gamma_flat, traj.spec.alpha, traj.spec.beta, *obj.mu);
    s = which == "H_sharp" ? series_H_sharp(traj, obj, sc) : series_G_sharp(traj, obj, sc);
    slack = c.value("slack_rel", 1e-6) * std::abs(s.front().second);
  } else {
    throw ConfigError("energy_monotone: unknown energy " + which);
  }
  const double worst = detail::worst_increase(s);
  r.pass = worst <= slack;
  r.details = {{"which", which},
               {"worst_increase", worst},
               {"slack", slack},
               {"initial_value", s.front().second},
               {"final_value", s.back().second}};
  return r;
}

inline ClaimResult oscillation_claim(const json& c, const RunContext& ctx) {
  ClaimResult r{"oscillation_nonincreasing", false, {}};
  const int from_iter = c.value("from_iter", 100);
  std::vector<int> indices;
  if (c.contains("run_indices"))
    for (const auto& v : c["run_indices"]) indices.push_back(v.get<int>());
  else
    for (std::size_t i = 0; i < ctx.logs->size(); ++i) indices.push_back(int(i));
  std::vector<int> counts;
  json per_run = json::array();
  for (int i : indices) {
    const auto m = oscillation_metric(ctx.logs->at(i), from_iter);
    counts.push_back(m.local_max_count);
    per_run.push_back({{"beta", ctx.logs->at(i).cfg.beta},
                       {"local_max_count", m.local_max_count},
                       {"total_variation", m.total_variation}});
  }
  r.pass = true;  // non-increasing in beta order
  for (std::size_t i = 1; i < counts.size(); ++i)
    if (counts[i] > counts[i - 1]) r.pass = false;
  r.details = {{"from_iter", from_iter}, {"runs", per_run}};
  return r;
}

}  // namespace claims

inline ClaimResult evaluate_claim(const json& claim, const RunContext& ctx) {
  if (!claim.contains("id")) throw ConfigError("claim without id");
  const std::string id = claim["id"].get<std::string>();
  const bool needs_traj = id != "scheme_rate" && id != "scheme_sum_converged" &&
                          id != "oscillation_nonincreasing";
  if (needs_traj && !ctx.traj)
    throw ConfigError("claim " + id + " requires a dynamics run");
  if (!needs_traj && !ctx.logs)
    throw ConfigError("claim " + id + " requires a scheme run");
  if (id == "fit_rate") return claims::fit_rate_claim(claim, ctx);
  if (id == "scheme_rate") return claims::scheme_rate_claim(claim, ctx);
  if (id == "weighted_integral") return claims::weighted_integral_claim(claim, ctx);
  if (id == "scheme_sum_converged") return claims::scheme_sum_claim(claim, ctx);
  if (id == "bound_sharp_general") return claims::bound_sharp_claim(claim, ctx);
  if (id == "bound_sharp_critical") return claims::bound_critical_claim(claim, ctx);
  if (id == "averaged_rate") return claims::averaged_rate_claim(claim, ctx);
  if (id == "windowed_inf_rate") return claims::windowed_inf_rate_claim(claim, ctx);
  if (id == "liminf_shrinks") return claims::liminf_claim(claim, ctx);
  if (id == "flat_v_bounded") return claims::flat_v_claim(claim, ctx);
  if (id == "energy_monotone") return claims::energy_monotone_claim(claim, ctx);
  if (id == "oscillation_nonincreasing") return claims::oscillation_claim(claim, ctx);
  throw ConfigError("unknown claim id: " + id);
}

// ---------------------------------------------------------------------------
// constants dump and the runner

inline json sharp_constants_json(const SharpConstants& c) {
  json j = {{"gamma", c.gamma},   {"alpha", c.alpha}, {"beta", c.beta},
            {"mu", c.mu},         {"lambda", c.lambda}, {"k_alpha", c.k_alpha},
            {"rate_exponent", c.rate_exponent()}, {"critical", c.critical()}};
  if (!c.critical()) {
    j["c0"] = c.c0;
    j["r_star"] = c.r_star;
    j["c1"] = c.c1;
    j["c2"] = c.c2;
    j["t1"] = c.t1;
    j["poly_residual"] = std::abs(r_star_poly(c.r_star, c.c0));
  }
  return j;
}

inline json flat_constants_json(const FlatConstants& c) {
  return {{"gamma1", c.gamma1}, {"gamma2", c.gamma2}, {"alpha", c.alpha},
          {"beta", c.beta},     {"mu", c.mu},         {"p", c.p},
          {"lambda", c.lambda}, {"xi", c.xi},         {"c1_flat", c.c1_flat},
          {"k_growth", c.k_growth}, {"t_m", c.t_m},
          {"rate_exponent", c.rate_exponent()}};
}

/// Executes one experiment config: runs the dynamics or scheme, writes
/// trajectory/iterate CSVs plus constants and analysis JSON into `out_dir`,
/// and evaluates the requested claims.
inline ExperimentResult run_experiment(const json& config, const std::string& out_dir) {
  if (config.contains("dynamics") == config.contains("scheme"))
    throw ConfigError("config must contain exactly one of dynamics/scheme");
  if (!config.contains("objective")) throw ConfigError("config lacks an objective block");
  std::filesystem::create_directories(out_dir);
  const auto path = [&](const std::string& f) { return out_dir + "/" + f; };

  const Objective obj = objective_from_json(config["objective"]);
  ExperimentResult result;
  RunContext ctx;
  ctx.obj = &obj;

  Trajectory traj;
  std::vector<IterateLog> logs;
  json constants;
  constants["objective"] = {{"name", obj.name}, {"dim", obj.dim}, {"f_star", obj.f_star}};
  if (obj.mu) constants["objective"]["mu"] = *obj.mu;
  if (obj.lipschitz_grad) constants["objective"]["lipschitz_grad"] = *obj.lipschitz_grad;

  if (config.contains("dynamics")) {
    const DynamicsSpec spec = dynamics_from_json(config["dynamics"], obj);
    traj = integrate(spec, obj);
    ctx.traj = &traj;
    {
      std::ofstream os(path("trajectory.csv"));
      write_trajectory_csv(os, traj, config["dynamics"].value("csv_with_x", false));
      result.artifacts.push_back("trajectory.csv");
    }
    if (obj.gamma_flat && obj.gamma_growth && obj.mu) {
      if (*obj.gamma_growth == 2.0)
        constants["sharp"] = sharp_constants_json(
            SharpConstants::make(*obj.gamma_flat, spec.alpha, spec.beta, *obj.mu));
      else
        constants["flat"] = flat_constants_json(
            FlatConstants::make(*obj.gamma_flat, *obj.gamma_growth, spec.alpha, spec.beta,
                                *obj.mu));
      constants["e_m_t0"] =
          mechanical_energy_initial(obj, spec.x0, spec.t0, spec.alpha, spec.beta);
    }
  } else {
    logs.clear();
    for (auto& cfg : schemes_from_json(config["scheme"], obj)) logs.push_back(igahd_run(cfg, obj));
    json manifest = json::array();
    for (std::size_t i = 0; i < logs.size(); ++i) {
      std::ostringstream name;
      name << "iterates_" << i << ".csv";
      std::ofstream os(path(name.str()));
      write_iterates_csv(os, logs[i]);
      result.artifacts.push_back(name.str());
      manifest.push_back({{"file", name.str()},
                          {"alpha", logs[i].cfg.alpha},
                          {"beta", logs[i].cfg.beta},
                          {"s", logs[i].cfg.s},
                          {"guarantee", logs[i].guarantee},
                          {"diverged", logs[i].diverged},
                          {"iterations", logs[i].records.size()}});
    }
    constants["sweep"] = manifest;
    ctx.logs = &logs;
  }
  {
    std::ofstream os(path("constants.json"));
    os << constants.dump(2) << "\n";
    result.artifacts.push_back("constants.json");
  }

  json analysis;
  analysis["claims"] = json::array();
  if (config.contains("claims"))
    for (const auto& claim : config["claims"]) {
      ClaimResult cr = evaluate_claim(claim, ctx);
      result.all_pass = result.all_pass && cr.pass;
      result.claims.push_back(cr);
      json entry = {{"id", cr.id}, {"pass", cr.pass}, {"details", cr.details}};
      if (claim.contains("label")) entry["label"] = claim["label"];
      analysis["claims"].push_back(entry);
    }
  analysis["all_pass"] = result.all_pass;
  {
    std::ofstream os(path("analysis.json"));
    os << analysis.dump(2) << "\n";
    result.artifacts.push_back("analysis.json");
  }
  return result;
}

// ---------------------------------------------------------------------------
// presets

inline std::vector<std::pair<std::string, std::string>> preset_catalog() {
  return {
      {"thm1-sharp-quadratic",
       "quadratic growth, alpha above critical: sharp rate, explicit bound, integrability"},
      {"thm1-critical-quadratic", "critical damping alpha = 1 + 2/gamma: 1/t^2-type bound"},
      {"thm2-strong-quadratic",
       "quadratic growth, alpha = 3: improved rate, averaged/inf decay, liminf proxy"},
      {"thm3-flat-power4", "flat geometry gamma = 4: rate, integrability, bounded v"},
      {"igahd-least-squares", "discrete scheme on least squares: k^-2 rate, summability"},
      {"figure1-beta-sweep", "least squares beta sweep: oscillation damping"},
  };
}

inline json preset_config(const std::string& name) {
  if (name == "thm1-sharp-quadratic") {
    return {
        {"objective", {{"name", "quadratic"}, {"dim", 2}, {"mu", 1.0}, {"x_star", {0.0, 0.0}}}},
        {"dynamics",
         {{"variant", "din_avd"}, {"alpha", 4.0}, {"beta", 0.5}, {"t0", 1.0},
          {"t_end", 1e4}, {"x0", {1.0, 1.0}}, {"sample_count", 400}}},
        {"claims",
         {{{"id", "fit_rate"}, {"slope_max", -3.7}, {"theoretical_exponent", -4.0}},
          {{"id", "bound_sharp_general"}, {"slack", 1e-9}},
          {{"id", "weighted_integral"}, {"series", "grad_norm_sq"}, {"delta", 4.0}},
          {{"id", "weighted_integral"}, {"series", "grad_norm_sq"}, {"delta", 6.0},
           {"assert_converged", false}},
          {{"id", "energy_monotone"}, {"which", "mechanical"}},
          {{"id", "energy_monotone"}, {"which", "H_sharp"}},
          {{"id", "energy_monotone"}, {"which", "G_sharp"}}}}};
  }
  if (name == "thm1-critical-quadratic") {
    return {
        {"objective", {{"name", "quadratic"}, {"dim", 2}, {"mu", 1.0}, {"x_star", {0.0, 0.0}}}},
        {"dynamics",
         {{"variant", "din_avd"}, {"alpha", 2.0}, {"beta", 1.0}, {"t0", 1.0},
          {"t_end", 500.0}, {"x0", {1.0, 1.0}}, {"sample_count", 400}}},
        {"claims",
         {{{"id", "bound_sharp_critical"}, {"slack", 1e-9}},
          {{"id", "energy_monotone"}, {"which", "mechanical"}}}}};
  }
  if (name == "thm2-strong-quadratic") {
    // mu deliberately small: with beta > 0 quadratics decay exponentially and
    // the gap underflows well before t = 1e4 at mu = 1.
    return {
        {"objective", {{"name", "quadratic"}, {"dim", 2}, {"mu", 0.002}, {"x_star", {0.0, 0.0}}}},
        {"dynamics",
         {{"variant", "din_avd"}, {"alpha", 3.0}, {"beta", 1.0}, {"t0", 1.0},
          {"t_end", 1e4}, {"x0", {1.0, 1.0}}, {"sample_count", 400}}},
        {"claims",
         {{{"id", "fit_rate"}, {"slope_max", -2.6}},
          {{"id", "weighted_integral"}, {"series", "f_gap"}, {"delta", 2.9}},
          {{"id", "weighted_integral"}, {"series", "f_gap"}, {"delta", 2.5}},
          {{"id", "averaged_rate"}, {"delta", 2.9}, {"slope_max", -3.6}},
          {{"id", "windowed_inf_rate"}, {"slope_max", -3.6}},
          {{"id", "liminf_shrinks"}, {"delta", 2.9}},
          {{"id", "energy_monotone"}, {"which", "mechanical"}}}}};
  }
  if (name == "thm3-flat-power4") {
    return {
        {"objective",
         {{"name", "power_norm"}, {"dim", 2}, {"gamma", 4.0}, {"mu", 0.5},
          {"x_star", {0.0, 0.0}}}},
        {"dynamics",
         {{"variant", "din_avd"}, {"alpha", 3.0}, {"beta", 1.0}, {"t0", 1.0},
          {"t_end", 1e4}, {"x0", {3.0, 1.5}}, {"sample_count", 400}}},
        {"claims",
         {{{"id", "fit_rate"}, {"slope_max", -3.7}, {"theoretical_exponent", -4.0},
           {"mode", "windowed_max"}},
          {{"id", "weighted_integral"}, {"series", "grad_norm_sq"}, {"delta", 4.0}},
          {{"id", "flat_v_bounded"}},
          {{"id", "windowed_inf_rate"}, {"slope_max", -10.0 / 3.0 + 0.3},
           {"t_min", 1e3}, {"t_max", 1e4}},
          {{"id", "energy_monotone"}, {"which", "mechanical"}}}}};
  }
  if (name == "igahd-least-squares") {
    return {
        {"objective", {{"name", "least_squares"}, {"n", 50}, {"seed", 20240901}}},
        {"scheme",
         {{"alpha", 3.0}, {"s", "1/L"}, {"beta", "sqrt_s"}, {"max_iter", 5000},
          {"x0", {{"seed", 7}, {"dim", 50}}}}},
        {"claims",
         {{{"id", "scheme_rate"}, {"slope_max", -1.8}, {"k_min", 100}, {"k_max", 5000}},
          {{"id", "scheme_sum_converged"}, {"delta", 2.0}}}}};
  }
  if (name == "figure1-beta-sweep") {
    // Random square least squares, A entries i.i.d. N(0,1)/sqrt(N). The small
    // step keeps the moderate betas inside the stable regime of the recursion;
    // the largest ones still blow up, and the sweep manifest records that.
    return {
        {"objective", {{"name", "least_squares"}, {"n", 500}, {"seed", 20240901}}},
        {"scheme",
         {{"alpha", 3.0}, {"s", "0.01/L"},
          {"beta_list_over_sqrt_L", {0.0, 1.0, 10.0, 100.0, 200.0}},
          {"max_iter", 3000}, {"x0", {{"seed", 7}, {"dim", 500}}}}},
        {"claims",
         {{{"id", "oscillation_nonincreasing"}, {"from_iter", 100},
           {"run_indices", {0, 1, 2}}}}}};
  }
  throw ConfigError("unknown preset: " + name);
}

}  // namespace inertia
