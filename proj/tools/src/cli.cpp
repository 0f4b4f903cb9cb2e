#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "frontlab/coefficients.hpp"
#include "frontlab/coefficients_json.hpp"
#include "frontlab/eigen.hpp"
#include "frontlab/error.hpp"
#include "frontlab/numerics.hpp"
#include "frontlab/ode.hpp"
#include "frontlab/pde.hpp"
#include "frontlab/speeds.hpp"

namespace frontlab::cli {

using nlohmann::json;
using coefficients::CoefficientSet;

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// Strict reader for one config object: every key must be consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_ + ": expected an object");
  }
  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key, double fallback) {
    return optional_number(key).value_or(fallback);
  }
  std::optional<double> optional_number(const std::string& key) {
    if (!take(key)) return std::nullopt;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ValidationError(where(key) + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ValidationError(where(key) + ": must be finite");
    return x;
  }
  double required_number(const std::string& key) {
    auto x = optional_number(key);
    if (!x) throw ValidationError(where(key) + ": required");
    return *x;
  }
  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!take(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ValidationError(where(key) + ": expected a nonnegative integer");
    }
    return v.get<std::size_t>();
  }
  bool flag(const std::string& key, bool fallback) {
    if (!take(key)) return fallback;
    if (!j_.at(key).is_boolean()) throw ValidationError(where(key) + ": expected true or false");
    return j_.at(key).get<bool>();
  }
  std::optional<std::string> text(const std::string& key) {
    if (!take(key)) return std::nullopt;
    if (!j_.at(key).is_string()) throw ValidationError(where(key) + ": expected a string");
    return j_.at(key).get<std::string>();
  }
  std::optional<std::vector<double>> numbers(const std::string& key) {
    if (!take(key)) return std::nullopt;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ValidationError(where(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        throw ValidationError(where(key) + ": expected an array of finite numbers");
      }
      out.push_back(e.get<double>());
    }
    return out;
  }
  const json& raw(const std::string& key) {
    take(key);
    return j_.at(key);
  }
  const std::string& path() const { return path_; }

  /// Rejects whatever was not read.
  void done() const {
    for (const auto& item : j_.items()) {
      if (!used_.count(item.key())) {
        throw ValidationError(path_ + ": unknown key '" + item.key() + "'");
      }
    }
  }

 private:
  bool take(const std::string& key) {
    if (!j_.contains(key)) return false;
    used_.insert(key);
    return true;
  }
  std::string where(const std::string& key) const { return path_ + "." + key; }

  json j_;
  std::string path_;
  std::set<std::string> used_;
};

// Optional nested object; absent means all defaults.
Section sub(Section& parent, const std::string& key, const std::string& path) {
  return Section(parent.has(key) ? parent.raw(key) : json::object(), path);
}

void positive(double x, const std::string& what) {
  if (!(x > 0.0)) throw ValidationError(what + " must be > 0");
}

// Coefficient payloads ------------------------------------------------------

ode::HomParams read_hom_params(Section s, double& period) {
  ode::HomParams p;
  p.sigma = s.number("sigma", p.sigma);
  p.r_u = s.number("r_u", p.r_u);
  p.r_v = s.number("r_v", p.r_v);
  p.kappa_u = s.number("kappa_u", p.kappa_u);
  p.kappa_v = s.number("kappa_v", p.kappa_v);
  p.mu_u = s.number("mu_u", p.mu_u);
  p.mu_v = s.number("mu_v", p.mu_v);
  period = s.number("period", 1.0);
  s.done();
  p.validate();
  positive(period, "hom_params.period");
  return p;
}

CoefficientSet read_sis(Section s) {
  const double N = s.required_number("N");
  const double period = s.required_number("period");
  positive(period, "sis.period");
  auto spec = [&](const std::string& key) {
    if (!s.has(key)) throw ValidationError("sis." + key + ": required");
    return coefficients::spec_from_json(s.raw(key));
  };
  coefficients::SisRates rates{spec("beta1"), spec("beta2"), spec("gamma1"),
                               spec("gamma2"), spec("mu1"),   spec("mu2")};
  if (s.has("sigma")) rates.sigma = coefficients::spec_from_json(s.raw("sigma"));
  s.done();
  return coefficients::from_sis(N, rates, period);
}

struct Payload {
  CoefficientSet set;
  std::optional<ode::HomParams> hom;  // only for hom_params configs
};

Payload read_payload(Section& top) {
  const int given = int(top.has("coefficients")) + int(top.has("sis")) + int(top.has("hom_params"));
  if (given != 1) {
    throw ValidationError("config: give exactly one of 'coefficients', 'sis', 'hom_params'");
  }
  if (top.has("coefficients")) return {coefficients::set_from_json(top.raw("coefficients")), {}};
  if (top.has("sis")) return {read_sis(Section(top.raw("sis"), "sis")), {}};
  double period = 1.0;
  const auto p = read_hom_params(Section(top.raw("hom_params"), "hom_params"), period);
  return {ode::constant_set(p, period), p};
}

// Settings sections ---------------------------------------------------------

eigen::GridSpec read_grid(Section s) {
  eigen::GridSpec g;
  g.n_cells = s.count("n_cells", g.n_cells);
  g.refine_tolerance = s.number("refine_tolerance", g.refine_tolerance);
  s.done();
  if (g.n_cells < eigen::min_cells || g.n_cells > eigen::max_cells) {
    throw ValidationError("grid.n_cells must lie in [16, 2^20]");
  }
  return g;
}

struct LambdaGrid {
  double min, max, step;
};

LambdaGrid read_lambda_grid(Section& s, LambdaGrid g) {
  g.min = s.number("lambda_min", g.min);
  g.max = s.number("lambda_max", g.max);
  g.step = s.number("lambda_step", g.step);
  positive(g.step, s.path() + ".lambda_step");
  if (!(g.max >= g.min)) throw ValidationError(s.path() + ": need lambda_min <= lambda_max");
  if (eigen::grid_count(g.min, g.max, g.step) > 100000) {
    throw ValidationError(s.path() + ": more than 100000 lambda values");
  }
  return g;
}

std::vector<double> lambda_values(const LambdaGrid& g) {
  const std::size_t n = eigen::grid_count(g.min, g.max, g.step);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = g.min + g.step * static_cast<double>(i);
  return out;
}

struct SpeedSettings {
  speeds::SpeedOptions options;
  LambdaGrid curve{-5.0, 5.0, 0.1};
  bool hair_trigger = false;
};

SpeedSettings read_speed(Section s) {
  SpeedSettings out;
  out.options.lambda_floor = s.number("lambda_floor", out.options.lambda_floor);
  out.options.lambda_tolerance = s.number("lambda_tolerance", out.options.lambda_tolerance);
  out.hair_trigger = s.flag("hair_trigger", false);
  positive(out.options.lambda_floor, "speed.lambda_floor");
  positive(out.options.lambda_tolerance, "speed.lambda_tolerance");
  {
    Section c = sub(s, "curve", "speed.curve");
    out.curve = read_lambda_grid(c, out.curve);
    c.done();
  }
  s.done();
  return out;
}

pde::StationaryOptions read_stationary(Section s) {
  pde::StationaryOptions o;
  o.n_points = s.count("n_points", o.n_points);
  o.tol = s.number("tol", o.tol);
  o.T_max = s.number("T_max", o.T_max);
  o.dt = s.number("dt", o.dt);
  o.check_hair_trigger = s.flag("check_hair_trigger", o.check_hair_trigger);
  s.done();
  if (o.n_points < 16) throw ValidationError("stationary.n_points must be at least 16");
  positive(o.tol, "stationary.tol");
  positive(o.T_max, "stationary.T_max");
  positive(o.dt, "stationary.dt");
  return o;
}

// Rendering helpers ---------------------------------------------------------

template <class Writer>
std::string csv(const std::string& hash, Writer&& write) {
  std::ostringstream out;
  out << "# config_hash=" << hash << '\n';
  write(out);
  return out.str();
}

std::string render(json j, const std::string& hash) {
  j["config_hash"] = hash;
  return j.dump(2) + "\n";
}


template <class T>
json optional_json(const std::optional<T>& x) {
  return x ? json(*x) : json(nullptr);
}

json equilibrium_json(const ode::Equilibrium& eq) {
  return {{"u", eq.u}, {"v", eq.v}, {"Q", eq.Q}, {"S", eq.S}, {"residual", eq.residual}};
}

json jacobian_json(const ode::Jacobian& jac) {
  return {{"a", jac.a},
          {"b", jac.b},
          {"c", jac.c},
          {"d", jac.d},
          {"trace", jac.trace()},
          {"det", jac.det()}};
}

std::string_view sign_name(ode::Sign s) {
  switch (s) {
    case ode::Sign::negative:
      return "negative";
    case ode::Sign::zero:
      return "zero";
    case ode::Sign::positive:
      return "positive";
  }
  return "unknown";
}

std::string describe(const std::exception& e);

// Commands ------------------------------------------------------------------

Outputs run_eigen(Section& top, const std::string& hash, std::ostream* log) {
  const Payload payload = read_payload(top);
  const auto grid = read_grid(sub(top, "grid", "grid"));
  Section e = sub(top, "eigen", "eigen");
  const LambdaGrid lg = read_lambda_grid(e, {-3.0, 3.0, 0.1});
  const auto profiles = e.numbers("profiles").value_or(std::vector<double>{});
  e.done();
  top.done();

  Outputs out;
  const auto curve = eigen::k_curve(payload.set, lg.min, lg.max, lg.step, grid);
  out["_kcurve.csv"] = csv(hash, [&](std::ostream& os) { eigen::write_k_curve_csv(os, curve); });
  eigen::KEvaluator k(payload.set, grid);
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto r = k(profiles[i]);
    out["_profile_" + std::to_string(i) + ".csv"] =
        csv(hash, [&](std::ostream& os) { eigen::write_profile_csv(os, r); });
  }
  if (log) *log << "eigen: " << curve.size() << " lambda values, " << profiles.size() << " profiles\n";
  return out;
}

Outputs run_dirichlet(Section& top, const std::string& hash, std::ostream* log) {
  const Payload payload = read_payload(top);
  const auto grid = read_grid(sub(top, "grid", "grid"));
  Section d = sub(top, "dirichlet", "dirichlet");
  std::vector<double> radii;
  if (auto given = d.numbers("R")) {
    radii = *given;
  } else {
    for (int j = 0; j <= 6; ++j) radii.push_back(payload.set.period() * std::ldexp(1.0, j));
  }
  d.done();
  top.done();
  if (radii.empty()) throw ValidationError("dirichlet.R: needs at least one radius");
  for (double R : radii) positive(R, "dirichlet.R entries");

  std::vector<eigen::DirichletPoint> points;
  for (double R : radii) {
    points.push_back({R, eigen::dirichlet_eigenvalue(payload.set, R, grid).value});
    if (log) *log << "dirichlet: R=" << R << " lambda1=" << points.back().lambda1 << '\n';
  }
  Outputs out;
  out["_dirichlet.csv"] = csv(hash, [&](std::ostream& os) { eigen::write_dirichlet_csv(os, points); });
  return out;
}

std::vector<speeds::CurvePoint> speed_curve(const CoefficientSet& set, const eigen::GridSpec& grid,
                                            const LambdaGrid& lg) {
  eigen::KEvaluator k(set, grid);
  std::vector<speeds::CurvePoint> curve;
  for (double lambda : lambda_values(lg)) curve.push_back({lambda, k(lambda).value});
  return curve;
}

Outputs run_speed(Section& top, const std::string& hash, std::ostream* log) {
  const Payload payload = read_payload(top);
  const auto grid = read_grid(sub(top, "grid", "grid"));
  const auto settings = read_speed(sub(top, "speed", "speed"));
  top.done();

  const auto report = speeds::spreading_speeds(payload.set, grid, settings.options);
  json j = speeds::to_json(report);
  if (settings.hair_trigger) {
    j["hair_trigger_check"] = speeds::to_json(speeds::hair_trigger_check(payload.set, grid, settings.options));
  }
  j["warnings"] = payload.set.warnings();
  const auto curve = speed_curve(payload.set, grid, settings.curve);
  Outputs out;
  out["_speed.json"] = render(j, hash);
  out["_speed_curve.csv"] = csv(hash, [&](std::ostream& os) { speeds::write_speed_curve_csv(os, curve); });
  if (log) *log << "speed: c_right=" << report.c_right << " c_left=" << report.c_left << '\n';
  return out;
}

Outputs run_ode(Section& top, const std::string& hash, std::ostream* log) {
  const Payload payload = read_payload(top);
  Section s = sub(top, "ode", "ode");
  const double u0 = s.number("u0", 0.1);
  const double v0 = s.number("v0", 0.1);
  const double T = s.number("T", 200.0);
  const double dt = s.number("dt", 1e-3);
  const std::size_t record_every = s.count("record_every", 100);
  s.done();
  top.done();
  if (!(u0 >= 0.0) || !(v0 >= 0.0)) throw ValidationError("ode: u0 and v0 must be >= 0");
  positive(T, "ode.T");
  positive(dt, "ode.dt");
  if (record_every == 0) throw ValidationError("ode.record_every must be >= 1");

  const bool from_means = !payload.hom.has_value();
  const ode::HomParams p =
      payload.hom ? *payload.hom : ode::from_homogenized(coefficients::homogenize(payload.set));
  const auto analysis = ode::analyze(p);
  const auto traj = ode::integrate(p, u0, v0, T, dt, record_every);

  json j;
  j["parameters"] = {{"sigma", p.sigma}, {"r_u", p.r_u},         {"r_v", p.r_v},  {"kappa_u", p.kappa_u},
                     {"kappa_v", p.kappa_v}, {"mu_u", p.mu_u}, {"mu_v", p.mu_v}};
  j["parameters_from_period_means"] = from_means;
  j["lambda_A"] = analysis.lambda_A;
  j["lambda_A_sign"] = sign_name(analysis.sign);
  j["equilibrium"] = analysis.equilibrium ? equilibrium_json(*analysis.equilibrium) : json(nullptr);
  j["jacobian"] = jacobian_json(analysis.jacobian);
  j["lyapunov_K"] = optional_json(analysis.lyapunov_K);
  j["lyapunov_P"] = optional_json(analysis.lyapunov_P);
  const auto& last = traj.samples.back();
  j["final"] = {{"t", last.t}, {"u", last.u}, {"v", last.v}};
  const double tu = analysis.equilibrium ? analysis.equilibrium->u : 0.0;
  const double tv = analysis.equilibrium ? analysis.equilibrium->v : 0.0;
  j["convergence_time"] = optional_json(ode::convergence_time(traj, tu, tv, 1e-6, std::max<std::size_t>(1, 1000 / record_every)));
  j["steps"] = traj.steps;
  j["clip_count"] = traj.clip_count;
  j["max_clip"] = traj.max_clip;

  std::optional<double> K;
  if (analysis.equilibrium && analysis.lyapunov_K && u0 > 0.0 && v0 > 0.0) K = analysis.lyapunov_K;
  Outputs out;
  out["_ode.json"] = render(j, hash);
  out["_trajectory.csv"] = csv(hash, [&](std::ostream& os) {
    ode::write_trajectory_csv(os, traj, K ? analysis.equilibrium : std::nullopt, K);
  });
  if (log) *log << "ode: lambda_A=" << analysis.lambda_A << " final=(" << last.u << ", " << last.v << ")\n";
  return out;
}

pde::DomainSpec read_domain(Section s) {
  pde::DomainSpec d;
  d.x_min = s.number("x_min", d.x_min);
  d.x_max = s.number("x_max", d.x_max);
  d.n_points = s.count("n_points", d.n_points);
  if (auto b = s.text("boundary")) d.boundary = pde::boundary_from_name(*b);
  s.done();
  return d;
}

pde::InitialData read_initial(Section s) {
  pde::InitialData init;
  if (auto kind = s.text("kind")) init.kind = pde::initial_kind_from_name(*kind);
  init.amplitude = s.optional_number("amplitude");
  init.u_weight = s.number("u_weight", init.u_weight);
  init.v_weight = s.number("v_weight", init.v_weight);
  init.left = s.number("left", init.left);
  init.right = s.number("right", init.right);
  init.modulation = s.number("modulation", init.modulation);
  s.done();
  return init;
}

json side_json(const pde::SideSpeed& side) {
  return {{"speed", optional_json(side.speed)},
          {"slope", side.slope},
          {"r_squared", side.r_squared},
          {"samples", side.samples},
          {"status", pde::fit_status_name(side.status)}};
}

Outputs run_simulate(Section& top, const std::string& hash, std::ostream* log) {
  const Payload payload = read_payload(top);
  const auto domain = read_domain(sub(top, "domain", "domain"));
  const auto init = read_initial(sub(top, "initial", "initial"));
  Section s = sub(top, "solver", "solver");
  pde::SimulationOptions options;
  options.T = s.number("T", options.T);
  options.dt = s.number("dt", options.dt);
  options.record_every = s.number("record_every", options.record_every);
  options.snapshot_every = s.number("snapshot_every", options.snapshot_every);
  options.theta = s.optional_number("theta");
  const double window = s.number("window", 0.5);
  s.done();
  top.done();

  const auto result = pde::simulate(payload.set, domain, init, options);
  const auto speed = pde::measure_speed(result.trace, window);
  json j;
  j["right"] = side_json(speed.right);
  j["left"] = side_json(speed.left);
  j["theta"] = result.trace.theta;
  j["trust_region"] = {result.trace.trust_min, result.trace.trust_max};
  j["trusted_until"] = optional_json(result.trace.trusted_until);
  j["final_time"] = result.state.t;
  j["sup_u_plus_v_max"] = result.state.mass_max;
  j["bound"] = result.state.bound;
  j["steps"] = result.stats.steps;
  j["substeps"] = result.stats.substeps;
  j["clip_count"] = result.stats.clip_count;
  j["max_clip"] = result.stats.max_clip;
  std::vector<std::string> warnings = payload.set.warnings();
  warnings.insert(warnings.end(), result.warnings.begin(), result.warnings.end());
  j["warnings"] = warnings;

  Outputs out;
  out["_report.json"] = render(j, hash);
  out["_front.csv"] = csv(hash, [&](std::ostream& os) { pde::write_front_csv(os, result.trace); });
  out["_snapshots.csv"] =
      csv(hash, [&](std::ostream& os) { pde::write_snapshots_csv(os, result.x, result.snapshots); });
  if (log) {
    *log << "simulate: " << result.stats.steps << " steps, " << result.stats.substeps << " substeps\n";
    for (const auto& w : result.warnings) *log << "warning: " << w << '\n';
  }
  return out;
}

Outputs run_stationary(Section& top, const std::string& hash, std::ostream* log) {
  const Payload payload = read_payload(top);
  const auto options =
      read_stationary(sub(top, "stationary", "stationary"));
  top.done();
  const auto profile = pde::stationary_profile(payload.set, options);
  double u_max = 0.0, v_max = 0.0, u_min = INFINITY, v_min = INFINITY;
  for (std::size_t i = 0; i < profile.u.size(); ++i) {
    u_max = std::max(u_max, profile.u[i]);
    v_max = std::max(v_max, profile.v[i]);
    u_min = std::min(u_min, profile.u[i]);
    v_min = std::min(v_min, profile.v[i]);
  }
  json j = {{"period", payload.set.period()}, {"residual", profile.residual}, {"t", profile.t},
            {"u_min", u_min},                 {"u_max", u_max},                 {"v_min", v_min},
            {"v_max", v_max}};
  Outputs out;
  out["_stationary.json"] = render(j, hash);
  out["_stationary.csv"] = csv(hash, [&](std::ostream& os) { pde::write_profile_csv(os, profile); });
  if (log) *log << "stationary: residual " << profile.residual << " at t=" << profile.t << '\n';
  return out;
}

Outputs run_homogenize(Section& top, const std::string& hash, std::ostream* log) {
  const Payload payload = read_payload(top);
  top.done();
  const auto h = coefficients::homogenize(payload.set);
  const auto p = ode::from_homogenized(h);
  json j = coefficients::to_json(h);
  j["lambda_A"] = ode::lambda_A(p);
  j["lambda_A_sign"] = sign_name(ode::lambda_A_sign(p));
  if (ode::lambda_A_sign(p) == ode::Sign::positive) {
    j["speed"] = speeds::homogenized_speed(h);
    j["equilibrium"] = equilibrium_json(ode::equilibrium(p));
  } else {
    j["speed"] = nullptr;
    j["equilibrium"] = nullptr;
  }
  Outputs out;
  out["_homogenized.json"] = render(j, hash);
  if (log) *log << "homogenize: sigma_H=" << h.sigma_h << '\n';
  return out;
}

struct SweepRow {
  double value = 0.0;
  double c_right = nan, c_left = nan, target = nan;
  double gap_right = nan, gap_left = nan;
  double stationary_distance = nan;
  std::string error;
};

Outputs run_sweep(Section& top, const std::string& hash, unsigned jobs, std::ostream* log) {
  const Payload payload = read_payload(top);
  const auto grid = read_grid(sub(top, "grid", "grid"));
  const auto settings = read_speed(sub(top, "speed", "speed"));
  const auto stationary =
      read_stationary(sub(top, "stationary", "stationary"));
  Section s = sub(top, "sweep", "sweep");
  const auto eps = s.numbers("eps");
  const auto field_name = s.text("field");
  const auto values = s.numbers("values");
  const bool with_distance = s.flag("stationary_distance", false);
  s.done();
  top.done();

  if (eps.has_value() == (field_name.has_value() || values.has_value())) {
    throw ValidationError("sweep: give either 'eps' or 'field' with 'values'");
  }
  std::optional<coefficients::Field> field;
  std::vector<double> grid_values;
  if (eps) {
    grid_values = *eps;
    for (double e : grid_values) {
      if (!(e > 0.0 && e <= 1.0)) throw ValidationError("sweep.eps: entries must lie in (0, 1]");
    }
  } else {
    if (!field_name || !values) throw ValidationError("sweep: 'field' and 'values' go together");
    field = coefficients::field_from_name(*field_name);
    grid_values = *values;
  }
  if (grid_values.empty()) throw ValidationError("sweep: no values given");

  auto compute = [&](double value) {
    SweepRow row;
    row.value = value;
    try {
      const CoefficientSet set =
          field ? payload.set.with_field(*field, coefficients::CoefficientSpec::constant(value))
                : coefficients::rescale_epsilon(payload.set, value);
      // The eps sweep targets the limit of the unscaled set; a field sweep
      // compares each row with its own homogenized speed.
      const auto h = coefficients::homogenize(field ? set : payload.set);
      const auto report = speeds::spreading_speeds(set, grid, settings.options);
      row.c_right = report.c_right;
      row.c_left = report.c_left;
      row.target = speeds::homogenized_speed(h);
      row.gap_right = std::abs(row.c_right - row.target);
      row.gap_left = std::abs(row.c_left - row.target);
      if (with_distance) {
        const auto eq = ode::equilibrium(ode::from_homogenized(h));
        const auto profile = pde::stationary_profile(set, stationary);
        double d = 0.0;
        for (std::size_t i = 0; i < profile.u.size(); ++i) {
          d = std::max({d, std::abs(profile.u[i] - eq.u), std::abs(profile.v[i] - eq.v)});
        }
        row.stationary_distance = d;
      }
    } catch (const std::exception& e) {
      row.error = describe(e);
    }
    return row;
  };

  std::vector<SweepRow> rows(grid_values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < rows.size();) rows[i] = compute(grid_values[i]);
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(rows.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  Outputs out;
  out["_sweep.csv"] = csv(hash, [&](std::ostream& os) {
    using numerics::format_double;
    os << (field ? "value" : "eps")
       << ",c_right,c_left,target,gap_right,gap_left,stationary_distance,error\n";
    for (const auto& r : rows) {
      std::string err = r.error;
      std::replace(err.begin(), err.end(), ',', ';');
      std::replace(err.begin(), err.end(), '\n', ' ');
      os << format_double(r.value) << ',' << format_double(r.c_right) << ','
         << format_double(r.c_left) << ',' << format_double(r.target) << ','
         << format_double(r.gap_right) << ',' << format_double(r.gap_left) << ','
         << format_double(r.stationary_distance) << ',' << err << '\n';
    }
  });
  if (log) {
    for (const auto& r : rows) {
      *log << "sweep: " << r.value << (r.error.empty() ? "" : " failed: " + r.error) << '\n';
    }
  }
  return out;
}

struct ErrorInfo {
  std::string kind;
  int code;
};

ErrorInfo classify(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e)) return {"validation", exit_config};
  if (dynamic_cast<const json::exception*>(&e)) return {"config", exit_config};
  if (dynamic_cast<const PreconditionError*>(&e)) return {"precondition", exit_numerical};
  if (dynamic_cast<const ContractViolation*>(&e)) return {"contract", exit_numerical};
  if (dynamic_cast<const DomainError*>(&e)) return {"domain", exit_numerical};
  if (dynamic_cast<const InvariantBreach*>(&e)) return {"invariant", exit_numerical};
  if (dynamic_cast<const NumericalError*>(&e)) return {"numerical", exit_numerical};
  return {"internal", exit_numerical};
}

std::string describe(const std::exception& e) { return classify(e).kind + ": " + e.what(); }

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
  json j = {{"error", {{"kind", kind}, {"message", message}}}};
  err << j.dump() << '\n';
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = {"eigen", "dirichlet", "speed", "ode",
                                                 "simulate", "stationary", "homogenize", "sweep"};
  return names;
}

std::string config_hash(const json& config) {
  return numerics::hex64(numerics::fnv1a64(config.dump()));
}

Outputs execute(const std::string& command, const json& config, unsigned jobs, std::ostream* log) {
  Section top(config, "config");
  if (auto declared = top.text("command"); declared && *declared != command) {
    throw ValidationError("config: command '" + *declared + "' does not match subcommand '" +
                          command + "'");
  }
  const std::string hash = config_hash(config);
  if (command == "eigen") return run_eigen(top, hash, log);
  if (command == "dirichlet") return run_dirichlet(top, hash, log);
  if (command == "speed") return run_speed(top, hash, log);
  if (command == "ode") return run_ode(top, hash, log);
  if (command == "simulate") return run_simulate(top, hash, log);
  if (command == "stationary") return run_stationary(top, hash, log);
  if (command == "homogenize") return run_homogenize(top, hash, log);
  if (command == "sweep") return run_sweep(top, hash, jobs, log);
  throw ValidationError("unknown command '" + command + "'");
}

int run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  Outputs outputs;
  try {
    std::ifstream in(options.config);
    if (!in) {
      report_error(err, "io", "cannot open config file '" + options.config.string() + "'");
      return exit_config;
    }
    const json config = json::parse(in);
    outputs = execute(options.command, config, std::max(1u, options.jobs),
                      options.verbose ? &err : nullptr);
  } catch (const std::exception& e) {
    const auto info = classify(e);
    report_error(err, info.kind, e.what());
    return info.code;
  }
  std::vector<std::filesystem::path> written;
  for (const auto& [suffix, content] : outputs) {
    const std::filesystem::path path = options.out_prefix + suffix;
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream file(path, std::ios::binary);
    file << content;
    if (!file) {
      report_error(err, "io", "cannot write '" + path.string() + "'");
      return exit_numerical;
    }
    written.push_back(path);
  }
  for (const auto& p : written) out << p.string() << '\n';
  return exit_ok;
}

}  // namespace frontlab::cli
