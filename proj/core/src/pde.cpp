#include "frontlab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <tuple>

#include "frontlab/eigen.hpp"
#include "frontlab/error.hpp"
#include "frontlab/numerics.hpp"
#include "frontlab/speeds.hpp"

namespace frontlab::pde {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();
constexpr double bound_slack = 1e-8;
constexpr double flagged_clip = 1e-10;

void clip(std::vector<double>& w, StepStats& stats) {
  for (double& value : w) {
    if (value < 0.0) {
      stats.max_clip = std::max(stats.max_clip, -value);
      if (-value > flagged_clip) ++stats.clip_count;
      value = 0.0;
    }
  }
}

void check_options(const SimulationOptions& o) {
  if (!(o.T >= 0.0) || !std::isfinite(o.T)) throw ValidationError("solver: T must be >= 0");
  if (!(o.dt > 0.0) || !std::isfinite(o.dt)) throw ValidationError("solver: dt must be > 0");
  if (!(o.record_every > 0.0)) throw ValidationError("solver: record_every must be > 0");
  if (!(o.snapshot_every >= 0.0)) throw ValidationError("solver: snapshot_every must be >= 0");
  if (o.theta && !(*o.theta > 0.0)) throw ValidationError("solver: theta must be > 0");
}

std::size_t steps_for(double T, double dt) {
  return static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
}

std::size_t every(double interval, double h) {
  if (!(h > 0.0)) return 1;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(interval / h)));
}

bool in_range(double x, double lo, double hi) { return std::isfinite(x) && x >= lo && x <= hi; }

}  // namespace

std::string_view boundary_name(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::neumann:
      return "neumann";
    case BoundaryKind::dirichlet_zero:
      return "dirichlet_zero";
    case BoundaryKind::periodic:
      return "periodic";
  }
  return "unknown";
}

BoundaryKind boundary_from_name(std::string_view name) {
  for (auto k : {BoundaryKind::neumann, BoundaryKind::dirichlet_zero, BoundaryKind::periodic}) {
    if (boundary_name(k) == name) return k;
  }
  throw ValidationError("unknown boundary kind '" + std::string(name) + "'");
}

double DomainSpec::spacing() const {
  const double len = x_max - x_min;
  return boundary == BoundaryKind::periodic ? len / static_cast<double>(n_points)
                                            : len / static_cast<double>(n_points - 1);
}

std::vector<double> DomainSpec::nodes() const {
  std::vector<double> x(n_points);
  const double h = spacing();
  for (std::size_t i = 0; i < n_points; ++i) x[i] = x_min + h * static_cast<double>(i);
  if (boundary != BoundaryKind::periodic) x.back() = x_max;
  return x;
}

void DomainSpec::validate(double min_length) const {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
    throw ValidationError("domain: need finite x_min < x_max");
  }
  if (x_max - x_min < min_length) {
    std::ostringstream msg;
    msg << "domain: length " << x_max - x_min << " is below the minimum " << min_length;
    throw ValidationError(msg.str());
  }
  if (n_points < 256) throw ValidationError("domain: n_points must be at least 256");
}

std::string_view initial_kind_name(InitialKind kind) {
  switch (kind) {
    case InitialKind::right_front_like:
      return "right_front_like";
    case InitialKind::left_front_like:
      return "left_front_like";
    case InitialKind::compact_bump:
      return "compact_bump";
    case InitialKind::periodic_pair:
      return "periodic_pair";
    case InitialKind::constant_pair:
      return "constant_pair";
  }
  return "unknown";
}

InitialKind initial_kind_from_name(std::string_view name) {
  for (auto k : {InitialKind::right_front_like, InitialKind::left_front_like,
                 InitialKind::compact_bump, InitialKind::periodic_pair,
                 InitialKind::constant_pair}) {
    if (initial_kind_name(k) == name) return k;
  }
  throw ValidationError("unknown initial data kind '" + std::string(name) + "'");
}

double sup_sum(const FieldState& s) {
  double m = 0.0;
  for (std::size_t i = 0; i < s.u.size(); ++i) m = std::max(m, s.u[i] + s.v[i]);
  return m;
}

Simulator::Simulator(const CoefficientSet& set, const DomainSpec& domain)
    : domain_(domain), period_(set.period()) {
  if (!std::isfinite(domain.x_min) || !std::isfinite(domain.x_max) ||
      !(domain.x_max > domain.x_min)) {
    throw ValidationError("domain: need finite x_min < x_max");
  }
  if (domain.n_points < 16) throw ValidationError("domain: n_points must be at least 16");
  x_ = domain.nodes();
  const std::size_t n = x_.size();
  const double h = domain.spacing();
  r_u_.resize(n);
  r_v_.resize(n);
  kappa_u_.resize(n);
  kappa_v_.resize(n);
  mu_u_.resize(n);
  mu_v_.resize(n);
  flux_west_.resize(n);
  flux_east_.resize(n);
  double r_max = set.r_max();
  double kappa_min = set.kappa_min();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = x_[i];
    r_u_[i] = set.r_u()(x);
    r_v_[i] = set.r_v()(x);
    kappa_u_[i] = set.kappa_u()(x);
    kappa_v_[i] = set.kappa_v()(x);
    mu_u_[i] = set.mu_u()(x);
    mu_v_[i] = set.mu_v()(x);
    flux_west_[i] = set.sigma()(x - 0.5 * h) / (h * h);
    flux_east_[i] = set.sigma()(x + 0.5 * h) / (h * h);
    r_max = std::max({r_max, r_u_[i], r_v_[i]});
    kappa_min = std::min({kappa_min, kappa_u_[i], kappa_v_[i]});
  }
  k_bar_ = r_max / kappa_min;
}

FieldState Simulator::make_state(std::vector<double> u, std::vector<double> v, double t) const {
  if (u.size() != x_.size() || v.size() != x_.size()) {
    throw ValidationError("initial data: expected " + std::to_string(x_.size()) + " nodes");
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] >= 0.0) || !(v[i] >= 0.0) || !std::isfinite(u[i]) || !std::isfinite(v[i])) {
      throw DomainError("initial data must be finite and nonnegative");
    }
  }
  FieldState s;
  s.t = t;
  s.x = x_;
  s.u = std::move(u);
  s.v = std::move(v);
  if (domain_.boundary == BoundaryKind::dirichlet_zero) {
    s.u.front() = s.u.back() = s.v.front() = s.v.back() = 0.0;
  }
  s.mass_max = sup_sum(s);
  s.bound = std::max(k_bar_, s.mass_max);
  return s;
}

FieldState Simulator::initial_state(const InitialData& init) const {
  const double amplitude = init.amplitude.value_or(k_bar_);
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw ValidationError("initial data: amplitude must be finite and >= 0 (K bar is " +
                          numerics::format_double(k_bar_) + ")");
  }
  if (!(init.u_weight >= 0.0) || !(init.v_weight >= 0.0)) {
    throw ValidationError("initial data: weights must be >= 0");
  }
  const bool needs_interval = init.kind == InitialKind::right_front_like ||
                              init.kind == InitialKind::left_front_like ||
                              init.kind == InitialKind::compact_bump;
  if (needs_interval && !(init.right > init.left)) {
    throw ValidationError("initial data: need left < right");
  }
  if (init.kind == InitialKind::periodic_pair && !(std::abs(init.modulation) <= 1.0)) {
    throw ValidationError("initial data: |modulation| must be <= 1");
  }
  auto profile = [&](double x) {
    switch (init.kind) {
      case InitialKind::right_front_like:
        if (x <= init.left) return 1.0;
        if (x >= init.right) return 0.0;
        return (init.right - x) / (init.right - init.left);
      case InitialKind::left_front_like:
        if (x <= init.left) return 0.0;
        if (x >= init.right) return 1.0;
        return (x - init.left) / (init.right - init.left);
      case InitialKind::compact_bump: {
        if (x <= init.left || x >= init.right) return 0.0;
        const double s = (2.0 * x - init.left - init.right) / (init.right - init.left);
        return 0.5 * (1.0 + std::cos(std::numbers::pi * s));
      }
      case InitialKind::periodic_pair:
        return 1.0 + init.modulation * std::cos(2.0 * std::numbers::pi * x / period_);
      case InitialKind::constant_pair:
        return 1.0;
    }
    return 0.0;
  };
  std::vector<double> u(x_.size()), v(x_.size());
  for (std::size_t i = 0; i < x_.size(); ++i) {
    const double p = amplitude * profile(x_[i]);
    u[i] = init.u_weight * p;
    v[i] = init.v_weight * p;
  }
  return make_state(std::move(u), std::move(v));
}

void Simulator::diffuse(std::vector<double>& w, double dt) const {
  const std::size_t n = w.size();
  std::vector<double> lower(n), diag(n), upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    lower[i] = -dt * flux_west_[i];
    upper[i] = -dt * flux_east_[i];
    diag[i] = 1.0 + dt * (flux_west_[i] + flux_east_[i]);
  }
  switch (domain_.boundary) {
    case BoundaryKind::periodic:
      w = numerics::solve_cyclic_tridiagonal(lower, diag, upper, std::move(w));
      return;
    case BoundaryKind::neumann:
      // Half cells at the ends, zero flux through the boundary.
      upper[0] = -2.0 * dt * flux_east_[0];
      diag[0] = 1.0 + 2.0 * dt * flux_east_[0];
      lower[n - 1] = -2.0 * dt * flux_west_[n - 1];
      diag[n - 1] = 1.0 + 2.0 * dt * flux_west_[n - 1];
      break;
    case BoundaryKind::dirichlet_zero:
      upper[0] = lower[n - 1] = 0.0;
      diag[0] = diag[n - 1] = 1.0;
      w[0] = w[n - 1] = 0.0;
      break;
  }
  lower[0] = upper[n - 1] = 0.0;
  w = numerics::solve_tridiagonal(lower, diag, upper, std::move(w));
}

void Simulator::step(FieldState& state, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("step: dt must be > 0");
  const std::size_t n = x_.size();
  if (state.u.size() != n || state.v.size() != n) {
    throw ContractViolation("step: state does not match the simulator grid");
  }
  const double M = std::max(k_bar_, sup_sum(state));
  double lipschitz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lipschitz = std::max(lipschitz, std::max(std::abs(r_u_[i]), std::abs(r_v_[i])) + mu_u_[i] +
                                        mu_v_[i] + 3.0 * std::max(kappa_u_[i], kappa_v_[i]) * M);
  }
  const auto substeps =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(dt * lipschitz / 0.25)));
  const double h = dt / static_cast<double>(substeps);
  for (std::size_t k = 0; k < substeps; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double u = state.u[i], v = state.v[i];
      const double total = u + v;
      state.u[i] = u + h * ((r_u_[i] - kappa_u_[i] * total) * u + mu_v_[i] * v - mu_u_[i] * u);
      state.v[i] = v + h * ((r_v_[i] - kappa_v_[i] * total) * v + mu_u_[i] * u - mu_v_[i] * v);
    }
    clip(state.u, stats_);
    clip(state.v, stats_);
    diffuse(state.u, h);
    diffuse(state.v, h);
    clip(state.u, stats_);
    clip(state.v, stats_);
    ++stats_.substeps;
  }
  ++stats_.steps;
  state.t += dt;
  const double sup = sup_sum(state);
  state.mass_max = std::max(state.mass_max, sup);
  if (state.bound > 0.0 && sup > state.bound + bound_slack) {
    std::ostringstream msg;
    msg << "step: sup(u+v) = " << sup << " exceeds the bound " << state.bound << " at t = "
        << state.t;
    throw InvariantBreach(msg.str());
  }
}

FieldState step(const CoefficientSet& set, const DomainSpec& domain, FieldState state, double dt) {
  Simulator sim(set, domain);
  if (state.bound == 0.0) state.bound = std::max(sim.k_bar(), sup_sum(state));
  sim.step(state, dt);
  return state;
}

std::pair<double, double> locate_front(const std::vector<double>& x, const std::vector<double>& u,
                                       const std::vector<double>& v, double theta) {
  const std::size_t n = x.size();
  auto m = [&](std::size_t i) { return std::min(u[i], v[i]); };
  std::size_t first = n, last = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (m(i) >= theta) {
      if (first == n) first = i;
      last = i;
    }
  }
  if (first == n) return {nan, nan};
  double right = x[last];
  if (last + 1 < n) {
    right += (x[last + 1] - x[last]) * (m(last) - theta) / (m(last) - m(last + 1));
  }
  double left = x[first];
  if (first > 0) {
    left = x[first - 1] + (x[first] - x[first - 1]) * (theta - m(first - 1)) / (m(first) - m(first - 1));
  }
  return {right, left};
}

namespace {

SimulationResult run(Simulator& sim, FieldState state, const SimulationOptions& options) {
  check_options(options);
  SimulationResult result;
  result.x = sim.x();
  const DomainSpec& domain = sim.domain();
  const double length = domain.x_max - domain.x_min;
  FrontTrace& trace = result.trace;
  trace.theta = options.theta.value_or(sim.k_bar() > 0.0 ? 0.01 * sim.k_bar()
                                                          : 0.01 * sup_sum(state));
  if (!(trace.theta > 0.0)) throw ValidationError("solver: front threshold theta must be > 0");
  trace.trust_min = domain.x_min + 0.1 * length;
  trace.trust_max = domain.x_max - 0.1 * length;

  const std::size_t steps = steps_for(options.T, options.dt);
  const double h = steps > 0 ? options.T / static_cast<double>(steps) : 0.0;
  const std::size_t record = every(options.record_every, h);
  const std::size_t snapshot = options.snapshot_every > 0.0 ? every(options.snapshot_every, h) : 0;
  const double t0 = state.t;
  bool was_inside[2] = {false, false};

  auto record_front = [&](const FieldState& s) {
    const auto [right, left] = locate_front(s.x, s.u, s.v, trace.theta);
    const double positions[2] = {right, left};
    for (int side = 0; side < 2; ++side) {
      const bool inside = in_range(positions[side], trace.trust_min, trace.trust_max);
      if (was_inside[side] && std::isfinite(positions[side]) && !inside && !trace.trusted_until) {
        trace.trusted_until = trace.samples.empty() ? s.t : trace.samples.back().t;
        std::ostringstream msg;
        msg << (side == 0 ? "right" : "left") << " front entered the outer 10% of the domain at t = "
            << s.t << "; samples after t = " << *trace.trusted_until << " are untrusted";
        result.warnings.push_back(msg.str());
      }
      was_inside[side] = was_inside[side] || inside;
    }
    trace.samples.push_back({s.t, right, left});
    if (options.observer) options.observer(s);
  };

  record_front(state);
  if (snapshot > 0) result.snapshots.push_back({state.t, state.u, state.v});
  for (std::size_t k = 1; k <= steps; ++k) {
    sim.step(state, h);
    state.t = t0 + h * static_cast<double>(k);  // no drift from repeated addition
    if (k % record == 0 || k == steps) record_front(state);
    if (snapshot > 0 && k % snapshot == 0 && k != steps) {
      result.snapshots.push_back({state.t, state.u, state.v});
    }
  }
  result.snapshots.push_back({state.t, state.u, state.v});
  result.stats = sim.stats();
  if (result.stats.clip_count > 0) {
    std::ostringstream msg;
    msg << result.stats.clip_count << " negative values beyond 1e-10 were clipped (largest "
        << result.stats.max_clip << ")";
    result.warnings.push_back(msg.str());
  }
  result.state = std::move(state);
  return result;
}

}  // namespace

SimulationResult simulate(const CoefficientSet& set, const DomainSpec& domain,
                          const InitialData& init, const SimulationOptions& options) {
  domain.validate(20.0 * set.period());
  Simulator sim(set, domain);
  return run(sim, sim.initial_state(init), options);
}

SimulationResult simulate(const CoefficientSet& set, const DomainSpec& domain, FieldState initial,
                          const SimulationOptions& options) {
  domain.validate(20.0 * set.period());
  Simulator sim(set, domain);
  FieldState state = sim.make_state(std::move(initial.u), std::move(initial.v), initial.t);
  return run(sim, std::move(state), options);
}

std::string_view fit_status_name(FitStatus status) {
  switch (status) {
    case FitStatus::ok:
      return "ok";
    case FitStatus::insufficient_samples:
      return "insufficient_samples";
    case FitStatus::poor_fit:
      return "poor_fit";
  }
  return "unknown";
}

SpeedMeasurement measure_speed(const FrontTrace& trace, double window, std::size_t min_samples,
                               double r2_threshold) {
  if (!(window > 0.0) || !(window <= 1.0)) throw ValidationError("measure_speed: window must lie in (0, 1]");
  SpeedMeasurement out;
  if (trace.samples.empty()) return out;
  const double t_first = trace.samples.front().t;
  const double t_last = trace.trusted_until.value_or(trace.samples.back().t);
  const double span = t_last - t_first;
  const double t_start = std::max(t_last - window * span, t_first + 0.3 * span);

  auto fit = [&](int side) {
    std::vector<double> ts, ys;
    for (const auto& s : trace.samples) {
      if (s.t < t_start || s.t > t_last) continue;
      const double x = side == 0 ? s.x_right : s.x_left;
      if (!in_range(x, trace.trust_min, trace.trust_max)) continue;
      ts.push_back(s.t);
      ys.push_back(side == 0 ? x : -x);
    }
    SideSpeed r;
    r.samples = ts.size();
    if (ts.size() < min_samples || ts.size() < 2) return r;
    double mt = 0.0, my = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      mt += ts[i];
      my += ys[i];
    }
    mt /= static_cast<double>(ts.size());
    my /= static_cast<double>(ts.size());
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      stt += (ts[i] - mt) * (ts[i] - mt);
      sty += (ts[i] - mt) * (ys[i] - my);
      syy += (ys[i] - my) * (ys[i] - my);
    }
    if (!(stt > 0.0)) return r;
    r.slope = sty / stt;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double e = ys[i] - (my + r.slope * (ts[i] - mt));
      ss_res += e * e;
    }
    r.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    if (r.r_squared > r2_threshold) {
      r.status = FitStatus::ok;
      r.speed = r.slope;
    } else {
      r.status = FitStatus::poor_fit;
    }
    return r;
  };
  out.right = fit(0);
  out.left = fit(1);
  return out;
}

StationaryProfile stationary_profile(const CoefficientSet& set, const StationaryOptions& options) {
  if (!(options.tol > 0.0) || !(options.dt > 0.0) || !(options.T_max > 0.0)) {
    throw ValidationError("stationary: tol, dt and T_max must be positive");
  }
  if (options.check_hair_trigger) {
    eigen::KEvaluator k(set, eigen::GridSpec{});
    const double hi = 2.0 * std::sqrt(std::max(set.r_max(), 0.0) / set.sigma_min()) + 1.0;
    const double k_min = std::min(k(0.0).value, speeds::k_minimum(k, hi, 1e-6).first);
    if (!(k_min > speeds::SpeedOptions{}.band)) {
      throw PreconditionError("stationary_profile: hair-trigger condition k_min > 0 not verified (k_min = " +
                              numerics::format_double(k_min) + ")");
    }
  }
  DomainSpec cell{0.0, set.period(), options.n_points, BoundaryKind::periodic};
  Simulator sim(set, cell);
  if (!(sim.k_bar() > 0.0)) {
    throw PreconditionError("stationary_profile: needs K bar > 0");
  }
  const std::size_t n = sim.x().size();
  FieldState state = sim.make_state(std::vector<double>(n, 0.5 * sim.k_bar()),
                                    std::vector<double>(n, 0.5 * sim.k_bar()));
  double residual = INFINITY;
  while (true) {
    const std::vector<double> u_prev = state.u, v_prev = state.v;
    sim.step(state, options.dt);
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      residual = std::max({residual, std::abs(state.u[i] - u_prev[i]) / options.dt,
                           std::abs(state.v[i] - v_prev[i]) / options.dt});
    }
    if (residual < options.tol) break;
    if (state.t >= options.T_max) {
      std::ostringstream diag;
      diag << "residual " << residual << " at t = " << state.t;
      throw NumericalError("stationary_profile: no convergence by T_max", diag.str());
    }
  }
  return {sim.x(), state.u, state.v, residual, state.t};
}

std::pair<double, double> profile_at(const StationaryProfile& profile, double period, double x) {
  const std::size_t n = profile.u.size();
  const double y = x - period * std::floor(x / period);
  const double t = y / period * static_cast<double>(n);
  auto j = static_cast<std::size_t>(t);
  if (j >= n) j = n - 1;
  const double f = t - static_cast<double>(j);
  const std::size_t k = (j + 1) % n;
  return {profile.u[j] * (1.0 - f) + profile.u[k] * f, profile.v[j] * (1.0 - f) + profile.v[k] * f};
}

std::string_view convergence_status_name(ConvergenceStatus status) {
  switch (status) {
    case ConvergenceStatus::converged:
      return "converged";
    case ConvergenceStatus::not_converged:
      return "not_converged";
    case ConvergenceStatus::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

ConvergenceHistory convergence_behind_front(const CoefficientSet& set, const DomainSpec& domain,
                                            FieldState initial, double c_probe,
                                            const SimulationOptions& options,
                                            const StationaryProfile& profile) {
  check_options(options);
  if (!(c_probe > 0.0)) throw ValidationError("convergence_behind_front: c_probe must be > 0");
  domain.validate(20.0 * set.period());
  Simulator sim(set, domain);
  FieldState state = sim.make_state(std::move(initial.u), std::move(initial.v), initial.t);
  const std::size_t n = sim.x().size();
  std::vector<double> u_star(n), v_star(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::tie(u_star[i], v_star[i]) = profile_at(profile, set.period(), sim.x()[i]);
  }
  const double length = domain.x_max - domain.x_min;
  const double trust_min = domain.x_min + 0.1 * length;
  const double trust_max = domain.x_max - 0.1 * length;

  ConvergenceHistory history;
  history.target = 0.02 * sim.k_bar();
  const std::size_t steps = steps_for(options.T, options.dt);
  const double h = steps > 0 ? options.T / static_cast<double>(steps) : 0.0;
  const std::size_t record = every(options.record_every, h);
  const double t0 = state.t;
  for (std::size_t k = 1; k <= steps; ++k) {
    sim.step(state, h);
    state.t = t0 + h * static_cast<double>(k);
    if (k % record != 0 && k != steps) continue;
    const double reach = c_probe * (state.t - t0);
    if (-reach < trust_min || reach > trust_max) {
      if (history.samples.empty() || history.samples.back().distance >= history.target) {
        history.status = ConvergenceStatus::inconclusive;
        history.final_distance = history.samples.empty() ? nan : history.samples.back().distance;
        return history;
      }
      break;
    }
    double distance = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(sim.x()[i]) > reach) continue;
      distance = std::max({distance, std::abs(state.u[i] - u_star[i]), std::abs(state.v[i] - v_star[i])});
    }
    if (distance >= 0.0) history.samples.push_back({state.t, distance});
  }
  if (history.samples.empty()) {
    history.status = ConvergenceStatus::inconclusive;
    history.final_distance = nan;
    return history;
  }
  history.final_distance = history.samples.back().distance;
  history.status = history.final_distance < history.target ? ConvergenceStatus::converged
                                                           : ConvergenceStatus::not_converged;
  return history;
}

ConvergenceHistory convergence_behind_front(const CoefficientSet& set, const DomainSpec& domain,
                                            const InitialData& init, double c_probe,
                                            const SimulationOptions& options,
                                            const StationaryOptions& stationary) {
  const StationaryProfile profile = stationary_profile(set, stationary);
  domain.validate(20.0 * set.period());
  Simulator sim(set, domain);
  return convergence_behind_front(set, domain, sim.initial_state(init), c_probe, options, profile);
}

ProfileShape analyze_front_profile(const std::vector<double>& x, const std::vector<double>& w,
                                   double a, double b) {
  std::vector<double> sel;
  std::vector<double> xs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= a && x[i] <= b) {
      sel.push_back(w[i]);
      xs.push_back(x[i]);
    }
  }
  ProfileShape shape;
  shape.monotone = true;
  if (sel.size() < 3) return shape;
  double scale = 0.0;
  for (double value : sel) scale = std::max(scale, std::abs(value));
  const double tol = 1e-8 * scale;
  bool non_increasing = true, non_decreasing = true;
  for (std::size_t i = 1; i < sel.size(); ++i) {
    non_increasing = non_increasing && sel[i] <= sel[i - 1] + tol;
    non_decreasing = non_decreasing && sel[i] >= sel[i - 1] - tol;
  }
  shape.monotone = non_increasing || non_decreasing;
  const auto peak = std::max_element(sel.begin(), sel.end());
  const auto k = static_cast<std::size_t>(peak - sel.begin());
  const double ends = std::max(sel.front(), sel.back());
  shape.hump_height = *peak - ends;
  shape.hump_x = xs[k];
  shape.hump = k > 0 && k + 1 < sel.size() && shape.hump_height > 1e-3 * scale;
  return shape;
}

void write_snapshots_csv(std::ostream& out, const std::vector<double>& x,
                         const std::vector<Snapshot>& snapshots) {
  using numerics::format_double;
  for (const auto& s : snapshots) {
    out << "t=" << format_double(s.t) << '\n' << "x,u,v\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
      out << format_double(x[i]) << ',' << format_double(s.u[i]) << ',' << format_double(s.v[i])
          << '\n';
    }
  }
}

void write_front_csv(std::ostream& out, const FrontTrace& trace) {
  using numerics::format_double;
  out << "t,x_right,x_left\n";
  for (const auto& s : trace.samples) {
    out << format_double(s.t) << ',' << format_double(s.x_right) << ',' << format_double(s.x_left)
        << '\n';
  }
}

void write_profile_csv(std::ostream& out, const StationaryProfile& profile) {
  using numerics::format_double;
  out << "x,u,v\n";
  for (std::size_t i = 0; i < profile.x.size(); ++i) {
    out << format_double(profile.x[i]) << ',' << format_double(profile.u[i]) << ','
        << format_double(profile.v[i]) << '\n';
  }
}

}  // namespace frontlab::pde
