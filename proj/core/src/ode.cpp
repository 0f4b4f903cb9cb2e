#include "frontlab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "frontlab/error.hpp"
#include "frontlab/numerics.hpp"

namespace frontlab::ode {

namespace {

constexpr double sign_band = 1e-12;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError(std::string("hom params: ") + name + " must be positive");
  }
}

}  // namespace

void HomParams::validate() const {
  require_positive(sigma, "sigma");
  require_positive(kappa_u, "kappa_u");
  require_positive(kappa_v, "kappa_v");
  require_positive(mu_u, "mu_u");
  require_positive(mu_v, "mu_v");
  if (!std::isfinite(r_u) || !std::isfinite(r_v)) {
    throw ValidationError("hom params: r_u and r_v must be finite");
  }
}

double lambda_A(const HomParams& p) {
  const double a = p.r_u - p.mu_u;
  const double d = p.r_v - p.mu_v;
  return 0.5 * (a + d + std::sqrt((a - d) * (a - d) + 4.0 * p.mu_u * p.mu_v));
}

Sign lambda_A_sign(const HomParams& p) {
  const double value = lambda_A(p);
  if (value > sign_band) return Sign::positive;
  if (value < -sign_band) return Sign::negative;
  return Sign::zero;
}

std::pair<double, double> vector_field(const HomParams& p, double u, double v) {
  const double total = u + v;
  return {(p.r_u - p.kappa_u * total) * u + p.mu_v * v - p.mu_u * u,
          (p.r_v - p.kappa_v * total) * v + p.mu_u * u - p.mu_v * v};
}

Equilibrium equilibrium(const HomParams& p) {
  p.validate();
  if (lambda_A_sign(p) != Sign::positive) {
    std::ostringstream msg;
    msg << "equilibrium: needs lambda_A > 0 (got " << lambda_A(p)
        << "); the origin is the only nonnegative equilibrium";
    throw PreconditionError(msg.str());
  }
  const double rho = p.kappa_u / p.kappa_v;
  const double X = (p.r_u - p.mu_u) - rho * (p.r_v - p.mu_v);
  const double root = std::sqrt(X * X + 4.0 * rho * p.mu_u * p.mu_v);
  // Both forms are the same root; pick the one without cancellation.
  const double Q = X >= 0.0 ? (X + root) / (2.0 * rho * p.mu_u) : 2.0 * p.mu_v / (root - X);
  const double S = (p.r_v + p.mu_u * Q - p.mu_v) / p.kappa_v;
  Equilibrium eq;
  eq.Q = Q;
  eq.S = S;
  eq.u = S * Q / (1.0 + Q);
  eq.v = S / (1.0 + Q);
  if (!(eq.u > 0.0) || !(eq.v > 0.0)) {
    throw ContractViolation("equilibrium: explicit solution is not positive");
  }
  const auto [fu, fv] = vector_field(p, eq.u, eq.v);
  eq.residual = std::max(std::abs(fu), std::abs(fv));
  const double scale = std::max({1.0, std::abs(p.r_u) * eq.u, std::abs(p.r_v) * eq.v,
                                 p.kappa_u * eq.S * eq.u, p.kappa_v * eq.S * eq.v,
                                 p.mu_u * eq.u, p.mu_v * eq.v});
  if (eq.residual > 1e-10 * scale) {
    throw NumericalError("equilibrium: residual above 1e-10",
                         "residual " + numerics::format_double(eq.residual));
  }
  // Box bounds for each species.
  auto check_box = [](double w, double growth, double inflow, double kappa, const char* name) {
    const double slack = 1e-12 * std::max(1.0, std::abs(w));
    bool ok;
    if (growth > 0.0) {
      ok = w >= std::min(inflow, growth) / kappa - slack &&
           w <= std::max(inflow, growth) / kappa + slack;
    } else {
      ok = w < inflow / kappa + slack;
    }
    if (!ok) throw ContractViolation(std::string("equilibrium: ") + name + " violates its box bound");
  };
  check_box(eq.u, p.r_u - p.mu_u, p.mu_v, p.kappa_u, "u*");
  check_box(eq.v, p.r_v - p.mu_v, p.mu_u, p.kappa_v, "v*");
  return eq;
}

Jacobian jacobian(const HomParams& p, double u, double v) {
  return {p.r_u - p.mu_u - p.kappa_u * (2.0 * u + v), p.mu_v - p.kappa_u * u,
          p.mu_u - p.kappa_v * v, p.r_v - p.mu_v - p.kappa_v * (u + 2.0 * v)};
}

LyapunovCoefficients lyapunov_coefficients(const HomParams& p, const Equilibrium& eq) {
  return {p.kappa_u, p.kappa_u - p.mu_v / eq.u, p.kappa_v - p.mu_u / eq.v, p.kappa_v};
}

double lyapunov_K(const HomParams& p) {
  if (!(std::max(p.r_u - p.mu_u, p.r_v - p.mu_v) > 0.0)) {
    throw PreconditionError("lyapunov_K: needs max(r_u - mu_u, r_v - mu_v) > 0");
  }
  const Equilibrium eq = equilibrium(p);
  const LyapunovCoefficients c = lyapunov_coefficients(p, eq);
  if (!(c.B * c.C < c.A * c.D)) {
    throw ContractViolation("lyapunov_K: BC < AD fails");
  }
  const double linear = 4.0 * c.A * c.D - 2.0 * c.B * c.C;
  const double K = c.C != 0.0 ? linear / (2.0 * c.C * c.C) : (c.B * c.B + 1.0) / linear;
  if (!(K > 0.0) || !(c.P(K) > 0.0)) {
    std::ostringstream diag;
    diag << "K = " << K << ", P(K) = " << c.P(K);
    throw ContractViolation("lyapunov_K: P(K) is not positive at the chosen K; " + diag.str());
  }
  return K;
}

double lyapunov_value(double u, double v, double u_star, double v_star, double K) {
  if (!(u > 0.0) || !(v > 0.0)) {
    throw DomainError("lyapunov_value: u and v must be positive");
  }
  auto F = [](double w, double w_star) {
    const double d = w - w_star;
    return d - w_star * std::log1p(d / w_star);
  };
  return F(u, u_star) + K * F(v, v_star);
}

Trajectory integrate(const HomParams& p, double u0, double v0, double T, double dt,
                     std::size_t record_every) {
  p.validate();
  if (!(u0 >= 0.0) || !(v0 >= 0.0) || !std::isfinite(u0) || !std::isfinite(v0)) {
    throw DomainError("integrate: initial values must be finite and nonnegative");
  }
  if (!(dt > 0.0) || !(T >= 0.0) || !std::isfinite(T) || !std::isfinite(dt)) {
    throw DomainError("integrate: need dt > 0 and T >= 0");
  }
  if (record_every == 0) record_every = 1;
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  const double h = steps > 0 ? T / static_cast<double>(steps) : 0.0;
  Trajectory traj;
  traj.steps = steps;
  double u = u0, v = v0;
  traj.samples.push_back({0.0, u, v});
  for (std::size_t k = 1; k <= steps; ++k) {
    const auto [k1u, k1v] = vector_field(p, u, v);
    const auto [k2u, k2v] = vector_field(p, u + 0.5 * h * k1u, v + 0.5 * h * k1v);
    const auto [k3u, k3v] = vector_field(p, u + 0.5 * h * k2u, v + 0.5 * h * k2v);
    const auto [k4u, k4v] = vector_field(p, u + h * k3u, v + h * k3v);
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    for (double* w : {&u, &v}) {
      if (*w < 0.0) {
        traj.max_clip = std::max(traj.max_clip, -*w);
        ++traj.clip_count;
        *w = 0.0;
      }
    }
    if (!(std::abs(u) + std::abs(v) <= 1e6)) {
      std::ostringstream diag;
      diag << "t = " << h * static_cast<double>(k) << ", u = " << u << ", v = " << v;
      throw NumericalError("integrate: trajectory diverged", diag.str());
    }
    if (k % record_every == 0 || k == steps) {
      traj.samples.push_back({h * static_cast<double>(k), u, v});
    }
  }
  return traj;
}

OdeAnalysis analyze(const HomParams& p) {
  p.validate();
  OdeAnalysis a;
  a.lambda_A = lambda_A(p);
  a.sign = lambda_A_sign(p);
  if (a.sign == Sign::positive) {
    a.equilibrium = equilibrium(p);
    a.jacobian = jacobian(p, a.equilibrium->u, a.equilibrium->v);
    if (std::max(p.r_u - p.mu_u, p.r_v - p.mu_v) > 0.0) {
      a.lyapunov_K = lyapunov_K(p);
      a.lyapunov_P = lyapunov_coefficients(p, *a.equilibrium).P(*a.lyapunov_K);
    }
  } else {
    a.jacobian = jacobian(p, 0.0, 0.0);
  }
  return a;
}

std::optional<double> convergence_time(const Trajectory& traj, double u, double v, double tol,
                                       std::size_t sustain) {
  std::size_t run = 0;
  std::optional<double> start;
  for (const auto& s : traj.samples) {
    if (std::max(std::abs(s.u - u), std::abs(s.v - v)) < tol) {
      if (run == 0) start = s.t;
      if (++run >= sustain) return start;
    } else {
      run = 0;
    }
  }
  return std::nullopt;
}

HomParams from_homogenized(const coefficients::HomogenizedSet& h) {
  HomParams p;
  p.sigma = h.sigma_h;
  p.r_u = h.mean_r_u;
  p.r_v = h.mean_r_v;
  p.kappa_u = h.mean_kappa_u;
  p.kappa_v = h.mean_kappa_v;
  p.mu_u = h.mean_mu_u;
  p.mu_v = h.mean_mu_v;
  return p;
}

coefficients::CoefficientSet constant_set(const HomParams& p, double period) {
  using coefficients::CoefficientSpec;
  coefficients::Coefficients c;
  c.sigma = CoefficientSpec::constant(p.sigma);
  c.r_u = CoefficientSpec::constant(p.r_u);
  c.r_v = CoefficientSpec::constant(p.r_v);
  c.kappa_u = CoefficientSpec::constant(p.kappa_u);
  c.kappa_v = CoefficientSpec::constant(p.kappa_v);
  c.mu_u = CoefficientSpec::constant(p.mu_u);
  c.mu_v = CoefficientSpec::constant(p.mu_v);
  return coefficients::CoefficientSet(period, c);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::optional<Equilibrium>& eq, std::optional<double> K) {
  using numerics::format_double;
  const bool with_lyapunov = eq.has_value() && K.has_value();
  out << (with_lyapunov ? "t,u,v,lyapunov\n" : "t,u,v\n");
  for (const auto& s : traj.samples) {
    out << format_double(s.t) << ',' << format_double(s.u) << ',' << format_double(s.v);
    if (with_lyapunov) {
      out << ',';
      if (s.u > 0.0 && s.v > 0.0) {
        out << format_double(lyapunov_value(s.u, s.v, eq->u, eq->v, *K));
      } else {
        out << "inf";
      }
    }
    out << '\n';
  }
}

}  // namespace frontlab::ode
