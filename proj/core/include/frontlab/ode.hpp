#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "frontlab/coefficients.hpp"

namespace frontlab::ode {

/// Constant coefficients of the two-species system.
struct HomParams {
  double sigma = 1.0;
  double r_u = 1.0, r_v = 1.0;
  double kappa_u = 1.0, kappa_v = 1.0;
  double mu_u = 0.5, mu_v = 0.5;

  /// sigma, kappa and mu must be positive and everything finite.
  void validate() const;
};

/// Largest eigenvalue of A = [[r_u - mu_u, mu_v], [mu_u, r_v - mu_v]].
double lambda_A(const HomParams& p);

enum class Sign { negative, zero, positive };
/// Sign of lambda_A with |lambda_A| <= 1e-12 read as zero.
Sign lambda_A_sign(const HomParams& p);

struct Equilibrium {
  double u = 0.0, v = 0.0;
  double Q = 0.0, S = 0.0;  // u/v and u + v
  double residual = 0.0;    // max |rhs| at (u, v)
};

/// Positive equilibrium. Throws PreconditionError unless lambda_A > 0.
Equilibrium equilibrium(const HomParams& p);

/// Right-hand side of the ODE system at (u, v).
std::pair<double, double> vector_field(const HomParams& p, double u, double v);

struct Jacobian {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  double trace() const noexcept { return a + d; }
  double det() const noexcept { return a * d - b * c; }
};

Jacobian jacobian(const HomParams& p, double u, double v);

/// Q(U, V) = A U^2 + (B + K C) U V + K D V^2 and P(K) = -C^2 K^2 + (4AD - 2BC) K - B^2.
struct LyapunovCoefficients {
  double A = 0.0, B = 0.0, C = 0.0, D = 0.0;
  double P(double K) const noexcept { return -C * C * K * K + (4 * A * D - 2 * B * C) * K - B * B; }
  double Q(double U, double V, double K) const noexcept {
    return A * U * U + (B + K * C) * U * V + K * D * V * V;
  }
};

LyapunovCoefficients lyapunov_coefficients(const HomParams& p, const Equilibrium& eq);

/// Weight K > 0 with P(K) > 0. Throws PreconditionError outside the branch
/// lambda_A > 0, max(r_u - mu_u, r_v - mu_v) > 0, and ContractViolation if P(K) <= 0.
double lyapunov_K(const HomParams& p);

/// F_u(u) + K F_v(v), F_w(w) = w - w* - w* ln(w/w*). Throws DomainError for u, v <= 0.
double lyapunov_value(double u, double v, double u_star, double v_star, double K);

struct OdeSample {
  double t = 0.0, u = 0.0, v = 0.0;
};

struct Trajectory {
  std::vector<OdeSample> samples;
  std::size_t steps = 0;
  std::size_t clip_count = 0;  // negative components reset to 0
  double max_clip = 0.0;
};

/// Fixed-step RK4 from (u0, v0) to T; keeps every record_every-th step plus the end point.
/// Throws DomainError for bad arguments and NumericalError if |u| + |v| > 1e6.
Trajectory integrate(const HomParams& p, double u0, double v0, double T, double dt = 1e-3,
                     std::size_t record_every = 1);

struct OdeAnalysis {
  double lambda_A = 0.0;
  Sign sign = Sign::zero;
  std::optional<Equilibrium> equilibrium;
  /// At the equilibrium when there is one, otherwise at the origin.
  Jacobian jacobian;
  std::optional<double> lyapunov_K;
  std::optional<double> lyapunov_P;
};

OdeAnalysis analyze(const HomParams& p);

/// First sample time after which the trajectory stays within tol (sup norm) of
/// (u, v) for `sustain` consecutive samples, if any.
std::optional<double> convergence_time(const Trajectory& traj, double u, double v,
                                       double tol = 1e-6, std::size_t sustain = 1000);

/// Homogeneous parameters from period means (sigma from the harmonic mean).
HomParams from_homogenized(const coefficients::HomogenizedSet& h);
/// Constant coefficient set with the given period.
coefficients::CoefficientSet constant_set(const HomParams& p, double period = 1.0);

/// t,u,v[,lyapunov]; the last column only when K and the equilibrium are given.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::optional<Equilibrium>& eq = std::nullopt,
                          std::optional<double> K = std::nullopt);

}  // namespace frontlab::ode
