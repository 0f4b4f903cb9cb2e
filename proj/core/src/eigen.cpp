#include "frontlab/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>

#include "detail/block_tridiagonal.hpp"
#include "frontlab/error.hpp"
#include "frontlab/numerics.hpp"

namespace frontlab::eigen {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

void check_grid(const GridSpec& grid) {
  if (grid.n_cells < min_cells) {
    throw ValidationError("grid: n_cells must be at least " + std::to_string(min_cells));
  }
  if (grid.n_cells > max_cells) {
    throw ValidationError("grid: n_cells must not exceed " + std::to_string(max_cells));
  }
}

void fill_species_terms(const CoefficientSet& set, DiscreteOperator& op) {
  for (int s = 0; s < 2; ++s) {
    op.reaction[s].resize(op.n);
    op.coupling[s].resize(op.n);
  }
  for (std::size_t i = 0; i < op.n; ++i) {
    const double x = op.x[i];
    const double mu_u = set.mu_u()(x);
    const double mu_v = set.mu_v()(x);
    op.reaction[0][i] = set.r_u()(x) - mu_u;
    op.reaction[1][i] = set.r_v()(x) - mu_v;
    op.coupling[0][i] = mu_v;
    op.coupling[1][i] = mu_u;
  }
}

DiscreteOperator assemble_periodic(const CoefficientSet& set, double lambda, std::size_t n) {
  DiscreteOperator op;
  op.boundary = Boundary::periodic;
  op.lambda = lambda;
  op.n = n;
  op.h = set.period() / static_cast<double>(n);
  op.x.resize(n);
  std::vector<double> face(n);  // face[i] = sigma at x_i + h/2
  for (std::size_t i = 0; i < n; ++i) {
    op.x[i] = op.h * static_cast<double>(i);
    face[i] = set.sigma()(op.h * (static_cast<double>(i) + 0.5));
  }
  const double inv_h2 = 1.0 / (op.h * op.h);
  for (int s = 0; s < 2; ++s) {
    op.flux_west[s].resize(n);
    op.flux_east[s].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      op.flux_east[s][i] = face[i] * inv_h2;
      op.flux_west[s][i] = face[(i + n - 1) % n] * inv_h2;
    }
  }
  fill_species_terms(set, op);
  return op;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void scale_to_unit(std::vector<double>& w) {
  const double m = max_abs(w);
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw NumericalError("principal_eigenpair: iterate collapsed or overflowed");
  }
  for (double& v : w) v /= m;
}

struct Diagnostics {
  double value = 0.0, residual = 0.0, lo = 0.0, hi = 0.0;
};

Diagnostics diagnose(const std::vector<double>& w, const std::vector<double>& mw) {
  Diagnostics d;
  d.value = dot(w, mw) / dot(w, w);
  d.lo = std::numeric_limits<double>::infinity();
  d.hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i) {
    d.residual = std::max(d.residual, std::abs(mw[i] - d.value * w[i]));
    const double ratio = mw[i] / w[i];
    d.lo = std::min(d.lo, ratio);
    d.hi = std::max(d.hi, ratio);
  }
  d.residual /= max_abs(w);
  return d;
}

EigenResult package(const DiscreteOperator& op, const std::vector<double>& w, const Diagnostics& d,
                    std::size_t iterations) {
  EigenResult r;
  r.value = d.value;
  r.phi.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(op.n));
  r.psi.assign(w.begin() + static_cast<std::ptrdiff_t>(op.n), w.end());
  r.x = op.x;
  r.lambda = op.lambda;
  r.boundary = op.boundary;
  r.n_cells = op.boundary == Boundary::periodic ? op.n : op.n + 1;
  r.h = op.h;
  r.iterations = iterations;
  r.residual = d.residual;
  r.lower_bound = d.lo;
  r.upper_bound = d.hi;
  return r;
}

std::unique_ptr<detail::BlockTridiagonal> factor(const DiscreteOperator& op,
                                                 const std::array<std::vector<double>, 2>& west,
                                                 const std::array<std::vector<double>, 2>& east,
                                                 const std::array<std::vector<double>, 2>& diag,
                                                 double shift) {
  return std::make_unique<detail::BlockTridiagonal>(
      std::array<const std::vector<double>*, 2>{&west[0], &west[1]},
      std::array<const std::vector<double>*, 2>{&east[0], &east[1]},
      std::array<const std::vector<double>*, 2>{&diag[0], &diag[1]},
      std::array<const std::vector<double>*, 2>{&op.coupling[0], &op.coupling[1]},
      op.boundary == Boundary::periodic, shift);
}

EigenResult resolvent_iteration(const DiscreteOperator& op, const EigenOptions& options,
                                std::vector<double> w, double residual_tol) {
  std::array<std::vector<double>, 2> west, east, diag;
  for (int s = 0; s < 2; ++s) {
    west[s].resize(op.n);
    east[s].resize(op.n);
    diag[s].resize(op.n);
    for (std::size_t i = 0; i < op.n; ++i) {
      west[s][i] = op.west(s, i);
      east[s][i] = op.east(s, i);
      diag[s][i] = op.diagonal(s, i);
    }
  }
  const double norm = op.norm_inf();
  std::unique_ptr<detail::BlockTridiagonal> solver;
  double shift = 0.0;
  std::vector<double> mw = op.apply(w);
  Diagnostics d = diagnose(w, mw);
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    const double floor = std::max(1e-10 * (1.0 + std::abs(d.hi)), 32.0 * eps * norm);
    const double target = d.hi + std::max(d.hi - d.lo, floor);
    if (!solver || shift <= d.hi || target < shift - 0.5 * (shift - d.hi)) {
      shift = target;
      solver = factor(op, west, east, diag, shift);
    }
    std::vector<double> y = solver->solve(w);
    for (int retry = 0; *std::min_element(y.begin(), y.end()) <= 0.0; ++retry) {
      // Rounding pushed the shift too close to the root; back off.
      if (retry == 60) {
        throw NumericalError("principal_eigenpair: resolvent lost positivity",
                             "shift " + numerics::format_double(shift));
      }
      shift = d.hi + 4.0 * (shift - d.hi);
      solver = factor(op, west, east, diag, shift);
      y = solver->solve(w);
    }
    scale_to_unit(y);
    w = std::move(y);
    op.apply(w, mw);
    d = diagnose(w, mw);
    const bool settled = std::abs(d.value - previous) <= options.value_tolerance * std::max(1.0, std::abs(d.value));
    if (settled && d.residual <= residual_tol) return package(op, w, d, it);
    previous = d.value;
  }
  std::ostringstream diag_msg;
  diag_msg << "last residual " << d.residual << ", value " << d.value;
  throw NumericalError("principal_eigenpair: no convergence within the iteration cap",
                       diag_msg.str());
}

EigenResult shifted_power_iteration(const DiscreteOperator& op, const EigenOptions& options,
                                    std::vector<double> w, double residual_tol) {
  double min_diag = std::numeric_limits<double>::infinity();
  for (int s = 0; s < 2; ++s) {
    for (std::size_t i = 0; i < op.n; ++i) min_diag = std::min(min_diag, op.diagonal(s, i));
  }
  const double shift = 1.0 + std::max(0.0, -min_diag);
  std::vector<double> mw = op.apply(w);
  Diagnostics d = diagnose(w, mw);
  double previous = std::numeric_limits<double>::quiet_NaN();
  double previous_residual = d.residual;
  std::size_t slow_streak = 0;
  bool squared = false;
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    // w <- B w with B = M + shift I; mw already holds M w.
    const int powers = squared ? 2 : 1;
    for (int p = 0; p < powers; ++p) {
      if (p > 0) op.apply(w, mw);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = mw[i] + shift * w[i];
    }
    scale_to_unit(w);
    op.apply(w, mw);
    d = diagnose(w, mw);
    const bool settled = std::abs(d.value - previous) <= options.value_tolerance * std::max(1.0, std::abs(d.value));
    if (settled && d.residual <= residual_tol) return package(op, w, d, it);
    previous = d.value;
    if (!squared) {
      slow_streak = d.residual > 0.9999 * previous_residual ? slow_streak + 1 : 0;
      if (slow_streak >= 10'000) squared = true;
    }
    previous_residual = d.residual;
  }
  std::ostringstream diag_msg;
  diag_msg << "last residual " << d.residual << ", value " << d.value;
  throw NumericalError("principal_eigenpair: no convergence within the iteration cap",
                       diag_msg.str());
}

}  // namespace

double DiscreteOperator::west(int s, std::size_t i) const {
  if (boundary == Boundary::dirichlet && i == 0) return 0.0;
  return flux_west[s][i] * std::exp(lambda * h);
}

double DiscreteOperator::east(int s, std::size_t i) const {
  if (boundary == Boundary::dirichlet && i + 1 == n) return 0.0;
  return flux_east[s][i] * std::exp(-lambda * h);
}

double DiscreteOperator::diagonal(int s, std::size_t i) const {
  return reaction[s][i] - flux_west[s][i] - flux_east[s][i];
}

void DiscreteOperator::apply(const std::vector<double>& w, std::vector<double>& out) const {
  if (w.size() != dim()) throw ContractViolation("DiscreteOperator::apply: size mismatch");
  out.resize(dim());
  const double em_east = std::expm1(-lambda * h);
  const double em_west = std::expm1(lambda * h);
  const bool periodic = boundary == Boundary::periodic;
  for (int s = 0; s < 2; ++s) {
    const std::size_t base = static_cast<std::size_t>(s) * n;
    const std::size_t other = static_cast<std::size_t>(1 - s) * n;
    for (std::size_t i = 0; i < n; ++i) {
      const double wi = w[base + i];
      double east_value = 0.0, west_value = 0.0;
      if (i + 1 < n) {
        east_value = w[base + i + 1];
      } else if (periodic) {
        east_value = w[base];
      }
      if (i > 0) {
        west_value = w[base + i - 1];
      } else if (periodic) {
        west_value = w[base + n - 1];
      }
      out[base + i] = flux_east[s][i] * ((east_value - wi) + em_east * east_value) +
                      flux_west[s][i] * ((west_value - wi) + em_west * west_value) +
                      reaction[s][i] * wi + coupling[s][i] * w[other + i];
    }
  }
}

std::vector<double> DiscreteOperator::apply(const std::vector<double>& w) const {
  std::vector<double> out;
  apply(w, out);
  return out;
}

bool DiscreteOperator::cooperative() const {
  for (int s = 0; s < 2; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      if (west(s, i) < 0.0 || east(s, i) < 0.0 || coupling[s][i] < 0.0) return false;
    }
  }
  return true;
}

double DiscreteOperator::norm_inf() const {
  double m = 0.0;
  for (int s = 0; s < 2; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      m = std::max(m, std::abs(west(s, i)) + std::abs(east(s, i)) + std::abs(diagonal(s, i)) +
                          std::abs(coupling[s][i]));
    }
  }
  return m;
}

std::vector<double> DiscreteOperator::dense() const {
  const std::size_t d = dim();
  std::vector<double> m(d * d, 0.0);
  const bool periodic = boundary == Boundary::periodic;
  for (int s = 0; s < 2; ++s) {
    const std::size_t base = static_cast<std::size_t>(s) * n;
    const std::size_t other = static_cast<std::size_t>(1 - s) * n;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t row = (base + i) * d;
      m[row + base + i] += diagonal(s, i);
      m[row + other + i] += coupling[s][i];
      if (i + 1 < n || periodic) m[row + base + (i + 1) % n] += east(s, i);
      if (i > 0 || periodic) m[row + base + (i + n - 1) % n] += west(s, i);
    }
  }
  return m;
}

DiscreteOperator build_operator(const CoefficientSet& set, double lambda, const GridSpec& grid) {
  check_grid(grid);
  if (!std::isfinite(lambda)) throw ValidationError("build_operator: lambda must be finite");
  std::size_t n = grid.n_cells;
  const double L = set.period();
  while (L / static_cast<double>(n) * std::abs(lambda) * set.sigma_max() > set.sigma_min()) {
    n *= 2;
    if (n > max_cells) {
      throw NumericalError("build_operator: Peclet refinement exceeded the cell cap",
                           "lambda " + numerics::format_double(lambda));
    }
  }
  return assemble_periodic(set, lambda, n);
}

DiscreteOperator build_dirichlet_operator(const CoefficientSet& set, double R, const GridSpec& grid) {
  check_grid(grid);
  if (!(R > 0.0) || !std::isfinite(R)) {
    throw ValidationError("dirichlet_eigenvalue: R must be positive");
  }
  const double cells = std::round(static_cast<double>(grid.n_cells) * 2.0 * R / set.period());
  const auto m = std::max<std::size_t>(min_cells, static_cast<std::size_t>(cells));
  if (m > max_cells) {
    throw NumericalError("build_dirichlet_operator: interval needs more than the cell cap");
  }
  DiscreteOperator op;
  op.boundary = Boundary::dirichlet;
  op.lambda = 0.0;
  op.n = m - 1;
  op.h = 2.0 * R / static_cast<double>(m);
  op.x.resize(op.n);
  const double inv_h2 = 1.0 / (op.h * op.h);
  for (int s = 0; s < 2; ++s) {
    op.flux_west[s].resize(op.n);
    op.flux_east[s].resize(op.n);
  }
  for (std::size_t i = 0; i < op.n; ++i) {
    op.x[i] = -R + op.h * static_cast<double>(i + 1);
    const double west = set.sigma()(op.x[i] - 0.5 * op.h) * inv_h2;
    const double east = set.sigma()(op.x[i] + 0.5 * op.h) * inv_h2;
    for (int s = 0; s < 2; ++s) {
      op.flux_west[s][i] = west;
      op.flux_east[s][i] = east;
    }
  }
  fill_species_terms(set, op);
  return op;
}

EigenResult principal_eigenpair(const DiscreteOperator& op, const EigenOptions& options,
                                const std::vector<double>* start) {
  if (op.n < 2) throw ContractViolation("principal_eigenpair: operator too small");
  if (!op.cooperative()) {
    throw ContractViolation("principal_eigenpair: operator has negative off-diagonal entries");
  }
  std::vector<double> w;
  if (start != nullptr) {
    if (start->size() != op.dim()) {
      throw ContractViolation("principal_eigenpair: start vector has the wrong size");
    }
    for (double v : *start) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw ContractViolation("principal_eigenpair: start vector must be positive");
      }
    }
    w = *start;
  } else {
    w.assign(op.dim(), 1.0);
    if (op.boundary == Boundary::dirichlet) {
      const double R = 0.5 * op.h * static_cast<double>(op.n + 1);
      for (std::size_t i = 0; i < op.n; ++i) {
        w[i] = w[op.n + i] = std::cos(0.5 * std::numbers::pi * op.x[i] / R);
      }
    }
  }
  scale_to_unit(w);
  // Rounding in (shift - M)^{-1} leaves a residual of order eps*|M|.
  const double residual_tol =
      std::max(options.residual_tolerance, 16.0 * eps * op.norm_inf());
  if (options.method == Method::shifted_power) {
    return shifted_power_iteration(op, options, std::move(w), residual_tol);
  }
  return resolvent_iteration(op, options, std::move(w), residual_tol);
}

std::vector<double> resample_periodic(const std::vector<double>& w, std::size_t n) {
  const std::size_t m = w.size() / 2;
  if (m == n) return w;
  std::vector<double> out(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = static_cast<double>(j) * static_cast<double>(m) / static_cast<double>(n);
    auto k = static_cast<std::size_t>(t);
    if (k >= m) k = m - 1;
    const double frac = t - static_cast<double>(k);
    for (std::size_t s = 0; s < 2; ++s) {
      out[s * n + j] = w[s * m + k] * (1.0 - frac) + w[s * m + (k + 1) % m] * frac;
    }
  }
  return out;
}

KEvaluator::KEvaluator(const CoefficientSet& set, GridSpec grid, EigenOptions options)
    : set_(set), grid_(grid), options_(options) {
  check_grid(grid_);
  if (grid_.boundary != Boundary::periodic) {
    throw ValidationError("k(lambda) needs a periodic grid");
  }
}

EigenResult KEvaluator::solve(double lambda, std::size_t n) {
  GridSpec g = grid_;
  g.n_cells = n;
  const DiscreteOperator op = build_operator(set_, lambda, g);
  std::vector<double> start;
  if (!warm_.empty()) start = resample_periodic(warm_, op.n);
  EigenResult result = principal_eigenpair(op, options_, start.empty() ? nullptr : &start);
  warm_ = result.phi;
  warm_.insert(warm_.end(), result.psi.begin(), result.psi.end());
  ++evaluations_;
  return result;
}

EigenResult KEvaluator::operator()(double lambda) {
  // Start one level below the coarse grid of the last accepted pair.
  const std::size_t n0 = std::max(grid_.n_cells, accepted_coarse_n_ / 2);
  EigenResult coarse = solve(lambda, n0);
  if (!(grid_.refine_tolerance > 0.0)) return coarse;
  while (true) {
    if (2 * coarse.n_cells > max_cells) {
      std::ostringstream diag;
      diag << "lambda " << lambda << ", last gap at n=" << coarse.n_cells;
      throw NumericalError("k_of_lambda: grid refinement exceeded the cell cap", diag.str());
    }
    EigenResult fine = solve(lambda, 2 * coarse.n_cells);
    const double gap = std::abs(fine.value - coarse.value);
    fine.refinement_gap = gap;
    if (gap < grid_.refine_tolerance) {
      accepted_coarse_n_ = coarse.n_cells;
      return fine;
    }
    coarse = std::move(fine);
  }
}

EigenResult k_of_lambda(const CoefficientSet& set, double lambda, const GridSpec& grid,
                        const EigenOptions& options) {
  KEvaluator evaluator(set, grid, options);
  return evaluator(lambda);
}

EigenResult dirichlet_eigenvalue(const CoefficientSet& set, double R, const GridSpec& grid,
                                 const EigenOptions& options) {
  return principal_eigenpair(build_dirichlet_operator(set, R, grid), options);
}

double minimax_check(const CoefficientSet& set, double lambda, const GridSpec& grid,
                     const std::vector<double>& phi, const std::vector<double>& psi) {
  const DiscreteOperator op = build_operator(set, lambda, grid);
  if (phi.size() != op.n || psi.size() != op.n) {
    throw ContractViolation("minimax_check: test pair must have " + std::to_string(op.n) +
                            " nodes per species");
  }
  std::vector<double> w(phi);
  w.insert(w.end(), psi.begin(), psi.end());
  for (double v : w) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ContractViolation("minimax_check: test pair must be strictly positive");
    }
  }
  const auto mw = op.apply(w);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i) best = std::max(best, mw[i] / w[i]);
  return best;
}

std::size_t grid_count(double min, double max, double step) {
  if (!(step > 0.0) || !std::isfinite(step) || !std::isfinite(min) || !std::isfinite(max) ||
      max < min) {
    throw ValidationError("lambda grid: need min <= max and a positive step");
  }
  return static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
}

std::vector<KPoint> k_curve(const CoefficientSet& set, double lambda_min, double lambda_max,
                            double lambda_step, const GridSpec& grid, const EigenOptions& options) {
  const std::size_t count = grid_count(lambda_min, lambda_max, lambda_step);
  KEvaluator evaluator(set, grid, options);
  std::vector<KPoint> curve;
  curve.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double lambda = lambda_min + lambda_step * static_cast<double>(i);
    curve.push_back({lambda, evaluator(lambda)});
  }
  return curve;
}

void write_k_curve_csv(std::ostream& out, const std::vector<KPoint>& curve) {
  using numerics::format_double;
  out << "lambda,k,residual,n_cells\n";
  for (const auto& p : curve) {
    out << format_double(p.lambda) << ',' << format_double(p.result.value) << ','
        << format_double(p.result.residual) << ',' << p.result.n_cells << '\n';
  }
}

void write_profile_csv(std::ostream& out, const EigenResult& result) {
  using numerics::format_double;
  out << "x,phi,psi\n";
  for (std::size_t i = 0; i < result.phi.size(); ++i) {
    out << format_double(result.x[i]) << ',' << format_double(result.phi[i]) << ','
        << format_double(result.psi[i]) << '\n';
  }
}

void write_dirichlet_csv(std::ostream& out, const std::vector<DirichletPoint>& points) {
  using numerics::format_double;
  out << "R,lambda1R\n";
  for (const auto& p : points) {
    out << format_double(p.R) << ',' << format_double(p.lambda1) << '\n';
  }
}

}  // namespace frontlab::eigen
