#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "frontlab/coefficients.hpp"

namespace frontlab::eigen {

using coefficients::CoefficientSet;

enum class Boundary { periodic, dirichlet };

/// Discretization settings.
///
/// Periodic problems use n_cells nodes per period, h = L/n_cells. Dirichlet
/// problems on (-R, R) keep the same resolution: n_cells is read as cells per
/// period, so the interval gets max(16, round(n_cells*2R/L)) cells.
struct GridSpec {
  std::size_t n_cells = 256;
  Boundary boundary = Boundary::periodic;
  /// k_of_lambda doubles the grid until |k_n - k_2n| falls below this; <= 0 disables.
  double refine_tolerance = 1e-7;
};

inline constexpr std::size_t min_cells = 16;
inline constexpr std::size_t max_cells = std::size_t{1} << 20;

/// Two-species operator conjugated by e^{lambda x}:
///   (M w)_s,i = flux_east[s][i] * (e^{-lambda h} w_s,i+1 - w_s,i)
///             + flux_west[s][i] * (e^{ lambda h} w_s,i-1 - w_s,i)
///             + reaction[s][i] * w_s,i + coupling[s][i] * w_other,i
/// flux_* = sigma(face)/h^2, reaction = r_s - mu_s, coupling = mu of the other
/// species. Vectors are laid out as (u block, v block), dimension 2n.
struct DiscreteOperator {
  Boundary boundary = Boundary::periodic;
  double lambda = 0.0;
  double h = 0.0;
  std::size_t n = 0;
  std::vector<double> x;  // node positions
  std::array<std::vector<double>, 2> flux_west, flux_east, reaction, coupling;

  std::size_t dim() const noexcept { return 2 * n; }
  /// Matrix entries. west/east are zero for missing Dirichlet neighbours.
  double west(int s, std::size_t i) const;
  double east(int s, std::size_t i) const;
  double diagonal(int s, std::size_t i) const;

  void apply(const std::vector<double>& w, std::vector<double>& out) const;
  std::vector<double> apply(const std::vector<double>& w) const;
  /// Every off-diagonal entry is >= 0.
  bool cooperative() const;
  double norm_inf() const;
  /// Dense row-major copy, for small grids and tests.
  std::vector<double> dense() const;
};

/// Periodic operator for k(lambda). Doubles n_cells until h*|lambda|*sigma_max <=
/// sigma_min; throws NumericalError beyond max_cells.
DiscreteOperator build_operator(const CoefficientSet& set, double lambda, const GridSpec& grid);

/// lambda = 0 operator on the interior nodes of (-R, R), zero boundary values.
DiscreteOperator build_dirichlet_operator(const CoefficientSet& set, double R, const GridSpec& grid);

enum class Method {
  resolvent,      // power iteration on (s I - M)^{-1}, shifts from Collatz-Wielandt bounds
  shifted_power,  // power iteration on M + s I, s = 1 + max(0, -min diagonal)
};

struct EigenOptions {
  Method method = Method::resolvent;
  double value_tolerance = 1e-12;
  double residual_tolerance = 1e-9;
  std::size_t max_iterations = 1'000'000;
};

struct EigenResult {
  double value = 0.0;
  std::vector<double> phi, psi;
  std::vector<double> x;
  double lambda = 0.0;
  Boundary boundary = Boundary::periodic;
  std::size_t n_cells = 0;
  double h = 0.0;
  std::size_t iterations = 0;
  double residual = 0.0;
  /// Collatz-Wielandt bracket of the Perron root at the final iterate.
  double lower_bound = 0.0, upper_bound = 0.0;
  /// |k_n - k_2n| of the last refinement pair, NaN when no refinement ran.
  double refinement_gap = std::numeric_limits<double>::quiet_NaN();
};

/// Perron eigenpair of a cooperative operator. Throws ContractViolation for a
/// non-cooperative operator and NumericalError when the iteration cap is hit.
/// `start`, if given, must be a positive vector of size op.dim().
EigenResult principal_eigenpair(const DiscreteOperator& op, const EigenOptions& options = {},
                                const std::vector<double>* start = nullptr);

/// k(lambda) with warm starts carried between calls. Not thread-safe; use one
/// evaluator per thread.
class KEvaluator {
 public:
  KEvaluator(const CoefficientSet& set, GridSpec grid, EigenOptions options = {});

  EigenResult operator()(double lambda);
  std::size_t evaluations() const noexcept { return evaluations_; }
  const CoefficientSet& set() const noexcept { return set_; }

 private:
  EigenResult solve(double lambda, std::size_t n);

  CoefficientSet set_;
  GridSpec grid_;
  EigenOptions options_;
  std::vector<double> warm_;
  std::size_t accepted_coarse_n_ = 0;
  std::size_t evaluations_ = 0;
};

/// k(lambda), refining the grid until |k_n - k_2n| < grid.refine_tolerance.
EigenResult k_of_lambda(const CoefficientSet& set, double lambda, const GridSpec& grid,
                        const EigenOptions& options = {});

/// lambda_1^R on (-R, R); phi, psi hold the interior nodes only.
EigenResult dirichlet_eigenvalue(const CoefficientSet& set, double R, const GridSpec& grid,
                                 const EigenOptions& options = {});

/// max over nodes of max((M w)_u/phi, (M w)_v/psi) for the operator at `lambda`
/// on `grid` (after the Peclet refinement). phi, psi must be positive and of
/// the refined size.
double minimax_check(const CoefficientSet& set, double lambda, const GridSpec& grid,
                     const std::vector<double>& phi, const std::vector<double>& psi);

/// Linear resampling of a periodic (u block, v block) vector to n nodes.
std::vector<double> resample_periodic(const std::vector<double>& w, std::size_t n);

struct KPoint {
  double lambda = 0.0;
  EigenResult result;
};

/// k over an inclusive lambda grid; evaluated in order with warm starts.
std::vector<KPoint> k_curve(const CoefficientSet& set, double lambda_min, double lambda_max,
                            double lambda_step, const GridSpec& grid,
                            const EigenOptions& options = {});

/// Number of grid points in [min, max] with the given step (tolerant to rounding).
std::size_t grid_count(double min, double max, double step);

void write_k_curve_csv(std::ostream& out, const std::vector<KPoint>& curve);
void write_profile_csv(std::ostream& out, const EigenResult& result);

struct DirichletPoint {
  double R = 0.0;
  double lambda1 = 0.0;
};
void write_dirichlet_csv(std::ostream& out, const std::vector<DirichletPoint>& points);

}  // namespace frontlab::eigen
