#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "frontlab/coefficients.hpp"

namespace frontlab::pde {

using coefficients::CoefficientSet;

enum class BoundaryKind { neumann, dirichlet_zero, periodic };
std::string_view boundary_name(BoundaryKind kind);
BoundaryKind boundary_from_name(std::string_view name);

/// Truncated spatial domain. Neumann and Dirichlet grids include both end
/// points (h = (x_max - x_min)/(n_points - 1)); periodic grids omit x_max.
struct DomainSpec {
  double x_min = -50.0;
  double x_max = 50.0;
  std::size_t n_points = 1024;
  BoundaryKind boundary = BoundaryKind::neumann;

  double spacing() const;
  std::vector<double> nodes() const;
  /// x_max - x_min >= min_length and n_points >= 256.
  void validate(double min_length) const;
};

enum class InitialKind { right_front_like, left_front_like, compact_bump, periodic_pair, constant_pair };
std::string_view initial_kind_name(InitialKind kind);
InitialKind initial_kind_from_name(std::string_view name);

/// u0 = amplitude * u_weight * profile(x), v0 = amplitude * v_weight * profile(x).
///
///   right_front_like  1 on x <= left, linear ramp to 0 at right, 0 beyond
///   left_front_like   mirror image: 0 up to left, 1 from right on
///   compact_bump      raised cosine supported in [left, right]
///   periodic_pair     1 + modulation*cos(2 pi x / L)
///   constant_pair     1
struct InitialData {
  InitialKind kind = InitialKind::right_front_like;
  std::optional<double> amplitude;  // default: K bar
  double u_weight = 0.5, v_weight = 0.5;
  double left = 0.0, right = 1.0;
  double modulation = 0.0;
};

struct FieldState {
  double t = 0.0;
  std::vector<double> x, u, v;
  /// Running max of sup(u + v).
  double mass_max = 0.0;
  /// max(K bar, sup(u0 + v0)); a step that ends above bound + 1e-8 throws InvariantBreach.
  double bound = 0.0;
};

double sup_sum(const FieldState& s);

struct StepStats {
  std::size_t steps = 0;
  std::size_t substeps = 0;
  std::size_t clip_count = 0;
  double max_clip = 0.0;
};

/// IMEX stepper: backward Euler for (sigma w_x)_x with a conservative flux
/// stencil, explicit reaction and mutation. Each step is split so that
/// dt_sub * Lambda <= 0.25, where Lambda bounds the reaction Lipschitz constant;
/// this keeps u, v >= 0 and u + v below max(K bar, sup(u + v)).
class Simulator {
 public:
  Simulator(const CoefficientSet& set, const DomainSpec& domain);

  const std::vector<double>& x() const noexcept { return x_; }
  const DomainSpec& domain() const noexcept { return domain_; }
  /// max(r) / min(kappa) over the probe grid and the simulation nodes.
  double k_bar() const noexcept { return k_bar_; }

  FieldState initial_state(const InitialData& init) const;
  /// State from explicit node values (checked: finite, nonnegative, right size).
  FieldState make_state(std::vector<double> u, std::vector<double> v, double t = 0.0) const;

  void step(FieldState& state, double dt);
  const StepStats& stats() const noexcept { return stats_; }

 private:
  void diffuse(std::vector<double>& w, double dt) const;

  DomainSpec domain_;
  double period_;
  double k_bar_ = 0.0;
  std::vector<double> x_;
  std::vector<double> r_u_, r_v_, kappa_u_, kappa_v_, mu_u_, mu_v_;
  std::vector<double> flux_west_, flux_east_;
  StepStats stats_;
};

/// One IMEX step of size dt (substepped as needed).
FieldState step(const CoefficientSet& set, const DomainSpec& domain, FieldState state, double dt);

struct FrontSample {
  double t = 0.0;
  double x_right = 0.0;  // NaN when min(u, v) never reaches theta
  double x_left = 0.0;
};

struct FrontTrace {
  double theta = 0.0;
  // inner 80% of the domain; unbounded for hand-built traces
  double trust_min = -std::numeric_limits<double>::infinity();
  double trust_max = std::numeric_limits<double>::infinity();
  std::vector<FrontSample> samples;
  /// Set when a front entered the outer 10% margin; later samples are untrusted.
  std::optional<double> trusted_until;
};

/// (x_right, x_left) of the level set min(u, v) = theta, linearly interpolated.
std::pair<double, double> locate_front(const std::vector<double>& x, const std::vector<double>& u,
                                       const std::vector<double>& v, double theta);

struct SimulationOptions {
  double T = 10.0;
  double dt = 0.01;
  double record_every = 0.1;
  double snapshot_every = 0.0;  // 0: only the final state
  std::optional<double> theta;  // default 0.01 * K bar
  /// Called with the state at every record time (including t = 0).
  std::function<void(const FieldState&)> observer;
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> u, v;
};

struct SimulationResult {
  FieldState state;
  FrontTrace trace;
  std::vector<Snapshot> snapshots;
  std::vector<double> x;
  StepStats stats;
  std::vector<std::string> warnings;
};

SimulationResult simulate(const CoefficientSet& set, const DomainSpec& domain,
                          const InitialData& init, const SimulationOptions& options);
SimulationResult simulate(const CoefficientSet& set, const DomainSpec& domain, FieldState initial,
                          const SimulationOptions& options);

enum class FitStatus { ok, insufficient_samples, poor_fit };
std::string_view fit_status_name(FitStatus status);

struct SideSpeed {
  std::optional<double> speed;  // present only when status == ok
  double slope = 0.0;
  double r_squared = 0.0;
  std::size_t samples = 0;
  FitStatus status = FitStatus::insufficient_samples;
};

struct SpeedMeasurement {
  SideSpeed right, left;
};

/// Least-squares slopes of x_right and -x_left against t over the last
/// `window` fraction of the trusted time range (never before the 30% burn-in).
/// Samples with a front in the outer margin are skipped.
SpeedMeasurement measure_speed(const FrontTrace& trace, double window = 0.5,
                               std::size_t min_samples = 20, double r2_threshold = 0.999);

struct StationaryOptions {
  std::size_t n_points = 256;
  double tol = 1e-9;
  double T_max = 2000.0;
  double dt = 0.05;
  bool check_hair_trigger = true;
};

struct StationaryProfile {
  std::vector<double> x, u, v;  // one period cell [0, L)
  double residual = 0.0;        // sup |w^{n+1} - w^n| / dt at exit
  double t = 0.0;
};

/// Positive L-periodic stationary pair, by time stepping from (K/2, K/2) on
/// one periodic cell. Throws PreconditionError when the hair-trigger condition
/// is not verified and NumericalError when T_max is reached.
StationaryProfile stationary_profile(const CoefficientSet& set, const StationaryOptions& options = {});

/// Periodic linear interpolation of a profile at x.
std::pair<double, double> profile_at(const StationaryProfile& profile, double period, double x);

enum class ConvergenceStatus { converged, not_converged, inconclusive };
std::string_view convergence_status_name(ConvergenceStatus status);

struct ConvergenceSample {
  double t = 0.0;
  double distance = 0.0;
};

struct ConvergenceHistory {
  std::vector<ConvergenceSample> samples;
  double target = 0.0;  // 0.02 * K bar
  double final_distance = 0.0;
  ConvergenceStatus status = ConvergenceStatus::inconclusive;
};

/// sup over |x| <= c_probe t of the distance to the stationary profile, at
/// every record time. Inconclusive when the probe window leaves the trusted
/// region before the target is reached.
ConvergenceHistory convergence_behind_front(const CoefficientSet& set, const DomainSpec& domain,
                                            const InitialData& init, double c_probe,
                                            const SimulationOptions& options,
                                            const StationaryOptions& stationary = {});
ConvergenceHistory convergence_behind_front(const CoefficientSet& set, const DomainSpec& domain,
                                            FieldState initial, double c_probe,
                                            const SimulationOptions& options,
                                            const StationaryProfile& profile);

struct ProfileShape {
  bool monotone = false;
  bool hump = false;
  double hump_height = 0.0;  // interior max minus the larger end value
  double hump_x = 0.0;
};

/// Shape of w on [a, b]: monotone up to 1e-8*max|w|, hump if an interior
/// maximum exceeds both end values by more than 1e-3*max|w|.
ProfileShape analyze_front_profile(const std::vector<double>& x, const std::vector<double>& w,
                                   double a, double b);

void write_snapshots_csv(std::ostream& out, const std::vector<double>& x,
                         const std::vector<Snapshot>& snapshots);
void write_front_csv(std::ostream& out, const FrontTrace& trace);
void write_profile_csv(std::ostream& out, const StationaryProfile& profile);

}  // namespace frontlab::pde
