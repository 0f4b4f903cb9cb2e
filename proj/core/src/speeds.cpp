#include "frontlab/speeds.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <tuple>

#include "frontlab/error.hpp"
#include "frontlab/numerics.hpp"
#include "frontlab/ode.hpp"

namespace frontlab::speeds {

namespace {

Indicator decide(double value, double band) {
  if (value > band) return Indicator::yes;
  if (value < -band) return Indicator::no;
  return Indicator::inconclusive;
}

struct HalfLineMinimum {
  double lambda = 0.0;
  double speed = 0.0;
};

// min over lambda in [floor, hi] of k(direction*lambda)/lambda, doubling hi while
// the minimizer sits at the right end.
HalfLineMinimum half_line_speed(eigen::KEvaluator& k, double direction, double lambda_hi,
                                const SpeedOptions& options) {
  double hi = lambda_hi;
  for (int expansion = 0; expansion <= options.max_bracket_doublings; ++expansion) {
    auto g = [&](double lambda) { return k(direction * lambda).value / lambda; };
    const auto best =
        numerics::golden_section_minimize(g, options.lambda_floor, hi, options.lambda_tolerance);
    if (hi - best.x > 10.0 * options.lambda_tolerance) return {best.x, best.value};
    hi *= 2.0;
  }
  std::ostringstream diag;
  diag << "bracket reached " << hi << " for direction " << direction;
  throw NumericalError("spreading_speeds: bracket expansion cap reached", diag.str());
}

double lambda_upper(const CoefficientSet& set) {
  return 2.0 * std::sqrt(std::max(set.r_max(), 0.0) / set.sigma_min()) + 1.0;
}

}  // namespace

SpeedBounds speed_bounds(const CoefficientSet& set) {
  SpeedBounds b;
  if (set.r_min() > 0.0) b.low = 2.0 * std::sqrt(set.sigma_min() * set.r_min());
  b.high = 2.0 * std::sqrt(set.sigma_max() * std::max(set.r_max(), 0.0));
  return b;
}

std::pair<double, double> k_minimum(eigen::KEvaluator& k, double lambda_hi, double tol) {
  const auto best = numerics::golden_section_minimize(
      [&](double lambda) { return k(lambda).value; }, -lambda_hi, lambda_hi, tol);
  return {best.value, best.x};
}

SpeedReport spreading_speeds(const CoefficientSet& set, const eigen::GridSpec& grid,
                             const SpeedOptions& options,
                             const eigen::EigenOptions& eigen_options) {
  if (!(options.lambda_floor > 0.0) || !(options.lambda_tolerance > 0.0)) {
    throw ValidationError("speed: lambda_floor and lambda_tolerance must be positive");
  }
  eigen::KEvaluator k(set, grid, eigen_options);
  SpeedReport report;
  report.k_zero = k(0.0).value;
  if (!(report.k_zero > 0.0)) {
    std::ostringstream msg;
    msg << "spreading_speeds: needs the periodic principal eigenvalue k(0) > 0 (got "
        << report.k_zero << ")";
    throw PreconditionError(msg.str());
  }
  const double hi = lambda_upper(set);
  const auto right = half_line_speed(k, 1.0, hi, options);
  const auto left = half_line_speed(k, -1.0, hi, options);
  report.c_right = right.speed;
  report.argmin_lambda_right = right.lambda;
  report.c_left = left.speed;
  report.argmin_lambda_left = -left.lambda;
  std::tie(report.k_min, report.argmin_k) = k_minimum(k, hi, options.lambda_tolerance);
  report.k_min = std::min(report.k_min, report.k_zero);
  const auto bounds = speed_bounds(set);
  report.bound_low = bounds.low;
  report.bound_high = bounds.high;
  report.hair_trigger = report.k_min > 0.0;
  report.evaluations = k.evaluations();
  return report;
}

std::string_view indicator_name(Indicator indicator) {
  switch (indicator) {
    case Indicator::yes:
      return "yes";
    case Indicator::no:
      return "no";
    case Indicator::not_applicable:
      return "not_applicable";
    case Indicator::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

bool HairTriggerReport::consistent() const {
  std::optional<Indicator> seen;
  for (Indicator i : {a, b, c}) {
    if (i != Indicator::yes && i != Indicator::no) continue;
    if (seen && *seen != i) return false;
    seen = i;
  }
  return true;
}

HairTriggerReport hair_trigger_check(const CoefficientSet& set, const eigen::GridSpec& grid,
                                     const SpeedOptions& options,
                                     const eigen::EigenOptions& eigen_options) {
  HairTriggerReport report;
  double best = -INFINITY;
  for (int j = 0; j <= 6; ++j) {
    const double R = set.period() * std::ldexp(1.0, j);
    const auto result = eigen::dirichlet_eigenvalue(set, R, grid, eigen_options);
    report.dirichlet.push_back({R, result.value});
    best = std::max(best, result.value);
  }
  report.a = decide(best, options.band);

  eigen::KEvaluator k(set, grid, eigen_options);
  const double k_zero = k(0.0).value;
  report.k_min =
      std::min(k_zero, k_minimum(k, lambda_upper(set), options.lambda_tolerance).first);
  report.b = decide(report.k_min, options.band);

  if (!(k_zero > 0.0)) {
    report.c = Indicator::not_applicable;
  } else {
    const auto speeds = spreading_speeds(set, grid, options, eigen_options);
    report.c_right = speeds.c_right;
    report.c_left = speeds.c_left;
    report.c = decide(std::min(speeds.c_right, speeds.c_left), options.band);
  }
  return report;
}

double homogenized_speed(const coefficients::HomogenizedSet& h) {
  const ode::HomParams p = ode::from_homogenized(h);
  const double lambda = ode::lambda_A(p);
  if (!(lambda > 0.0)) {
    std::ostringstream msg;
    msg << "homogenized_speed: needs lambda_A > 0 for the mean coefficients (got " << lambda << ")";
    throw PreconditionError(msg.str());
  }
  return 2.0 * std::sqrt(h.sigma_h * lambda);
}

nlohmann::json to_json(const SpeedReport& r) {
  nlohmann::json j{{"c_right", r.c_right},
                   {"c_left", r.c_left},
                   {"argmin_lambda_right", r.argmin_lambda_right},
                   {"argmin_lambda_left", r.argmin_lambda_left},
                   {"k_zero", r.k_zero},
                   {"k_min", r.k_min},
                   {"argmin_k", r.argmin_k},
                   {"bound_high", r.bound_high},
                   {"hair_trigger", r.hair_trigger},
                   {"evaluations", r.evaluations}};
  j["bound_low"] = r.bound_low ? nlohmann::json(*r.bound_low) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const HairTriggerReport& r) {
  nlohmann::json sweep = nlohmann::json::array();
  for (const auto& p : r.dirichlet) sweep.push_back({{"R", p.R}, {"lambda1R", p.lambda1}});
  nlohmann::json j{{"a", indicator_name(r.a)},
                   {"b", indicator_name(r.b)},
                   {"c", indicator_name(r.c)},
                   {"consistent", r.consistent()},
                   {"k_min", r.k_min},
                   {"dirichlet", sweep}};
  j["c_right"] = r.c_right ? nlohmann::json(*r.c_right) : nlohmann::json(nullptr);
  j["c_left"] = r.c_left ? nlohmann::json(*r.c_left) : nlohmann::json(nullptr);
  return j;
}

void write_speed_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve) {
  using numerics::format_double;
  out << "lambda,k,k_over_lambda\n";
  for (const auto& p : curve) {
    out << format_double(p.lambda) << ',' << format_double(p.k) << ',';
    if (p.lambda != 0.0) out << format_double(p.k / p.lambda);
    out << '\n';
  }
}

}  // namespace frontlab::speeds
