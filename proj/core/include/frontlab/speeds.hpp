#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "frontlab/coefficients.hpp"
#include "frontlab/eigen.hpp"

namespace frontlab::speeds {

using coefficients::CoefficientSet;

struct SpeedOptions {
  double lambda_floor = 1e-4;
  double lambda_tolerance = 1e-6;
  int max_bracket_doublings = 16;
  /// Sign decisions within +-band of zero are inconclusive.
  double band = 1e-4;
};

struct SpeedBounds {
  std::optional<double> low;  // 2 sqrt(sigma_min r_min), only when r_min > 0
  double high = 0.0;          // 2 sqrt(sigma_max r_max)
};

SpeedBounds speed_bounds(const CoefficientSet& set);

struct SpeedReport {
  double c_right = 0.0, c_left = 0.0;
  double argmin_lambda_right = 0.0;  // > 0
  double argmin_lambda_left = 0.0;   // < 0
  double k_zero = 0.0;               // periodic principal eigenvalue k(0)
  double k_min = 0.0;
  double argmin_k = 0.0;
  std::optional<double> bound_low;
  double bound_high = 0.0;
  bool hair_trigger = false;  // k_min > 0
  std::size_t evaluations = 0;
};

/// Right and left spreading speeds by golden-section search on k(lambda)/lambda.
/// Throws PreconditionError when k(0) <= 0 and NumericalError when the bracket
/// expansion cap is reached.
SpeedReport spreading_speeds(const CoefficientSet& set, const eigen::GridSpec& grid,
                             const SpeedOptions& options = {},
                             const eigen::EigenOptions& eigen_options = {});

/// min over lambda of k(lambda) and its argmin.
std::pair<double, double> k_minimum(eigen::KEvaluator& k, double lambda_hi, double tol);

enum class Indicator { yes, no, not_applicable, inconclusive };
std::string_view indicator_name(Indicator indicator);

struct HairTriggerReport {
  Indicator a = Indicator::inconclusive;  // some lambda_1^R > 0, R in {L, ..., 64L}
  Indicator b = Indicator::inconclusive;  // k_min > 0
  Indicator c = Indicator::inconclusive;  // both speeds > 0
  std::vector<eigen::DirichletPoint> dirichlet;
  double k_min = 0.0;
  std::optional<double> c_right, c_left;

  /// The decided indicators agree.
  bool consistent() const;
};

HairTriggerReport hair_trigger_check(const CoefficientSet& set, const eigen::GridSpec& grid,
                                     const SpeedOptions& options = {},
                                     const eigen::EigenOptions& eigen_options = {});

/// 2 sqrt(sigma_H lambda_A) with lambda_A from the mean coefficients.
/// Throws PreconditionError when lambda_A <= 0.
double homogenized_speed(const coefficients::HomogenizedSet& h);

nlohmann::json to_json(const SpeedReport& report);
nlohmann::json to_json(const HairTriggerReport& report);

struct CurvePoint {
  double lambda = 0.0, k = 0.0;
};
/// lambda,k,k_over_lambda (the last column empty at lambda = 0).
void write_speed_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve);

}  // namespace frontlab::speeds
