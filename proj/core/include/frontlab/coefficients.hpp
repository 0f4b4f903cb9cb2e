#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace frontlab::coefficients {

enum class Kind { constant, cosine, piecewise_constant, table };

std::string_view kind_name(Kind kind);

/// Extra cosine mode: amplitude * cos(2*pi*multiple*(x + phase)/L).
struct Harmonic {
  double amplitude = 0.0;
  int multiple = 1;
  double phase = 0.0;

  friend bool operator==(const Harmonic&, const Harmonic&) = default;
};

/// One L-periodic scalar coefficient.
///
/// Every spec carries the period it is bound to (1 unless rebound through
/// with_period). Breakpoints and phases are in the same absolute units as x.
///
///   constant            value
///   cosine              mean + amplitude*cos(2*pi*(x+phase)/L) + harmonics
///   piecewise_constant  values[i] on [breakpoints[i], breakpoints[i+1]),
///                       the last value wraps around to [0, breakpoints[0])
///   table               samples at x_j = j*L/m, periodic linear interpolation
class CoefficientSpec {
 public:
  static CoefficientSpec constant(double value);
  static CoefficientSpec cosine(double mean, double amplitude, double phase = 0.0,
                                std::vector<Harmonic> harmonics = {});
  static CoefficientSpec piecewise_constant(std::vector<double> breakpoints,
                                            std::vector<double> values);
  static CoefficientSpec table(std::vector<double> samples);

  Kind kind() const noexcept { return kind_; }
  double period() const noexcept { return period_; }

  /// Rebinds the spec to period L. Breakpoints must lie in [0, L).
  CoefficientSpec with_period(double period) const;

  double operator()(double x) const;

  /// False for piecewise-constant specs (no derivative at the jumps).
  bool smooth() const noexcept { return kind_ != Kind::piecewise_constant; }

  /// x -> f(x/eps); the period becomes eps*L.
  CoefficientSpec rescaled(double eps) const;
  /// x -> f(-x).
  CoefficientSpec mirrored() const;

  /// Boundaries 0 = b_0 < ... < b_m = L of the intervals on which the spec
  /// is smooth (one interval for constant and cosine specs).
  std::vector<double> segment_bounds() const;
  /// Smooth continuation of the spec on segment `segment`, valid on the closed interval.
  double evaluate_on_segment(std::size_t segment, double x) const;

  double value() const noexcept { return value_; }
  double mean() const noexcept { return value_; }
  double amplitude() const noexcept { return amplitude_; }
  double phase() const noexcept { return phase_; }
  const std::vector<Harmonic>& harmonics() const noexcept { return harmonics_; }
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& samples() const noexcept { return values_; }

  friend bool operator==(const CoefficientSpec&, const CoefficientSpec&) = default;

 private:
  CoefficientSpec() = default;
  void validate() const;
  double wrap(double x) const;

  Kind kind_ = Kind::constant;
  double period_ = 1.0;
  double value_ = 0.0;  // constant value or cosine mean
  double amplitude_ = 0.0;
  double phase_ = 0.0;
  std::vector<Harmonic> harmonics_;
  std::vector<double> breakpoints_;
  std::vector<double> values_;  // piecewise values or table samples
};

double evaluate(const CoefficientSpec& spec, double x);

/// a*f + b*g, kept in closed form. Throws ValidationError when the two kinds
/// cannot be combined exactly (e.g. a cosine plus a piecewise-constant spec).
CoefficientSpec linear_combination(double a, const CoefficientSpec& f, double b,
                                   const CoefficientSpec& g);

enum class Field { sigma, r_u, r_v, kappa_u, kappa_v, mu_u, mu_v };

inline constexpr std::array<Field, 7> all_fields{Field::sigma,   Field::r_u,     Field::r_v,
                                                 Field::kappa_u, Field::kappa_v, Field::mu_u,
                                                 Field::mu_v};

std::string_view field_name(Field field);
/// Throws ValidationError for unknown names.
Field field_from_name(std::string_view name);
/// sigma, kappa and mu must be positive; the growth rates may change sign.
bool must_be_positive(Field field);

struct Coefficients {
  CoefficientSpec sigma = CoefficientSpec::constant(1.0);
  CoefficientSpec r_u = CoefficientSpec::constant(1.0);
  CoefficientSpec r_v = CoefficientSpec::constant(1.0);
  CoefficientSpec kappa_u = CoefficientSpec::constant(1.0);
  CoefficientSpec kappa_v = CoefficientSpec::constant(1.0);
  CoefficientSpec mu_u = CoefficientSpec::constant(1.0);
  CoefficientSpec mu_v = CoefficientSpec::constant(1.0);

  const CoefficientSpec& operator[](Field field) const;
  CoefficientSpec& operator[](Field field);

  friend bool operator==(const Coefficients&, const Coefficients&) = default;
};

/// The seven L-periodic coefficients of the two-species system, validated
/// and immutable.
class CoefficientSet {
 public:
  static constexpr std::size_t probe_points = 8192;

  CoefficientSet(double period, Coefficients fields);

  double period() const noexcept { return period_; }
  const Coefficients& fields() const noexcept { return fields_; }
  const CoefficientSpec& operator[](Field field) const { return fields_[field]; }

  const CoefficientSpec& sigma() const noexcept { return fields_.sigma; }
  const CoefficientSpec& r_u() const noexcept { return fields_.r_u; }
  const CoefficientSpec& r_v() const noexcept { return fields_.r_v; }
  const CoefficientSpec& kappa_u() const noexcept { return fields_.kappa_u; }
  const CoefficientSpec& kappa_v() const noexcept { return fields_.kappa_v; }
  const CoefficientSpec& mu_u() const noexcept { return fields_.mu_u; }
  const CoefficientSpec& mu_v() const noexcept { return fields_.mu_v; }

  // Extrema over the probe grid.
  double sigma_min() const noexcept { return sigma_min_; }
  double sigma_max() const noexcept { return sigma_max_; }
  double r_min() const noexcept { return r_min_; }
  double r_max() const noexcept { return r_max_; }
  double kappa_min() const noexcept { return kappa_min_; }
  /// r_max / kappa_min, the asymptotic bound on u + v.
  double k_bar() const noexcept { return r_max_ / kappa_min_; }

  /// Every field is a constant spec.
  bool homogeneous() const;
  /// Non-fatal remarks collected during validation (e.g. non-smooth sigma).
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  CoefficientSet with_field(Field field, CoefficientSpec spec) const;
  CoefficientSet mirrored() const;

  friend bool operator==(const CoefficientSet& a, const CoefficientSet& b) {
    return a.period_ == b.period_ && a.fields_ == b.fields_;
  }

 private:
  double period_;
  Coefficients fields_;
  double sigma_min_ = 0, sigma_max_ = 0, r_min_ = 0, r_max_ = 0, kappa_min_ = 0;
  std::vector<std::string> warnings_;
};

/// Rates of the SIS model that reduces to the two-species system.
struct SisRates {
  // zero rates fail validation in from_sis, so every rate must be set
  CoefficientSpec beta1 = CoefficientSpec::constant(0.0);
  CoefficientSpec beta2 = CoefficientSpec::constant(0.0);
  CoefficientSpec gamma1 = CoefficientSpec::constant(0.0);
  CoefficientSpec gamma2 = CoefficientSpec::constant(0.0);
  CoefficientSpec mu1 = CoefficientSpec::constant(0.0);
  CoefficientSpec mu2 = CoefficientSpec::constant(0.0);
  CoefficientSpec sigma = CoefficientSpec::constant(1.0);
};

/// r_u = N*beta1 - gamma1, r_v = N*beta2 - gamma2, kappa = beta, mu = mu.
CoefficientSet from_sis(double total_population, const SisRates& rates, double period);

/// Rapidly oscillating version: every coefficient becomes x -> f(x/eps).
CoefficientSet rescale_epsilon(const CoefficientSet& set, double eps);

struct HomogenizedSet {
  double period = 1.0;
  double mean_sigma = 0.0;
  double sigma_h = 0.0;  // harmonic mean of sigma
  double mean_r_u = 0.0;
  double mean_r_v = 0.0;
  double mean_kappa_u = 0.0;
  double mean_kappa_v = 0.0;
  double mean_mu_u = 0.0;
  double mean_mu_v = 0.0;
};

/// Period averages (harmonic for sigma) by segment-wise trapezoid quadrature
/// with doubling refinement.
HomogenizedSet homogenize(const CoefficientSet& set);

/// Mean of `spec` over one period, or of 1/spec when `reciprocal` is set.
double period_mean(const CoefficientSpec& spec, bool reciprocal = false);

}  // namespace frontlab::coefficients
