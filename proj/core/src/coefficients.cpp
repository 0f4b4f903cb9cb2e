#include "frontlab/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "frontlab/error.hpp"

namespace frontlab::coefficients {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw ValidationError(std::string("coefficient spec: ") + what + " must be finite");
  }
}

}  // namespace

std::string_view kind_name(Kind kind) {
  switch (kind) {
    case Kind::constant:
      return "constant";
    case Kind::cosine:
      return "cosine";
    case Kind::piecewise_constant:
      return "piecewise_constant";
    case Kind::table:
      return "table";
  }
  return "unknown";
}

CoefficientSpec CoefficientSpec::constant(double value) {
  CoefficientSpec spec;
  spec.kind_ = Kind::constant;
  spec.value_ = value;
  spec.validate();
  return spec;
}

CoefficientSpec CoefficientSpec::cosine(double mean, double amplitude, double phase,
                                        std::vector<Harmonic> harmonics) {
  CoefficientSpec spec;
  spec.kind_ = Kind::cosine;
  spec.value_ = mean;
  spec.amplitude_ = amplitude;
  spec.phase_ = phase;
  spec.harmonics_ = std::move(harmonics);
  spec.validate();
  return spec;
}

CoefficientSpec CoefficientSpec::piecewise_constant(std::vector<double> breakpoints,
                                                    std::vector<double> values) {
  CoefficientSpec spec;
  spec.kind_ = Kind::piecewise_constant;
  spec.breakpoints_ = std::move(breakpoints);
  spec.values_ = std::move(values);
  // Provisional period when the breakpoints do not fit in [0, 1); a set rebinds it.
  if (!spec.breakpoints_.empty() && spec.breakpoints_.back() >= 1.0) {
    spec.period_ = 2.0 * spec.breakpoints_.back();
  }
  spec.validate();
  return spec;
}

CoefficientSpec CoefficientSpec::table(std::vector<double> samples) {
  CoefficientSpec spec;
  spec.kind_ = Kind::table;
  spec.values_ = std::move(samples);
  spec.validate();
  return spec;
}

void CoefficientSpec::validate() const {
  if (!(period_ > 0.0) || !std::isfinite(period_)) {
    throw ValidationError("coefficient spec: period must be positive and finite");
  }
  switch (kind_) {
    case Kind::constant:
      require_finite(value_, "value");
      break;
    case Kind::cosine:
      require_finite(value_, "mean");
      require_finite(amplitude_, "amplitude");
      require_finite(phase_, "phase");
      for (const auto& h : harmonics_) {
        require_finite(h.amplitude, "harmonic amplitude");
        require_finite(h.phase, "harmonic phase");
        if (h.multiple < 1) {
          throw ValidationError("coefficient spec: harmonic multiple must be a positive integer");
        }
      }
      break;
    case Kind::piecewise_constant:
      if (breakpoints_.empty()) {
        throw ValidationError("coefficient spec: piecewise_constant needs at least one breakpoint");
      }
      if (breakpoints_.size() != values_.size()) {
        throw ValidationError(
            "coefficient spec: piecewise_constant needs one value per breakpoint");
      }
      for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        require_finite(breakpoints_[i], "breakpoint");
        require_finite(values_[i], "value");
        if (i > 0 && !(breakpoints_[i] > breakpoints_[i - 1])) {
          throw ValidationError("coefficient spec: breakpoints must be strictly increasing");
        }
      }
      if (breakpoints_.front() < 0.0 || breakpoints_.back() >= period_) {
        std::ostringstream msg;
        msg << "coefficient spec: breakpoints must lie in [0, " << period_ << ")";
        throw ValidationError(msg.str());
      }
      break;
    case Kind::table:
      if (values_.empty()) {
        throw ValidationError("coefficient spec: table needs at least one sample");
      }
      for (double s : values_) require_finite(s, "sample");
      break;
  }
}

CoefficientSpec CoefficientSpec::with_period(double period) const {
  CoefficientSpec spec = *this;
  spec.period_ = period;
  spec.validate();
  return spec;
}

double CoefficientSpec::wrap(double x) const {
  double y = x - period_ * std::floor(x / period_);
  if (y >= period_) y -= period_;
  if (y < 0.0) y = 0.0;
  return y;
}

double CoefficientSpec::operator()(double x) const {
  switch (kind_) {
    case Kind::constant:
      return value_;
    case Kind::cosine: {
      double result = value_ + amplitude_ * std::cos(two_pi * (x + phase_) / period_);
      for (const auto& h : harmonics_) {
        result += h.amplitude * std::cos(two_pi * h.multiple * (x + h.phase) / period_);
      }
      return result;
    }
    case Kind::piecewise_constant: {
      const double y = wrap(x);
      auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), y);
      if (it == breakpoints_.begin()) return values_.back();
      return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
    }
    case Kind::table: {
      const std::size_t m = values_.size();
      const double t = wrap(x) / period_ * static_cast<double>(m);
      auto j = static_cast<std::size_t>(t);
      if (j >= m) j = m - 1;
      const double frac = t - static_cast<double>(j);
      return values_[j] * (1.0 - frac) + values_[(j + 1) % m] * frac;
    }
  }
  return 0.0;
}

double evaluate(const CoefficientSpec& spec, double x) { return spec(x); }

CoefficientSpec CoefficientSpec::rescaled(double eps) const {
  CoefficientSpec spec = *this;
  spec.period_ = period_ * eps;
  spec.phase_ = phase_ * eps;
  for (auto& h : spec.harmonics_) h.phase *= eps;
  for (auto& b : spec.breakpoints_) b *= eps;
  spec.validate();
  return spec;
}

CoefficientSpec CoefficientSpec::mirrored() const {
  CoefficientSpec spec = *this;
  switch (kind_) {
    case Kind::constant:
      break;
    case Kind::cosine:
      spec.phase_ = -phase_;
      for (auto& h : spec.harmonics_) h.phase = -h.phase;
      break;
    case Kind::piecewise_constant: {
      std::vector<double> bps;
      bps.reserve(breakpoints_.size());
      for (double b : breakpoints_) {
        double m = period_ - b;
        if (m >= period_) m -= period_;
        bps.push_back(m);
      }
      std::sort(bps.begin(), bps.end());
      std::vector<double> vals(bps.size());
      for (std::size_t i = 0; i < bps.size(); ++i) {
        const double next = i + 1 < bps.size() ? bps[i + 1] : bps.front() + period_;
        vals[i] = (*this)(-0.5 * (bps[i] + next));
      }
      spec.breakpoints_ = std::move(bps);
      spec.values_ = std::move(vals);
      break;
    }
    case Kind::table: {
      const std::size_t m = values_.size();
      for (std::size_t j = 0; j < m; ++j) spec.values_[j] = values_[(m - j) % m];
      break;
    }
  }
  spec.validate();
  return spec;
}

std::vector<double> CoefficientSpec::segment_bounds() const {
  std::vector<double> bounds{0.0};
  if (kind_ == Kind::piecewise_constant) {
    for (double b : breakpoints_) {
      if (b > 0.0) bounds.push_back(b);
    }
  } else if (kind_ == Kind::table) {
    const std::size_t m = values_.size();
    for (std::size_t j = 1; j < m; ++j) {
      bounds.push_back(period_ * static_cast<double>(j) / static_cast<double>(m));
    }
  }
  bounds.push_back(period_);
  return bounds;
}

double CoefficientSpec::evaluate_on_segment(std::size_t segment, double x) const {
  switch (kind_) {
    case Kind::constant:
    case Kind::cosine:
      return (*this)(x);
    case Kind::piecewise_constant: {
      const auto bounds = segment_bounds();
      return (*this)(0.5 * (bounds.at(segment) + bounds.at(segment + 1)));
    }
    case Kind::table: {
      const std::size_t m = values_.size();
      const double width = period_ / static_cast<double>(m);
      const double a = width * static_cast<double>(segment);
      const double s0 = values_.at(segment);
      const double s1 = values_[(segment + 1) % m];
      return s0 + (x - a) / width * (s1 - s0);
    }
  }
  return 0.0;
}

CoefficientSpec linear_combination(double a, const CoefficientSpec& f, double b,
                                   const CoefficientSpec& g) {
  if (f.period() != g.period() && f.kind() != Kind::constant && g.kind() != Kind::constant) {
    throw ValidationError("linear_combination: specs are bound to different periods");
  }
  // Put the constant (if any) second.
  if (f.kind() == Kind::constant && g.kind() != Kind::constant) {
    return linear_combination(b, g, a, f);
  }
  const double period = f.period();

  if (g.kind() == Kind::constant) {
    const double shift = b * g.value();
    switch (f.kind()) {
      case Kind::constant:
        return CoefficientSpec::constant(a * f.value() + shift);
      case Kind::cosine: {
        auto harmonics = f.harmonics();
        for (auto& h : harmonics) h.amplitude *= a;
        return CoefficientSpec::cosine(a * f.mean() + shift, a * f.amplitude(), f.phase(),
                                       std::move(harmonics))
            .with_period(period);
      }
      case Kind::piecewise_constant: {
        auto values = f.values();
        for (auto& v : values) v = a * v + shift;
        return CoefficientSpec::piecewise_constant(f.breakpoints(), std::move(values))
            .with_period(period);
      }
      case Kind::table: {
        auto samples = f.samples();
        for (auto& s : samples) s = a * s + shift;
        return CoefficientSpec::table(std::move(samples)).with_period(period);
      }
    }
  }

  if (f.kind() == Kind::cosine && g.kind() == Kind::cosine) {
    std::vector<Harmonic> harmonics;
    double amplitude = a * f.amplitude();
    if (f.phase() == g.phase()) {
      amplitude += b * g.amplitude();
    } else if (g.amplitude() != 0.0) {
      harmonics.push_back({b * g.amplitude(), 1, g.phase()});
    }
    for (auto h : f.harmonics()) {
      h.amplitude *= a;
      harmonics.push_back(h);
    }
    for (auto h : g.harmonics()) {
      h.amplitude *= b;
      harmonics.push_back(h);
    }
    return CoefficientSpec::cosine(a * f.mean() + b * g.mean(), amplitude, f.phase(),
                                   std::move(harmonics))
        .with_period(period);
  }

  if (f.kind() == Kind::piecewise_constant && g.kind() == Kind::piecewise_constant) {
    std::vector<double> bps = f.breakpoints();
    bps.insert(bps.end(), g.breakpoints().begin(), g.breakpoints().end());
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    std::vector<double> values(bps.size());
    for (std::size_t i = 0; i < bps.size(); ++i) {
      const double next = i + 1 < bps.size() ? bps[i + 1] : bps.front() + period;
      const double mid = 0.5 * (bps[i] + next);
      values[i] = a * f(mid) + b * g(mid);
    }
    return CoefficientSpec::piecewise_constant(std::move(bps), std::move(values))
        .with_period(period);
  }

  if (f.kind() == Kind::table && g.kind() == Kind::table &&
      f.samples().size() == g.samples().size()) {
    std::vector<double> samples(f.samples().size());
    for (std::size_t j = 0; j < samples.size(); ++j) {
      samples[j] = a * f.samples()[j] + b * g.samples()[j];
    }
    return CoefficientSpec::table(std::move(samples)).with_period(period);
  }

  throw ValidationError(std::string("linear_combination: cannot combine ") +
                        std::string(kind_name(f.kind())) + " and " +
                        std::string(kind_name(g.kind())) + " specs exactly");
}

std::string_view field_name(Field field) {
  switch (field) {
    case Field::sigma:
      return "sigma";
    case Field::r_u:
      return "r_u";
    case Field::r_v:
      return "r_v";
    case Field::kappa_u:
      return "kappa_u";
    case Field::kappa_v:
      return "kappa_v";
    case Field::mu_u:
      return "mu_u";
    case Field::mu_v:
      return "mu_v";
  }
  return "unknown";
}

Field field_from_name(std::string_view name) {
  for (Field f : all_fields) {
    if (field_name(f) == name) return f;
  }
  throw ValidationError("unknown coefficient field '" + std::string(name) + "'");
}

bool must_be_positive(Field field) { return field != Field::r_u && field != Field::r_v; }

const CoefficientSpec& Coefficients::operator[](Field field) const {
  switch (field) {
    case Field::sigma:
      return sigma;
    case Field::r_u:
      return r_u;
    case Field::r_v:
      return r_v;
    case Field::kappa_u:
      return kappa_u;
    case Field::kappa_v:
      return kappa_v;
    case Field::mu_u:
      return mu_u;
    case Field::mu_v:
      return mu_v;
  }
  return sigma;
}

CoefficientSpec& Coefficients::operator[](Field field) {
  return const_cast<CoefficientSpec&>(std::as_const(*this)[field]);
}

CoefficientSet::CoefficientSet(double period, Coefficients fields) : period_(period) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw ValidationError("coefficient set: period must be positive and finite");
  }
  for (Field f : all_fields) fields_[f] = fields[f].with_period(period);

  const std::size_t n = probe_points;
  double r_min = INFINITY, r_max = -INFINITY, kappa_min = INFINITY;
  double sigma_min = INFINITY, sigma_max = -INFINITY;
  for (Field f : all_fields) {
    const auto& spec = fields_[f];
    double lo = INFINITY, hi = -INFINITY, arg_lo = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double x = period * static_cast<double>(j) / static_cast<double>(n);
      const double value = spec(x);
      if (!std::isfinite(value)) {
        throw ValidationError("coefficient set: " + std::string(field_name(f)) +
                              " is not finite on the probe grid");
      }
      if (value < lo) {
        lo = value;
        arg_lo = x;
      }
      hi = std::max(hi, value);
    }
    if (must_be_positive(f) && !(lo > 0.0)) {
      std::ostringstream msg;
      msg << "coefficient set: " << field_name(f) << " must be positive, found " << lo
          << " at x = " << arg_lo;
      throw ValidationError(msg.str());
    }
    switch (f) {
      case Field::sigma:
        sigma_min = lo;
        sigma_max = hi;
        break;
      case Field::r_u:
      case Field::r_v:
        r_min = std::min(r_min, lo);
        r_max = std::max(r_max, hi);
        break;
      case Field::kappa_u:
      case Field::kappa_v:
        kappa_min = std::min(kappa_min, lo);
        break;
      default:
        break;
    }
  }
  sigma_min_ = sigma_min;
  sigma_max_ = sigma_max;
  r_min_ = r_min;
  r_max_ = r_max;
  kappa_min_ = kappa_min;

  if (!fields_.sigma.smooth()) {
    warnings_.emplace_back(
        "sigma is piecewise constant (not C^1); accepted because the flux discretization "
        "never differentiates sigma");
  }
}

bool CoefficientSet::homogeneous() const {
  return std::all_of(all_fields.begin(), all_fields.end(),
                     [this](Field f) { return fields_[f].kind() == Kind::constant; });
}

CoefficientSet CoefficientSet::with_field(Field field, CoefficientSpec spec) const {
  Coefficients fields = fields_;
  fields[field] = std::move(spec);
  return CoefficientSet(period_, std::move(fields));
}

CoefficientSet CoefficientSet::mirrored() const {
  Coefficients fields;
  for (Field f : all_fields) fields[f] = fields_[f].mirrored();
  return CoefficientSet(period_, std::move(fields));
}

CoefficientSet from_sis(double total_population, const SisRates& rates, double period) {
  if (!(total_population > 0.0) || !std::isfinite(total_population)) {
    throw ValidationError("from_sis: total population N must be positive");
  }
  auto bind = [period](const CoefficientSpec& s) { return s.with_period(period); };
  Coefficients fields;
  fields.sigma = bind(rates.sigma);
  fields.r_u = linear_combination(total_population, bind(rates.beta1), -1.0, bind(rates.gamma1));
  fields.r_v = linear_combination(total_population, bind(rates.beta2), -1.0, bind(rates.gamma2));
  fields.kappa_u = bind(rates.beta1);
  fields.kappa_v = bind(rates.beta2);
  fields.mu_u = bind(rates.mu1);
  fields.mu_v = bind(rates.mu2);
  return CoefficientSet(period, std::move(fields));
}

CoefficientSet rescale_epsilon(const CoefficientSet& set, double eps) {
  if (!(eps > 0.0) || !(eps <= 1.0)) {
    throw ValidationError("rescale_epsilon: eps must lie in (0, 1]");
  }
  Coefficients fields;
  for (Field f : all_fields) fields[f] = set[f].rescaled(eps);
  return CoefficientSet(set.period() * eps, std::move(fields));
}

double period_mean(const CoefficientSpec& spec, bool reciprocal) {
  constexpr std::size_t min_total_nodes = 4096;
  constexpr std::size_t max_intervals = std::size_t{1} << 22;
  constexpr double rel_tol = 1e-10;

  if (spec.kind() == Kind::constant) return reciprocal ? 1.0 / spec.value() : spec.value();
  const auto bounds = spec.segment_bounds();
  const std::size_t segments = bounds.size() - 1;
  const std::size_t start =
      std::max<std::size_t>(4, (min_total_nodes + segments - 1) / segments);

  double total = 0.0;
  for (std::size_t s = 0; s < segments; ++s) {
    const double a = bounds[s];
    const double b = bounds[s + 1];
    auto f = [&](double x) {
      const double v = spec.evaluate_on_segment(s, x);
      return reciprocal ? 1.0 / v : v;
    };
    std::size_t n = start;
    double h = (b - a) / static_cast<double>(n);
    double sum = 0.5 * (f(a) + f(b));
    double abs_sum = 0.5 * (std::abs(f(a)) + std::abs(f(b)));
    for (std::size_t i = 1; i < n; ++i) {
      const double v = f(a + h * static_cast<double>(i));
      sum += v;
      abs_sum += std::abs(v);
    }
    double integral = sum * h;
    while (true) {
      double mid_sum = 0.0, mid_abs = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double v = f(a + h * (static_cast<double>(i) + 0.5));
        mid_sum += v;
        mid_abs += std::abs(v);
      }
      sum += mid_sum;
      abs_sum += mid_abs;
      n *= 2;
      h *= 0.5;
      const double refined = sum * h;
      const double scale = std::abs(refined) + abs_sum * h;
      const double change = std::abs(refined - integral);
      integral = refined;
      if (change <= rel_tol * scale) break;
      if (n >= max_intervals) {
        std::ostringstream diag;
        diag << "segment [" << a << ", " << b << "], intervals " << n << ", last change "
             << change;
        throw NumericalError("period_mean: trapezoid refinement did not converge", diag.str());
      }
    }
    total += integral;
  }
  return total / spec.period();
}

HomogenizedSet homogenize(const CoefficientSet& set) {
  HomogenizedSet h;
  h.period = set.period();
  h.mean_sigma = period_mean(set.sigma());
  h.sigma_h = 1.0 / period_mean(set.sigma(), true);
  h.mean_r_u = period_mean(set.r_u());
  h.mean_r_v = period_mean(set.r_v());
  h.mean_kappa_u = period_mean(set.kappa_u());
  h.mean_kappa_v = period_mean(set.kappa_v());
  h.mean_mu_u = period_mean(set.mu_u());
  h.mean_mu_v = period_mean(set.mu_v());
  return h;
}

}  // namespace frontlab::coefficients
