#pragma once

// Hand-rolled generators for the property tests. Everything is seeded, so a
// failing case can be replayed from the printed seed.

#include <cmath>
#include <cstdint>
#include <random>

#include "frontlab/coefficients.hpp"
#include "frontlab/ode.hpp"

namespace frontlab::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(engine_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(engine_); }
  bool coin() { return integer(0, 1) == 1; }

 private:
  std::mt19937_64 engine_;
};

/// mean * (1 + a cos(2 pi (x + phase)/L)) with |a| <= max_relative.
inline coefficients::CoefficientSpec random_cosine(Rng& rng, double mean, double max_relative) {
  return coefficients::CoefficientSpec::cosine(mean, mean * rng.uniform(-max_relative, max_relative),
                                               rng.uniform(0.0, 1.0));
}

/// Cosine perturbations of moderate means, amplitudes at most half the mean.
inline coefficients::CoefficientSet random_cosine_set(Rng& rng, double period = 1.0) {
  coefficients::Coefficients c;
  c.sigma = random_cosine(rng, rng.uniform(0.5, 1.5), 0.5);
  c.r_u = random_cosine(rng, rng.uniform(0.5, 1.5), 0.5);
  c.r_v = random_cosine(rng, rng.uniform(-0.5, 1.0), 0.5);
  c.kappa_u = random_cosine(rng, rng.uniform(0.5, 1.5), 0.5);
  c.kappa_v = random_cosine(rng, rng.uniform(0.5, 1.5), 0.5);
  c.mu_u = random_cosine(rng, rng.uniform(0.2, 1.0), 0.5);
  c.mu_v = random_cosine(rng, rng.uniform(0.2, 1.0), 0.5);
  for (auto f : coefficients::all_fields) c[f] = c[f].with_period(period);
  return coefficients::CoefficientSet(period, c);
}

inline ode::HomParams random_hom_params(Rng& rng) {
  ode::HomParams p;
  p.sigma = rng.uniform(0.2, 3.0);
  p.r_u = rng.uniform(-1.0, 2.0);
  p.r_v = rng.uniform(-1.0, 2.0);
  p.kappa_u = rng.uniform(0.2, 3.0);
  p.kappa_v = rng.uniform(0.2, 3.0);
  p.mu_u = rng.uniform(0.01, 2.0);
  p.mu_v = rng.uniform(0.01, 2.0);
  return p;
}

/// Random parameters with lambda_A > 0.05, by rejection.
inline ode::HomParams random_persistent_params(Rng& rng) {
  for (;;) {
    auto p = random_hom_params(rng);
    if (ode::lambda_A(p) > 0.05) return p;
  }
}

}  // namespace frontlab::testing
