#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace frontlab::numerics {

/// Solves lower[i]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1] = rhs[i].
/// lower[0] and upper[n-1] are ignored. Throws NumericalError on a zero pivot.
std::vector<double> solve_tridiagonal(const std::vector<double>& lower,
                                      const std::vector<double>& diag,
                                      const std::vector<double>& upper,
                                      std::vector<double> rhs);

/// Periodic variant: lower[0] couples x[0] to x[n-1] and upper[n-1] couples
/// x[n-1] to x[0]. Sherman-Morrison on top of the Thomas sweep; n >= 3.
std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& lower,
                                             const std::vector<double>& diag,
                                             const std::vector<double>& upper,
                                             std::vector<double> rhs);

struct LineMinimum {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search for a unimodal f on [a, b], stops when the bracket
/// is narrower than tol.
LineMinimum golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                                    double tol);

/// Shortest round-trip decimal form of x.
std::string format_double(double x);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace frontlab::numerics
