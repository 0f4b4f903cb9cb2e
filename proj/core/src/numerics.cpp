#include "frontlab/numerics.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "frontlab/error.hpp"

namespace frontlab::numerics {

std::vector<double> solve_tridiagonal(const std::vector<double>& lower,
                                      const std::vector<double>& diag,
                                      const std::vector<double>& upper,
                                      std::vector<double> rhs) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n || n == 0) {
    throw ContractViolation("solve_tridiagonal: inconsistent band sizes");
  }
  std::vector<double> c(n);
  double pivot = diag[0];
  if (pivot == 0.0) throw NumericalError("solve_tridiagonal: zero pivot in row 0");
  c[0] = upper[0] / pivot;
  rhs[0] /= pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = diag[i] - lower[i] * c[i - 1];
    if (pivot == 0.0 || !std::isfinite(pivot)) {
      throw NumericalError("solve_tridiagonal: zero pivot", "row " + std::to_string(i));
    }
    c[i] = upper[i] / pivot;
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
  return rhs;
}

std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& lower,
                                             const std::vector<double>& diag,
                                             const std::vector<double>& upper,
                                             std::vector<double> rhs) {
  const std::size_t n = diag.size();
  if (n < 3) throw ContractViolation("solve_cyclic_tridiagonal: need at least 3 unknowns");
  const double alpha = upper[n - 1];  // row n-1, column 0
  const double beta = lower[0];       // row 0, column n-1
  const double gamma = -diag[0];
  std::vector<double> d = diag;
  d[0] -= gamma;
  d[n - 1] -= alpha * beta / gamma;
  std::vector<double> lo = lower, up = upper;
  lo[0] = 0.0;
  up[n - 1] = 0.0;
  auto x = solve_tridiagonal(lo, d, up, std::move(rhs));
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  auto z = solve_tridiagonal(lo, d, up, std::move(u));
  const double denom = 1.0 + z[0] + beta * z[n - 1] / gamma;
  if (denom == 0.0) throw NumericalError("solve_cyclic_tridiagonal: singular correction");
  const double factor = (x[0] + beta * x[n - 1] / gamma) / denom;
  for (std::size_t i = 0; i < n; ++i) x[i] -= factor * z[i];
  return x;
}

LineMinimum golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                                    double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  int evaluations = 2;
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evaluations;
  }
  LineMinimum best{fc < fd ? c : d, fc < fd ? fc : fd, evaluations};
  return best;
}

std::string format_double(double x) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, x);
  if (ec != std::errc()) return "nan";
  return std::string(buffer, end);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    hash ^= ch;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(value));
  return buffer;
}

}  // namespace frontlab::numerics
