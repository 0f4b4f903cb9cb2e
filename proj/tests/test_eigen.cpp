#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "frontlab/eigen.hpp"
#include "frontlab/error.hpp"
#include "frontlab/ode.hpp"
#include "support.hpp"

namespace {

using namespace frontlab;
using namespace frontlab::coefficients;
using eigen::GridSpec;
using frontlab::testing::Rng;
constexpr double pi = std::numbers::pi;

CoefficientSet homogeneous(double sigma, double r_u, double r_v, double mu_u, double mu_v) {
  ode::HomParams p;
  p.sigma = sigma;
  p.r_u = r_u;
  p.r_v = r_v;
  p.mu_u = mu_u;
  p.mu_v = mu_v;
  return ode::constant_set(p);
}

GridSpec fixed_grid(std::size_t n) {
  GridSpec g;
  g.n_cells = n;
  g.refine_tolerance = 0.0;
  return g;
}

/// Largest real eigenvalue of the dense matrix.
double dense_perron_root(const eigen::DiscreteOperator& op) {
  const auto d = op.dense();
  const auto n = static_cast<Eigen::Index>(op.dim());
  Eigen::MatrixXd A = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(d.data(), n, n);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(A, false);
  double best = -INFINITY;
  for (Eigen::Index i = 0; i < n; ++i) best = std::max(best, solver.eigenvalues()[i].real());
  return best;
}

void expect_valid_pair(const eigen::EigenResult& r) {
  double sup = 0.0;
  for (double v : r.phi) {
    ASSERT_GT(v, 0.0);
    sup = std::max(sup, v);
  }
  for (double v : r.psi) {
    ASSERT_GT(v, 0.0);
    sup = std::max(sup, v);
  }
  EXPECT_NEAR(sup, 1.0, 1e-14);
  EXPECT_LE(r.lower_bound, r.value + 1e-9);
  EXPECT_GE(r.upper_bound, r.value - 1e-9);
}

TEST(BuildOperator, ConstantCoefficientRowSums) {
  const auto set = homogeneous(1.3, 0.7, -0.4, 0.6, 0.9);
  const auto op = eigen::build_operator(set, 0.0, fixed_grid(64));
  const auto mw = op.apply(std::vector<double>(op.dim(), 1.0));
  for (std::size_t i = 0; i < op.n; ++i) {
    EXPECT_NEAR(mw[i], 0.7 - 0.6 + 0.9, 1e-12);
    EXPECT_NEAR(mw[op.n + i], -0.4 - 0.9 + 0.6, 1e-12);
  }
  const auto equal_mu = eigen::build_operator(homogeneous(1.0, 0.7, -0.4, 0.5, 0.5), 0.0, fixed_grid(64));
  const auto m2 = equal_mu.apply(std::vector<double>(equal_mu.dim(), 1.0));
  EXPECT_NEAR(m2[3], 0.7, 1e-12);
  EXPECT_NEAR(m2[equal_mu.n + 3], -0.4, 1e-12);
}

TEST(BuildOperator, ConstantVectorAtLambdaOne) {
  const double sigma = 1.5, r_u = 0.8, mu_u = 0.3, mu_v = 0.6;
  for (std::size_t n : {64, 256}) {
    const auto op = eigen::build_operator(homogeneous(sigma, r_u, 1.0, mu_u, mu_v), 1.0, fixed_grid(n));
    const auto mw = op.apply(std::vector<double>(op.dim(), 1.0));
    // sigma (2 cosh(h) - 2)/h^2 = sigma (1 + h^2/12 + ...)
    EXPECT_NEAR(mw[0], sigma + r_u - mu_u + mu_v, 0.2 * sigma * op.h * op.h);
  }
}

TEST(BuildOperator, SecondOrderAgainstContinuousOperator) {
  // Conjugated operator: (s w')' - 2 lam s w' + (lam^2 s - lam s') w + (r - mu) w + mu_other w_other.
  Coefficients c;
  c.sigma = CoefficientSpec::cosine(1.0, 0.4, 0.1);
  c.r_u = CoefficientSpec::cosine(1.0, 0.3);
  const CoefficientSet set(1.0, c);
  const double lam = 0.5;
  auto s = [](double x) { return 1.0 + 0.4 * std::cos(2 * pi * (x + 0.1)); };
  auto ds = [](double x) { return -0.8 * pi * std::sin(2 * pi * (x + 0.1)); };
  auto w = [](double x) { return 1.0 + 0.3 * std::sin(2 * pi * x); };
  auto dw = [](double x) { return 0.6 * pi * std::cos(2 * pi * x); };
  auto d2w = [](double x) { return -1.2 * pi * pi * std::sin(2 * pi * x); };
  std::vector<double> errors;
  for (std::size_t n : {32, 64, 128, 256}) {
    const auto op = eigen::build_operator(set, lam, fixed_grid(n));
    std::vector<double> v(op.dim());
    for (std::size_t i = 0; i < op.n; ++i) v[i] = v[op.n + i] = w(op.x[i]);
    const auto mv = op.apply(v);
    double err = 0.0;
    for (std::size_t i = 0; i < op.n; ++i) {
      const double x = op.x[i];
      const double exact = ds(x) * dw(x) + s(x) * d2w(x) - 2 * lam * s(x) * dw(x) +
                           (lam * lam * s(x) - lam * ds(x)) * w(x) + set.r_u()(x) * w(x);
      err = std::max(err, std::abs(mv[i] - exact));
    }
    errors.push_back(err);
  }
  for (std::size_t k = 1; k < errors.size(); ++k) EXPECT_GT(errors[k - 1] / errors[k], 3.5);
}

TEST(BuildOperator, PecletRefinementKeepsCooperativity) {
  Coefficients c;
  c.sigma = CoefficientSpec::cosine(1.0, 0.5);
  const CoefficientSet set(1.0, c);
  for (double lam : {-20.0, -3.0, 0.0, 4.0, 50.0}) {
    const auto op = eigen::build_operator(set, lam, fixed_grid(16));
    EXPECT_TRUE(op.cooperative());
    EXPECT_LE(op.h * std::abs(lam) * set.sigma_max(), set.sigma_min() * (1 + 1e-12));
  }
}

TEST(PrincipalEigenpair, HomogeneousValue) {
  const auto set = homogeneous(1.0, 1.0, 1.0, 0.5, 0.5);
  const auto r = eigen::k_of_lambda(set, 1.0, {});
  EXPECT_NEAR(r.value, 2.0, 1e-7);
  expect_valid_pair(r);
  for (double v : r.phi) EXPECT_NEAR(v, 1.0, 1e-9);
  for (double v : r.psi) EXPECT_NEAR(v, 1.0, 1e-9);
}

TEST(PrincipalEigenpair, TwoByTwoOracle) {
  const auto r = eigen::k_of_lambda(homogeneous(1.0, 2.0, 0.0, 1.0, 1.0), 0.0, {});
  EXPECT_NEAR(r.value, std::sqrt(2.0), 1e-9);
  expect_valid_pair(r);
}

TEST(PrincipalEigenpair, DenseOracleAtN256) {
  Coefficients c;
  c.r_u = CoefficientSpec::cosine(1.0, 0.3);
  const CoefficientSet set(1.0, c);
  const auto op = eigen::build_operator(set, 0.0, fixed_grid(256));
  const auto r = eigen::principal_eigenpair(op);
  EXPECT_NEAR(r.value, dense_perron_root(op), 1e-8);
  EXPECT_LE(r.residual, 1e-9);
  expect_valid_pair(r);
}

TEST(PrincipalEigenpairProperty, DenseOracleOnRandomSets) {
  Rng rng(41);
  for (int trial = 0; trial < 8; ++trial) {
    const auto set = frontlab::testing::random_cosine_set(rng);
    const double lam = rng.uniform(-3.0, 3.0);
    const auto op = eigen::build_operator(set, lam, fixed_grid(128));
    const auto r = eigen::principal_eigenpair(op);
    EXPECT_NEAR(r.value, dense_perron_root(op), 1e-8) << "trial " << trial << " lambda " << lam;
    expect_valid_pair(r);
    EXPECT_LE(r.residual, 1e-9);
  }
}

TEST(PrincipalEigenpair, ShiftedPowerAgreesWithResolvent) {
  Rng rng(42);
  const auto set = frontlab::testing::random_cosine_set(rng);
  const auto op = eigen::build_operator(set, 0.7, fixed_grid(32));
  eigen::EigenOptions power;
  power.method = eigen::Method::shifted_power;
  const auto a = eigen::principal_eigenpair(op);
  const auto b = eigen::principal_eigenpair(op, power);
  EXPECT_NEAR(a.value, b.value, 1e-8);
  expect_valid_pair(b);
  power.max_iterations = 3;
  EXPECT_THROW(eigen::principal_eigenpair(op, power), NumericalError);
}

TEST(PrincipalEigenpair, RejectsNonCooperativeOperator) {
  auto op = eigen::build_operator(homogeneous(1, 1, 1, 0.5, 0.5), 0.0, fixed_grid(16));
  op.coupling[0][3] = -0.1;
  EXPECT_FALSE(op.cooperative());
  EXPECT_THROW(eigen::principal_eigenpair(op), ContractViolation);
}

TEST(KOfLambda, ZeroIsPeriodicPrincipalEigenvalue) {
  Coefficients c;
  c.sigma = CoefficientSpec::cosine(1.0, 0.3, 0.2);
  c.r_u = CoefficientSpec::cosine(1.0, 0.5);
  c.mu_u = CoefficientSpec::constant(0.3);
  const CoefficientSet set(1.0, c);
  const auto k0 = eigen::k_of_lambda(set, 0.0, {});
  const auto fine = eigen::principal_eigenpair(eigen::build_operator(set, 0.0, fixed_grid(8192)));
  EXPECT_NEAR(k0.value, fine.value, 1e-7);
  EXPECT_LT(k0.refinement_gap, 1e-7);
}

TEST(KOfLambda, HomogeneousIsEvenAndQuadratic) {
  const auto set = homogeneous(1.7, 0.4, 1.1, 0.3, 0.8);
  const double lambda_A = ode::lambda_A({1.7, 0.4, 1.1, 1.0, 1.0, 0.3, 0.8});
  eigen::KEvaluator k(set, {});
  for (double lam : {0.5, 1.0, 2.5}) {
    const double plus = k(lam).value, minus = k(-lam).value;
    EXPECT_NEAR(plus, minus, 1e-9);
    EXPECT_NEAR(plus, 1.7 * lam * lam + lambda_A, 1e-7);
  }
}

TEST(KOfLambda, EqualMutationRatesGiveEvenCurve) {
  Coefficients c;
  c.r_u = CoefficientSpec::cosine(1.0, 0.5, 0.1, {{0.3, 2, 0.3}});
  c.sigma = CoefficientSpec::cosine(1.0, 0.2, 0.37);
  c.mu_u = c.mu_v = CoefficientSpec::constant(0.4);
  const CoefficientSet set(1.0, c);
  eigen::KEvaluator k(set, {});
  EXPECT_NEAR(k(1.0).value, k(-1.0).value, 1e-7);
  EXPECT_NEAR(k(2.3).value, k(-2.3).value, 1e-7);
}

TEST(DirichletEigenvalue, ScalarSineMode) {
  const double r = 0.8;
  const auto set = homogeneous(1.0, r, r, 0.4, 0.4);
  for (double R : {1.0, 2.0, 5.0}) {
    const auto res = eigen::dirichlet_eigenvalue(set, R, fixed_grid(256));
    EXPECT_NEAR(res.value, r - std::pow(pi / (2 * R), 2), 1e-4) << "R " << R;
    expect_valid_pair(res);
  }
}

TEST(DirichletEigenvalueProperty, IncreasingAndBelowK) {
  Rng rng(43);
  for (int trial = 0; trial < 3; ++trial) {
    const auto set = frontlab::testing::random_cosine_set(rng);
    const double k0 = eigen::k_of_lambda(set, 0.0, {}).value;
    double previous = -INFINITY;
    for (double R : {1.0, 2.0, 4.0, 8.0}) {
      const double v = eigen::dirichlet_eigenvalue(set, R, {}).value;
      EXPECT_GT(v, previous) << "trial " << trial << " R " << R;
      EXPECT_LT(v, k0);
      previous = v;
    }
  }
}

TEST(MinimaxCheck, EigenvectorAttainsMinimum) {
  Rng rng(44);
  const auto set = frontlab::testing::random_cosine_set(rng);
  const auto grid = fixed_grid(256);
  const double lam = 1.3;
  const auto r = eigen::principal_eigenpair(eigen::build_operator(set, lam, grid));
  EXPECT_NEAR(eigen::minimax_check(set, lam, grid, r.phi, r.psi), r.value, 1e-8);

  std::vector<double> phi = r.phi, psi = r.psi;
  for (double& v : phi) v *= 1.0 + rng.uniform(-0.05, 0.05);
  for (double& v : psi) v *= 1.0 + rng.uniform(-0.05, 0.05);
  EXPECT_GE(eigen::minimax_check(set, lam, grid, phi, psi), r.value - 1e-8);

  phi[7] = 0.0;
  EXPECT_THROW(eigen::minimax_check(set, lam, grid, phi, psi), ContractViolation);
  EXPECT_THROW(eigen::minimax_check(set, lam, grid, {1.0}, {1.0}), ContractViolation);
}

TEST(MinimaxCheck, ConstantsOnHomogeneousCoefficients) {
  // the Perron vector of the reaction matrix, spread over the grid, is exact
  const auto set = homogeneous(1.0, 1.0, 0.5, 0.5, 0.5);
  const auto grid = fixed_grid(128);
  const auto op = eigen::build_operator(set, 0.8, grid);
  const double lambda_a = (0.5 + std::sqrt(1.25)) / 2.0;
  const std::vector<double> phi(op.n, 0.5), psi(op.n, lambda_a - 0.5);
  EXPECT_NEAR(eigen::minimax_check(set, 0.8, grid, phi, psi) - eigen::principal_eigenpair(op).value, 0.0,
              1e-10);
}

TEST(KCurveProperty, QuadraticBoundsAndConvexity) {
  Rng rng(45);
  for (int trial = 0; trial < 3; ++trial) {
    const auto set = frontlab::testing::random_cosine_set(rng);
    const auto curve = eigen::k_curve(set, -3.0, 3.0, 0.25, {});
    for (const auto& p : curve) {
      EXPECT_GE(p.result.value, set.sigma_min() * p.lambda * p.lambda + set.r_min() - 1e-6);
      EXPECT_LE(p.result.value, set.sigma_max() * p.lambda * p.lambda + set.r_max() + 1e-6);
    }
    for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
      EXPECT_GE(curve[i - 1].result.value - 2 * curve[i].result.value + curve[i + 1].result.value, -1e-7);
    }
  }
}

TEST(KCurveProperty, EvenCoefficientsGiveEvenCurve) {
  Rng rng(46);
  Coefficients c;
  // phase 0 cosines are even about x = 0
  c.sigma = CoefficientSpec::cosine(1.0, rng.uniform(-0.4, 0.4));
  c.r_u = CoefficientSpec::cosine(1.0, rng.uniform(-0.4, 0.4));
  c.r_v = CoefficientSpec::cosine(0.3, rng.uniform(-0.1, 0.1));
  c.mu_u = CoefficientSpec::cosine(0.5, rng.uniform(-0.2, 0.2));
  c.mu_v = CoefficientSpec::constant(0.2);
  const CoefficientSet set(1.0, c);
  eigen::KEvaluator k(set, {});
  for (double lam : {0.4, 1.7}) EXPECT_NEAR(k(lam).value, k(-lam).value, 1e-7);
}

TEST(KOfLambdaProperty, SecondOrderGridConvergence) {
  Rng rng(47);
  const auto set = frontlab::testing::random_cosine_set(rng);
  std::vector<double> values;
  for (std::size_t n : {32, 64, 128, 256}) {
    values.push_back(eigen::principal_eigenpair(eigen::build_operator(set, 1.0, fixed_grid(n))).value);
  }
  for (std::size_t i = 2; i < values.size(); ++i) {
    EXPECT_GE(std::abs(values[i - 2] - values[i - 1]) / std::abs(values[i - 1] - values[i]), 3.0);
  }
}

TEST(EigenCsv, Layout) {
  const auto set = homogeneous(1, 1, 1, 0.5, 0.5);
  const auto curve = eigen::k_curve(set, -3.0, 3.0, 0.1, {});
  EXPECT_EQ(curve.size(), 61u);
  std::ostringstream os;
  eigen::write_k_curve_csv(os, curve);
  const std::string text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "lambda,k,residual,n_cells");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 62);
  std::ostringstream ds;
  eigen::write_dirichlet_csv(ds, {{1.0, 0.5}});
  EXPECT_EQ(ds.str().substr(0, 10), "R,lambda1R");
}

}  // namespace
