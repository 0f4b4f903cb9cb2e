#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "frontlab/coefficients.hpp"
#include "frontlab/coefficients_json.hpp"
#include "frontlab/error.hpp"
#include "support.hpp"

namespace {

using namespace frontlab;
using namespace frontlab::coefficients;
using frontlab::testing::Rng;

CoefficientSpec random_spec(Rng& rng, double period) {
  switch (rng.integer(0, 3)) {
    case 0:
      return CoefficientSpec::constant(rng.uniform(0.1, 2.0)).with_period(period);
    case 1:
      return CoefficientSpec::cosine(rng.uniform(1.0, 2.0), rng.uniform(-0.5, 0.5), rng.uniform(0, 1),
                                     {{rng.uniform(-0.2, 0.2), rng.integer(2, 4), rng.uniform(0, 1)}})
          .with_period(period);
    case 2: {
      std::vector<double> b{0.0, rng.uniform(0.2, 0.4) * period, rng.uniform(0.6, 0.8) * period};
      return CoefficientSpec::piecewise_constant(b, {rng.uniform(0.5, 2), rng.uniform(0.5, 2), rng.uniform(0.5, 2)})
          .with_period(period);
    }
    default: {
      std::vector<double> s(static_cast<std::size_t>(rng.integer(3, 12)));
      for (double& v : s) v = rng.uniform(0.5, 2.0);
      return CoefficientSpec::table(s).with_period(period);
    }
  }
}

TEST(CoefficientSpec, EvaluatesDocumentedExamples) {
  EXPECT_EQ(CoefficientSpec::constant(2.0)(17.3), 2.0);
  EXPECT_DOUBLE_EQ(CoefficientSpec::cosine(1.0, 0.5, 0.0)(0.0), 1.5);
  const auto pw = CoefficientSpec::piecewise_constant({0.0, 0.5}, {1.0, 4.0});
  EXPECT_EQ(pw(1.25), 1.0);
  EXPECT_EQ(pw(0.5), 4.0);  // left-closed pieces
  EXPECT_EQ(pw(-0.25), 4.0);
}

TEST(CoefficientSpec, TableInterpolatesPeriodically) {
  const auto t = CoefficientSpec::table({0.0, 1.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(t(0.125), 0.5);
  EXPECT_DOUBLE_EQ(t(0.875), 1.5);  // between the last sample and the wrapped first one
  EXPECT_DOUBLE_EQ(t(1.25), 1.0);
}

TEST(CoefficientSpec, RejectsMalformedSpecs) {
  EXPECT_THROW(CoefficientSpec::table({}), ValidationError);
  EXPECT_THROW(CoefficientSpec::piecewise_constant({0.0, 0.5, 0.4}, {1, 2, 3}), ValidationError);
  EXPECT_THROW(CoefficientSpec::piecewise_constant({0.0, 0.5}, {1.0}), ValidationError);
  EXPECT_THROW(CoefficientSpec::constant(std::nan("")), ValidationError);
}

TEST(CoefficientSpecProperty, EvaluationIsPeriodic) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const double period = rng.uniform(0.3, 3.0);
    const auto spec = random_spec(rng, period);
    for (int k = 0; k < 50; ++k) {
      const double x = rng.uniform(-5.0, 5.0);
      ASSERT_NEAR(spec(x), spec(x + period), 1e-12) << "trial " << trial << " x " << x;
      ASSERT_NEAR(spec(x), spec(x - 3.0 * period), 1e-12) << "trial " << trial << " x " << x;
    }
  }
}

TEST(CoefficientSpecProperty, MirroredIsReflection) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto spec = random_spec(rng, 1.0);
    const auto m = spec.mirrored();
    for (int k = 0; k < 20; ++k) {
      const double x = rng.uniform(-2.0, 2.0);
      ASSERT_NEAR(m(x), spec(-x), 1e-12) << kind_name(spec.kind()) << " x " << x;
    }
  }
}

TEST(CoefficientSpec, LinearCombinationStaysExact) {
  const auto a = CoefficientSpec::cosine(1.0, 0.5, 0.1);
  const auto b = CoefficientSpec::cosine(0.5, 0.2, 0.3);
  const auto c = linear_combination(2.0, a, -1.0, b);
  for (double x : {0.0, 0.1, 0.37, 0.9}) EXPECT_NEAR(c(x), 2 * a(x) - b(x), 1e-14);
  EXPECT_THROW(linear_combination(1.0, a, 1.0, CoefficientSpec::piecewise_constant({0.0, 0.5}, {1, 2})),
               ValidationError);
}

TEST(CoefficientSet, ComputesExtremaAndKBar) {
  Coefficients c;
  c.sigma = CoefficientSpec::cosine(2.0, 1.0);
  c.r_u = CoefficientSpec::cosine(1.0, 0.5);
  c.r_v = CoefficientSpec::constant(-0.2);
  c.kappa_u = CoefficientSpec::constant(0.5);
  c.kappa_v = CoefficientSpec::constant(2.0);
  const CoefficientSet set(1.0, c);
  EXPECT_NEAR(set.sigma_min(), 1.0, 1e-12);
  EXPECT_NEAR(set.sigma_max(), 3.0, 1e-12);
  EXPECT_NEAR(set.r_min(), -0.2, 1e-12);
  EXPECT_NEAR(set.r_max(), 1.5, 1e-12);
  EXPECT_NEAR(set.kappa_min(), 0.5, 1e-12);
  EXPECT_NEAR(set.k_bar(), 3.0, 1e-12);
}

TEST(CoefficientSet, RejectsNonPositiveRequiredFields) {
  Coefficients c;
  c.sigma = CoefficientSpec::constant(-1.0);
  EXPECT_THROW(CoefficientSet(1.0, c), ValidationError);
  c.sigma = CoefficientSpec::cosine(1.0, 1.5);  // dips below zero
  EXPECT_THROW(CoefficientSet(1.0, c), ValidationError);
  c.sigma = CoefficientSpec::constant(1.0);
  c.mu_v = CoefficientSpec::constant(0.0);
  EXPECT_THROW(CoefficientSet(1.0, c), ValidationError);
  c.mu_v = CoefficientSpec::constant(1.0);
  c.r_u = CoefficientSpec::constant(-3.0);  // growth rates may be negative
  EXPECT_NO_THROW(CoefficientSet(1.0, c));
  EXPECT_THROW(CoefficientSet(0.0, c), ValidationError);
}

TEST(CoefficientSet, FlagsNonSmoothSigma) {
  Coefficients c;
  c.sigma = CoefficientSpec::piecewise_constant({0.0, 0.5}, {1.0, 4.0});
  const CoefficientSet set(1.0, c);
  ASSERT_EQ(set.warnings().size(), 1u);
  EXPECT_NE(set.warnings()[0].find("sigma"), std::string::npos);
}

TEST(FromSis, SubstitutesRates) {
  SisRates rates;
  rates.beta1 = rates.beta2 = CoefficientSpec::constant(1.0);
  rates.gamma1 = rates.gamma2 = CoefficientSpec::constant(0.5);
  rates.mu1 = rates.mu2 = CoefficientSpec::constant(0.3);
  auto set = from_sis(1.0, rates, 1.0);
  EXPECT_DOUBLE_EQ(set.r_u()(0.3), 0.5);
  EXPECT_DOUBLE_EQ(set.r_v()(0.3), 0.5);
  EXPECT_DOUBLE_EQ(set.kappa_u()(0.3), 1.0);
  EXPECT_DOUBLE_EQ(set.kappa_v()(0.3), 1.0);

  rates.gamma1 = CoefficientSpec::constant(3.0);
  set = from_sis(2.0, rates, 1.0);
  EXPECT_DOUBLE_EQ(set.r_u()(0.7), -1.0);

  rates.beta1 = CoefficientSpec::cosine(1.0, 0.5);
  rates.gamma1 = CoefficientSpec::constant(0.0);
  set = from_sis(1.0, rates, 1.0);
  for (double x : {0.0, 0.2, 0.55}) {
    EXPECT_NEAR(set.r_u()(x), rates.beta1(x), 1e-15);
    EXPECT_NEAR(set.kappa_u()(x), rates.beta1(x), 1e-15);
  }
  EXPECT_THROW(from_sis(0.0, rates, 1.0), ValidationError);
  EXPECT_THROW(from_sis(-1.0, rates, 1.0), ValidationError);
}

TEST(RescaleEpsilon, MatchesSubstitution) {
  Coefficients c;
  c.r_u = CoefficientSpec::cosine(1.0, 0.5, 0.1);
  c.sigma = CoefficientSpec::piecewise_constant({0.0, 0.5}, {1.0, 4.0});
  const CoefficientSet set(1.0, c);
  const auto same = rescale_epsilon(set, 1.0);
  for (double x : {-0.3, 0.0, 0.25, 0.8}) {
    EXPECT_EQ(same.r_u()(x), set.r_u()(x));
    EXPECT_EQ(same.sigma()(x), set.sigma()(x));
  }
  const auto half = rescale_epsilon(set, 0.5);
  EXPECT_DOUBLE_EQ(half.period(), 0.5);
  EXPECT_NEAR(half.r_u()(0.25), set.r_u()(0.5), 1e-14);
  const auto tenth = rescale_epsilon(set, 0.1);
  EXPECT_NEAR(tenth.r_min(), set.r_min(), 1e-12);
  EXPECT_NEAR(tenth.r_max(), set.r_max(), 1e-12);
  EXPECT_NEAR(tenth.sigma_min(), set.sigma_min(), 1e-12);
  EXPECT_NEAR(tenth.sigma_max(), set.sigma_max(), 1e-12);
  EXPECT_THROW(rescale_epsilon(set, 0.0), ValidationError);
  EXPECT_THROW(rescale_epsilon(set, -0.5), ValidationError);
}

TEST(Homogenize, DocumentedExamples) {
  Coefficients c;
  c.sigma = CoefficientSpec::constant(1.7);
  c.mu_u = CoefficientSpec::constant(0.3);
  auto h = homogenize(CoefficientSet(1.0, c));
  EXPECT_NEAR(h.sigma_h, 1.7, 1e-14);
  EXPECT_NEAR(h.mean_sigma, 1.7, 1e-14);
  EXPECT_NEAR(h.mean_mu_u, 0.3, 1e-14);

  c.sigma = CoefficientSpec::piecewise_constant({0.0, 0.5}, {1.0, 4.0});
  c.r_u = CoefficientSpec::cosine(1.0, 0.5);
  h = homogenize(CoefficientSet(1.0, c));
  EXPECT_NEAR(h.sigma_h, 1.6, 1e-12);
  EXPECT_NEAR(h.mean_sigma, 2.5, 1e-12);
  EXPECT_NEAR(h.mean_r_u, 1.0, 1e-12);
}

TEST(HomogenizeProperty, HarmonicMeanBelowArithmeticMean) {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const auto set = frontlab::testing::random_cosine_set(rng);
    const auto h = homogenize(set);
    EXPECT_LT(h.sigma_h, h.mean_sigma) << "trial " << trial;
    EXPECT_GT(h.sigma_h, 0.0);
    EXPECT_GT(h.mean_kappa_u, 0.0);
    EXPECT_GT(h.mean_mu_v, 0.0);
  }
}

TEST(HomogenizeProperty, InvariantUnderRescaling) {
  Rng rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const auto set = frontlab::testing::random_cosine_set(rng);
    const auto h = homogenize(set);
    for (int n : {2, 3, 8}) {
      const auto hn = homogenize(rescale_epsilon(set, 1.0 / n));
      EXPECT_NEAR(hn.sigma_h, h.sigma_h, 1e-9 * h.sigma_h);
      EXPECT_NEAR(hn.mean_r_u, h.mean_r_u, 1e-9);
      EXPECT_NEAR(hn.mean_r_v, h.mean_r_v, 1e-9);
      EXPECT_NEAR(hn.mean_kappa_v, h.mean_kappa_v, 1e-9);
      EXPECT_NEAR(hn.mean_mu_u, h.mean_mu_u, 1e-9);
    }
  }
}

TEST(CoefficientJson, RoundTripIsLossless) {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto spec = random_spec(rng, rng.uniform(0.5, 2.0));
    const auto back = spec_from_json(nlohmann::json::parse(to_json(spec).dump()));
    ASSERT_EQ(back, spec) << to_json(spec).dump();
  }
  const auto set = frontlab::testing::random_cosine_set(rng, 2.0);
  EXPECT_EQ(set_from_json(nlohmann::json::parse(to_json(set).dump())), set);
}

TEST(CoefficientJson, StrictKeys) {
  EXPECT_THROW(spec_from_json({{"kind", "constant"}, {"value", 1.0}, {"vaule", 2.0}}), ValidationError);
  EXPECT_THROW(spec_from_json({{"kind", "wavelet"}}), ValidationError);
  EXPECT_EQ(spec_from_json(2.5), CoefficientSpec::constant(2.5));
  auto j = to_json(CoefficientSet(1.0, Coefficients{}));
  j["kappa"] = 1.0;
  EXPECT_THROW(set_from_json(j), ValidationError);
  j.erase("kappa");
  j.erase("mu_v");
  EXPECT_THROW(set_from_json(j), ValidationError);
}

}  // namespace
