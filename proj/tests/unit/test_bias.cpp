#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "invdiv/bias.hpp"
#include "invdiv/conditions.hpp"
#include "invdiv/divergence.hpp"
#include "invdiv/errors.hpp"
#include "oracles.hpp"

using namespace invdiv;

namespace {

BiasReport quad(const std::string& model, const std::string& f) {
  return bias_quadrature(BiasQuery(ModelSpec::parse(model), parse_f(f)));
}

}  // namespace

TEST(BiasQuadrature, IgtVanishesWhereTheConditionHolds) {
  const BiasReport r = quad("igt(theta=2,lambda=3,g=gauss)", "log1p:1");
  EXPECT_EQ(r.verdict, BiasVerdict::vanishes) << r.note;
  ASSERT_EQ(r.bias.size(), 1u);
  ASSERT_TRUE(r.normalizer);
  EXPECT_LE(std::abs(r.bias[0]), 1e-8 * (1 + *r.normalizer));
  EXPECT_FALSE(r.standard_error);
  // Parameter independence of the verdict.
  for (auto [theta, lambda] : {std::pair{0.5, 1.0}, std::pair{2.0, 3.0}, std::pair{10.0, 0.1}})
    for (const char* g : {"gauss", "student:5", "cauchy", "tricube"}) {
      const std::string spec = "igt(theta=" + std::to_string(theta) + ",lambda=" +
                               std::to_string(lambda) + ",g=" + g + ")";
      EXPECT_EQ(quad(spec, "log1p:1").verdict, BiasVerdict::vanishes) << spec;
    }
}

TEST(BiasQuadrature, IdentityGivesMeanMinusTheta) {
  for (const char* g : {"gauss", "student:5", "cauchy", "tricube"}) {
    const BiasReport r = quad(std::string("igt(theta=2,lambda=3,g=") + g + ")", "identity");
    EXPECT_EQ(r.verdict, BiasVerdict::vanishes) << g;
    EXPECT_NEAR(*r.normalizer, 1.0, 1e-9);
  }
}

TEST(BiasQuadrature, DivergentConditionIsUndetermined) {
  const BiasReport r = quad("igt(theta=2,lambda=3,g=cauchy)", "exp_tilt:0.25");
  EXPECT_EQ(r.verdict, BiasVerdict::undetermined);
  EXPECT_FALSE(r.note.empty());
}

// Gamma(k=3, mean 2) scored with inverse-divergence weights, lambda = 1.
TEST(BiasQuadrature, GammaUnderInverseDivergenceIsBiased) {
  const ModelSpec gamma = ModelSpec::parse("gamma(shape=3,mean=2)");
  const BiasReport r =
      bias_quadrature(BiasQuery(gamma, parse_f("log1p:1"), DivergenceKind::inverse, {1.0}));
  EXPECT_EQ(r.verdict, BiasVerdict::nonzero);
  ASSERT_EQ(r.bias.size(), 1u);
  EXPECT_GT(std::abs(r.bias[0]), 1e-3);
  const double oracle = oracle::positive_axis(
      [](double x) {
        const double pdf = 27.0 / 8.0 * x * x * std::exp(-1.5 * x) / 2.0;
        return (x - 2.0) / (1.0 + inverse_div(x, 2.0, 1.0)) * pdf;
      },
      2.0, 1e-14);
  EXPECT_NEAR(r.bias[0], oracle, 1e-10);
  EXPECT_NEAR(r.bias[0], 0.0436785202479, 1e-12);
}

TEST(BiasQuadrature, IgtUnderItakuraSaitoIsBiased) {
  const ModelSpec igt = ModelSpec::parse("igt(theta=2,lambda=3,g=gauss)");
  const BiasReport r =
      bias_quadrature(BiasQuery(igt, parse_f("log1p:1"), DivergenceKind::itakura_saito, {3.0}));
  EXPECT_EQ(r.verdict, BiasVerdict::nonzero);
  EXPECT_GT(std::abs(r.bias[0]), 1e-3);
}

TEST(BiasQuadrature, BaselinesUnderTheirOwnDivergence) {
  EXPECT_EQ(quad("gaussian(mean=1,variance=2)", "log1p:1").verdict, BiasVerdict::vanishes);
  // With identity f every law is unbiased for its mean.
  EXPECT_EQ(quad("gamma(shape=3,mean=2)", "identity").verdict, BiasVerdict::vanishes);
  EXPECT_THROW(BiasQuery(ModelSpec::parse("gaussian(mean=1,variance=2)"), parse_f("identity"),
                         DivergenceKind::inverse, {1.0}),
               DomainError);
}

TEST(BiasQuadrature, MixturesFollowCorollaryTwo) {
  for (const char* g : {"gauss", "student:5", "tricube"})
    for (const char* f : {"identity", "log1p:1", "power:0.5", "exp_tilt:0.25"}) {
      const BiasReport r = quad(std::string("gigt_mix(theta=2,lambda=3,g=") + g + ")", f);
      const bool finite = check_corollary2(parse_g(g), parse_f(f)).finite();
      EXPECT_EQ(r.verdict == BiasVerdict::vanishes, finite) << g << " " << f << " " << r.note;
    }
  EXPECT_EQ(quad("gig_mix(theta=1,lambda=1)", "log1p:1").verdict, BiasVerdict::vanishes);
}

TEST(BiasQuadrature, MigtTwoDimensional) {
  const BiasReport r = quad("migt(theta=[1,2],lambda=[1,1],g=gauss)", "log1p:1");
  EXPECT_EQ(r.verdict, BiasVerdict::vanishes) << r.note;
  EXPECT_EQ(r.bias.size(), 2u);
}

TEST(BiasMonteCarlo, VanishesWithinFourStandardErrors) {
  MonteCarloOptions opts;
  opts.n = 200000;
  RngStream rng(1, 0);
  const BiasReport r = bias_monte_carlo(
      BiasQuery(ModelSpec::parse("migt(theta=[1,2,1.5],lambda=[1,1,2],g=student:5)"), parse_f("log1p:1")),
      opts, rng);
  ASSERT_TRUE(r.standard_error);
  EXPECT_EQ(r.verdict, BiasVerdict::vanishes);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_LE(std::abs(r.bias[j]), 4 * (*r.standard_error)[j]);
  EXPECT_EQ(r.samples, opts.n);
}

TEST(BiasMonteCarlo, HeavyTailIsUndetermined) {
  const FFunction cubic = FFunction::custom(
      "cubic_growth", [](double t) { return (std::pow(1 + t, 4.0) - 1) / 4.0; },
      [](double t) { return std::pow(1 + t, 3.0); }, FFunction::Shape::convex);
  MonteCarloOptions opts;
  opts.n = 200000;
  RngStream rng(2, 0);
  const BiasReport r = bias_monte_carlo(
      BiasQuery(ModelSpec::parse("migt(theta=[1,2,1.5],lambda=[1,1,2],g=student:5)"), cubic), opts, rng);
  EXPECT_EQ(r.verdict, BiasVerdict::undetermined);
  EXPECT_NE(r.note.find("nonconvergent second moment"), std::string::npos);
}

TEST(BiasMonteCarlo, ThreadCountDoesNotChangeTheEstimate) {
  const BiasQuery q(ModelSpec::parse("igt(theta=2,lambda=3,g=student:5)"), parse_f("log1p:1"));
  MonteCarloOptions one, four;
  one.n = four.n = 50000;
  four.threads = 4;
  RngStream a(3, 0), b(3, 0);
  EXPECT_EQ(bias_monte_carlo(q, one, a).bias, bias_monte_carlo(q, four, b).bias);
  one.n = 0;
  RngStream c(3, 0);
  EXPECT_THROW(bias_monte_carlo(q, one, c), DomainError);
}

TEST(Lemmas, BothSidesAgree) {
  auto e = [](double t) { return std::exp(-t); };
  auto p3 = [](double t) { return std::pow(1 + t, -3.0); };
  const LemmaReport m1 = verify_lemma(Lemma::lemma1, 1, {0.7}, e);
  EXPECT_NEAR(m1.rel_diff, 0.0, 1e-12);
  for (const auto& u : {std::function<double(double)>(e), std::function<double(double)>(p3)}) {
    EXPECT_LE(verify_lemma(Lemma::lemma1, 2, {0.5, 1.5}, u).rel_diff, 1e-6);
    EXPECT_LE(verify_lemma(Lemma::lemma2, 2, {}, u).rel_diff, 1e-6);
    EXPECT_LE(verify_lemma(Lemma::lemma2, 3, {}, u).rel_diff, 1e-6);
  }
  // m = 2, u = e^{-t}: pi / Gamma(1) int e^{-t} dt = pi.
  EXPECT_NEAR(verify_lemma(Lemma::lemma2, 2, {}, e).rhs, std::numbers::pi, 1e-10);
  const LemmaReport mc = verify_lemma(Lemma::lemma2, 5, {}, e, 400000, 9);
  EXPECT_LE(std::abs(mc.lhs - mc.rhs), 4 * mc.lhs_error);
  EXPECT_THROW(verify_lemma(Lemma::lemma2, 2, {0.5, 1.0}, e), DomainError);
  EXPECT_THROW(verify_lemma(Lemma::lemma1, 0, {}, e), DomainError);
}

TEST(PlanarReduction, ReductionAgreesInTwoAndThreeDimensions) {
  const MigtModel m2({1.0, 2.0}, {1.0, 1.0}, make_g("gauss"));
  for (std::size_t k : {0u, 1u}) {
    const AppendixBReport r = verify_appendix_b_reduction(m2, make_f("identity"), k);
    EXPECT_LE(std::abs(r.signed_expectation), 1e-6);
    EXPECT_LE(r.rel_diff, 1e-4);
    EXPECT_LE(r.abs_identity_rel_diff, 1e-4);
  }
  const MigtModel m3({1.0, 2.0, 1.5}, {1.0, 1.0, 2.0}, make_g("gauss"));
  const AppendixBReport r3 = verify_appendix_b_reduction(m3, make_f("identity"), 0);
  EXPECT_LE(r3.rel_diff, 1e-3);
  EXPECT_LE(std::abs(r3.signed_expectation), 1e-4);
  EXPECT_THROW(verify_appendix_b_reduction(m2, make_f("identity"), 2), DomainError);
}

TEST(PlanarReduction, AbsoluteIdentityForIgt) {
  for (const auto& g : default_g_catalog())
    for (const char* f : {"identity", "log1p:1", "power:0.5"}) {
      const AbsIdentityReport r = verify_igt_abs_identity(IgtModel(2.0, 3.0, g), parse_f(f));
      EXPECT_LE(r.rel_diff, 1e-8) << g.name() << " " << f;
    }
}

TEST(PlanarReduction, MeanBoundChain) {
  for (const auto& g : default_g_catalog())
    for (int d : {2, 3}) {
      const MeanBoundReport r = verify_mean_bound(g, d);
      EXPECT_TRUE(r.holds) << g.name() << " d=" << d;
      if (r.vacuous) continue;
      EXPECT_LT(r.a, r.b_planar);
      EXPECT_NEAR(r.b_planar, r.b_reduced, r.tolerance);
      EXPECT_LE(r.b_reduced, r.c + r.tolerance);
      // B against an independent evaluation of its closed form.
      const double m = oracle::positive_axis(
          [&](double t) { return g(t) * std::pow(t, 0.5 * (d - 2)); }, 1.0, 1e-12);
      const double b = std::sqrt(std::numbers::pi) * boost::math::tgamma(0.5 * (d - 1)) /
                       boost::math::tgamma(0.5 * d) * m;
      EXPECT_NEAR(r.b_reduced, b, 1e-7 * b) << g.name() << " d=" << d;
    }
}
