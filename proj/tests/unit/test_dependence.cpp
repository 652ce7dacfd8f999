#include <gtest/gtest.h>

#include <cmath>

#include "causal_lab/dependence.hpp"
#include "causal_lab/errors.hpp"

using namespace clab;

namespace {

const SeedLineage kSeed{77, 0, 0};
const auto kNormal = InnovationDistribution::standard_normal();

ProcessModel linear(std::vector<double> a, InnovationDistribution e = kNormal) {
  return ProcessModel::linear(CoefficientSequence::explicit_values(std::move(a)), e);
}

}  // namespace

TEST(BN, SmallCases) {
  auto bn = bn_decompose(std::vector<double>{1.0});
  EXPECT_EQ(bn.total, 1.0);
  EXPECT_EQ(bn.tilde, std::vector<double>{0.0});
  bn = bn_decompose(std::vector<double>{1.0, 0.5});
  EXPECT_EQ(bn.total, 1.5);
  EXPECT_EQ(bn.tilde, (std::vector<double>{0.5, 0.0}));
  EXPECT_THROW(bn_decompose(std::vector<double>{}), ConfigError);
}

TEST(BN, Geometric) {
  const auto c = CoefficientSequence::geometric(0.5, 1e-10);
  const auto bn = bn_decompose(c.coeffs);
  EXPECT_NEAR(bn.total, 2.0, 1e-9);
  for (std::size_t i = 0; i + 1 < bn.tilde.size(); ++i) {
    // stored tail sums miss only the truncated part
    EXPECT_NEAR(bn.tilde[i], std::pow(0.5, static_cast<double>(i)), 2e-10);
    EXPECT_NEAR(bn.tilde[i] - bn.tilde[i + 1], c.coeffs[i + 1], 1e-15);
  }
  EXPECT_NEAR(bn.tilde[0], bn.total - c.coeffs[0], 1e-15);
}

TEST(BN, PathwiseReconstruction) {
  for (const auto& coeffs : {CoefficientSequence::explicit_values({1.0, 0.5}), CoefficientSequence::geometric(0.5),
                             CoefficientSequence::power(2.5, 200), CoefficientSequence::explicit_values({0.3, -1.2, 0.7, 2.0})}) {
    const auto m = ProcessModel::linear(coeffs, InnovationDistribution::student_t(9.0));
    const auto b = simulate_path(m, 2000, kSeed.with_replication(4));
    const auto bn = bn_decompose(coeffs.coeffs);
    for (std::int64_t k = 1; k <= 2000; ++k) {
      const double x = b.values()[static_cast<std::size_t>(k - 1)];
      const double rebuilt =
          bn.total * b.innovation(k) + tilde_innovation(bn, b, k - 1) - tilde_innovation(bn, b, k);
      ASSERT_NEAR(x, rebuilt, 1e-12 * std::max(1.0, std::abs(x))) << coeffs.describe() << " k=" << k;
    }
  }
}

TEST(Projection, LinearClosedForm) {
  const auto th = projection_norm_linear(std::vector<double>{1.0, 0.5}, 2.0, kNormal);
  EXPECT_NEAR(th[0], std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(th[1], std::sqrt(2.0) / 2.0, 1e-15);
  EXPECT_EQ(projection_norm_linear(std::vector<double>{1.0, 0.0}, 2.0, kNormal)[1], 0.0);
  EXPECT_NEAR(projection_norm_linear(std::vector<double>{1.0}, 2.0, InnovationDistribution::rademacher())[0],
              std::sqrt(2.0), 1e-15);
  EXPECT_THROW((void)projection_norm_linear(std::vector<double>{1.0}, 0.5, kNormal), DomainError);
}

TEST(Projection, MonteCarloMatchesLinear) {
  const auto m = linear({1.0, 0.5, -0.4, 0.2, 0.1, 0.3});
  const auto closed = projection_norm_linear(m.coefficients().coeffs, 2.0, kNormal);
  for (std::size_t n : {0u, 1u, 2u, 5u}) {
    const auto est = projection_norm_mc(m, n, 2.0, 2000, 50, kSeed.with_replication(static_cast<std::uint32_t>(n)));
    EXPECT_NEAR(est.theta, closed[n], 3.0 * est.stderr_ + est.inner_bias) << "n=" << n;
  }
}

TEST(Projection, MonteCarloExamples) {
  const auto m = linear({1.0, 0.5});
  const auto one = projection_norm_mc(m, 1, 2.0, 2000, 50, kSeed);
  EXPECT_NEAR(one.theta, std::sqrt(2.0) * 0.5, 3.0 * one.stderr_);
  const auto beyond = projection_norm_mc(m, 4, 2.0, 500, 20, kSeed);
  EXPECT_NEAR(beyond.theta, 0.0, 3.0 * beyond.stderr_ + 1e-12);

  const auto arch = ProcessModel::arch1({0.2, 0.5}, kNormal);
  const auto a0 = projection_norm_mc(arch, 0, 2.0, 10000, 10000, kSeed);
  EXPECT_GT(a0.theta, 0.0);
  EXPECT_TRUE(std::isfinite(a0.theta));

  EXPECT_THROW((void)projection_norm_mc(m, 1, 2.0, 100, 1, kSeed), ConfigError);
}

TEST(Martingale, IidCase) {
  const auto m = linear({1.0});
  const auto b = simulate_path(m, 300, kSeed);
  const auto ma = martingale_approximant_linear(b, m, bn_decompose(m.coefficients().coeffs));
  for (std::size_t k = 1; k <= 300; ++k) {
    EXPECT_EQ(ma.D[k - 1], b.innovation(static_cast<std::int64_t>(k)));
    EXPECT_EQ(ma.R[k], 0.0);
  }
}

TEST(Martingale, TwoTermRemainder) {
  const auto m = linear({1.0, 0.5});
  const auto b = simulate_path(m, 1000, kSeed);
  const auto ma = martingale_approximant_linear(b, m, bn_decompose(m.coefficients().coeffs));
  const auto S = b.partial_sums();
  for (std::size_t k = 0; k <= 1000; ++k) {
    EXPECT_NEAR(ma.R[k], 0.5 * (b.innovation(0) - b.innovation(static_cast<std::int64_t>(k))), 1e-12);
    EXPECT_NEAR(S[k], ma.M[k] + ma.R[k], 1e-12 * std::max(1.0, std::abs(S[k])));
  }
}

TEST(Martingale, MismatchRejected) {
  const auto m = linear({1.0, 0.5});
  const auto other = linear({1.0, 0.9});
  const auto b = simulate_path(other, 100, kSeed);
  EXPECT_THROW((void)martingale_approximant_linear(b, m, bn_decompose(m.coefficients().coeffs)), ConfigError);
}

TEST(Martingale, RemainderNegligible) {
  const auto m = ProcessModel::linear(CoefficientSequence::geometric(0.5), kNormal);
  const auto bn = bn_decompose(m.coefficients().coeffs);
  double prev = INFINITY;
  for (std::size_t n : {100u, 1000u, 10000u}) {
    std::vector<double> sup(200);
    for (std::size_t r = 0; r < 200; ++r) {
      const auto b = simulate_path(m, n, kSeed.with_replication(static_cast<std::uint32_t>(r)));
      const auto ma = martingale_approximant_linear(b, m, bn);
      double s = 0.0;
      for (double x : ma.R) s = std::max(s, std::abs(x));
      sup[r] = s / std::sqrt(static_cast<double>(n));
    }
    std::nth_element(sup.begin(), sup.begin() + 100, sup.end());
    EXPECT_LT(sup[100], prev) << "n=" << n;
    prev = sup[100];
  }
}

TEST(LongRun, LinearExamples) {
  auto p = long_run_params(linear({1.0}), 2, 8, kSeed);
  EXPECT_EQ(p.lambda, 0.0);
  EXPECT_EQ(p.sigma, 1.0);
  p = long_run_params(linear({1.0, 0.5}), 2, 8, kSeed);
  EXPECT_DOUBLE_EQ(p.lambda, 0.5);
  EXPECT_DOUBLE_EQ(p.sigma, 1.5);
  p = long_run_params(ProcessModel::linear(CoefficientSequence::geometric(0.5), kNormal), 2, 8, kSeed);
  EXPECT_NEAR(p.lambda, 4.0 / 3.0, 1e-9);
  EXPECT_NEAR(p.sigma, 2.0, 1e-9);
  EXPECT_EQ(p.provenance, Provenance::Analytic);
}

TEST(LongRun, VarianceIdentity) {
  for (const auto& coeffs : {CoefficientSequence::explicit_values({1.0, 0.5}), CoefficientSequence::geometric(0.5),
                             CoefficientSequence::geometric(-0.8), CoefficientSequence::power(3.0, 300),
                             CoefficientSequence::explicit_values({0.3, -1.2, 0.7})}) {
    for (const auto& e : {kNormal, InnovationDistribution::uniform_centered(2.0), InnovationDistribution::student_t(6.0)}) {
      const auto p = long_run_params(ProcessModel::linear(coeffs, e), 2, 8, kSeed);
      EXPECT_NEAR(p.gamma0 + 2.0 * p.lambda, p.sigma * p.sigma, 1e-10 * std::max(1.0, p.sigma * p.sigma))
          << coeffs.describe() << " " << e.name();
    }
  }
}

TEST(LongRun, MonteCarloMatchesAnalytic) {
  // Equal TAR slopes give an AR(1), i.e. the geometric linear process.
  const auto tar = ProcessModel::threshold_ar({0.5, 0.5, 1.0}, kNormal);
  const auto mc = long_run_params(tar, 200, 20000, kSeed);
  EXPECT_EQ(mc.provenance, Provenance::MonteCarlo);
  EXPECT_NEAR(mc.lambda, 4.0 / 3.0, 3.0 * mc.lambda_stderr);
  EXPECT_NEAR(mc.sigma, 2.0, 3.0 * mc.sigma_stderr);
  EXPECT_TRUE(mc.summable);
}

TEST(LongRun, Arch1ClosedForm) {
  const auto m = ProcessModel::arch1({0.2, 0.3}, kNormal);
  const auto p = long_run_params(m, 2, 8, kSeed);
  EXPECT_EQ(p.provenance, Provenance::Analytic);
  EXPECT_EQ(p.lambda, 0.0);
  EXPECT_NEAR(p.gamma0, 0.2 / 0.7, 1e-15);
  // sample variance and lag-1 covariance of one long path
  const auto b = simulate_path(m, 400000, kSeed.with_replication(3));
  const auto x = b.values();
  double v = 0.0, c = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    v += x[t] * x[t];
    if (t) c += x[t] * x[t - 1];
  }
  EXPECT_NEAR(v / x.size(), p.gamma0, 0.01);
  EXPECT_NEAR(c / x.size(), 0.0, 0.005);
}

TEST(Profile, Aggregation) {
  const auto m = ProcessModel::linear(CoefficientSequence::geometric(0.8), kNormal);
  const auto prof = linear_profile(m, 2.0);
  for (std::size_t n = 0; n + 1 < prof.theta.size(); ++n) {
    EXPECT_GE(prof.theta[n], 0.0);
    EXPECT_LE(prof.Theta[n + 1], prof.Theta[n]);
    EXPECT_GE(prof.Lambda[n + 1], prof.Lambda[n]);
    EXPECT_NEAR(prof.Lambda[n] + prof.Theta[n + 1], prof.Theta[0], 1e-10);
  }
  EXPECT_NEAR(prof.Lambda.back() + prof.tail, prof.Theta[0], 1e-10);
}

TEST(Assumption1, Examples) {
  const auto geo = ProcessModel::linear(CoefficientSequence::geometric(0.5), kNormal);
  EXPECT_TRUE(assumption1_check(linear_profile(geo, 4.0), 4.0).pass);
  const auto harmonic = ProcessModel::linear(CoefficientSequence::power(1.0, 1000), kNormal);
  EXPECT_FALSE(assumption1_check(linear_profile(harmonic, 4.0), 4.0).pass);
  const auto iid = linear({1.0});
  const auto prof = linear_profile(iid, 4.0);
  EXPECT_TRUE(assumption1_check(prof, 4.0).pass);
  EXPECT_EQ(prof.Theta_at(1), 0.0);
}

TEST(Assumption2, LinearAndArch) {
  const auto lin = assumption2_check(linear({1.0, 0.5}), 4.0, kSeed);
  EXPECT_TRUE(lin.checked);
  EXPECT_TRUE(lin.pass);
  EXPECT_EQ(lin.sum, 0.0);
  const auto arch = assumption2_check(ProcessModel::arch1({0.2, 0.5}, kNormal), 4.0, kSeed);
  EXPECT_TRUE(arch.checked);
  EXPECT_TRUE(arch.pass);
  EXPECT_NEAR(arch.ratio, 0.5, 1e-15);
  // beta^2 E eps^4 = 0.36 * 3 > 1: fourth moment of X is infinite
  EXPECT_FALSE(assumption2_check(ProcessModel::arch1({0.2, 0.6}, kNormal), 4.0, kSeed).pass);
  EXPECT_FALSE(assumption2_check(ProcessModel::threshold_ar({0.5, 0.2, 1.0}, kNormal), 4.0, kSeed).checked);
}

TEST(Assumption3, Examples) {
  EXPECT_EQ(assumption3_bound_linear(CoefficientSequence::explicit_values({1.0})).value, 0.0);
  EXPECT_EQ(assumption3_bound_linear(CoefficientSequence::explicit_values({1.0, 0.5})).value, 0.0);
  const auto geo = CoefficientSequence::geometric(0.5, 1e-12);
  const auto rep = assumption3_bound_linear(geo);
  EXPECT_TRUE(rep.pass);
  // independent brute-force triple loop over the stored range
  const auto bn = bn_decompose(geo.coeffs);
  const std::size_t m = geo.max_index();
  long double brute = 0.0L;
  for (std::size_t r = 0; r <= m; ++r)
    for (std::size_t k = 0; k <= m; ++k)
      for (std::size_t j = k + 1; j + r <= m; ++j) brute += std::abs(geo.coeffs[j]) * std::abs(bn.tilde[j + r]);
  EXPECT_NEAR(rep.value, static_cast<double>(brute), 1e-12);
  EXPECT_NEAR(rep.value, 8.0 / 9.0, 1e-9);
  EXPECT_FALSE(assumption3_bound_linear(CoefficientSequence::power(2.0, 500)).pass);
  EXPECT_TRUE(assumption3_bound_linear(CoefficientSequence::power(3.5, 500)).pass);
}

TEST(Lemma1, Constants) {
  EXPECT_EQ(burkholder_constant(2.0), 1.0);
  EXPECT_NEAR(burkholder_constant(4.0), 18.0 * 8.0 / std::sqrt(3.0), 1e-12);
}

TEST(Lemma1, IidExample) {
  const auto rep = lemma1_inequality_check(linear({1.0}), 2.0, 100, 2000, kSeed);
  EXPECT_NEAR(rep.rhs, 2.0 * 10.0 * std::sqrt(2.0), 1e-12);
  EXPECT_TRUE(rep.holds);
  EXPECT_LE(rep.lhs, rep.rhs);
}

TEST(Lemma1, ZeroProcess) {
  const std::vector<double> zeros(500, 0.0);
  const auto rep = lemma1_from_maxima(zeros, 2.0, 100, std::sqrt(2.0));
  EXPECT_EQ(rep.lhs, 0.0);
  EXPECT_TRUE(rep.holds);
}

TEST(Lemma1, HoldsAcrossSeeds) {
  const auto m = linear({1.0, 0.5});
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto rep = lemma1_inequality_check(m, 2.0, 400, 500, SeedLineage{1000 + s, 0, 0});
    EXPECT_TRUE(rep.holds) << "seed " << s;
  }
}

TEST(Lemma1, NeedsTheta0) {
  const auto tar = ProcessModel::threshold_ar({0.5, 0.2, 1.0}, kNormal);
  EXPECT_THROW((void)lemma1_inequality_check(tar, 2.0, 100, 100, kSeed), ConfigError);
}
