#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "causal_lab/errors.hpp"
#include "causal_lab/processes.hpp"

using namespace clab;

namespace {

const SeedLineage kSeed{20240611, 0, 0};

double mean_of(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0) / x.size(); }

double autocov(std::span<const double> x, std::size_t lag) {
  const double m = mean_of(x);
  double s = 0.0;
  for (std::size_t i = lag; i < x.size(); ++i) s += (x[i] - m) * (x[i - lag] - m);
  return s / x.size();
}

}  // namespace

TEST(Innovations, RademacherValuesAndMean) {
  const auto d = InnovationDistribution::rademacher();
  const auto few = sample_innovations(d, 4, kSeed);
  for (double v : few) EXPECT_TRUE(v == 1.0 || v == -1.0);
  const auto many = sample_innovations(d, 1'000'000, kSeed);
  EXPECT_NEAR(mean_of(many), 0.0, 0.004);
}

TEST(Innovations, NormalVariance) {
  const auto x = sample_innovations(InnovationDistribution::standard_normal(), 1'000'000, kSeed);
  double sq = 0.0;
  for (double v : x) sq += v * v;
  EXPECT_NEAR(sq / x.size(), 1.0, 0.01);
}

TEST(Innovations, StudentTFourthMoment) {
  const auto d = InnovationDistribution::student_t(5.0);
  EXPECT_NEAR(d.fourth_moment(), 25.0, 1e-12);
  const auto x = sample_innovations(d, 1'000'000, kSeed);
  double m4 = 0.0;
  for (double v : x) m4 += v * v * v * v;
  EXPECT_NEAR(m4 / x.size(), 25.0, 2.5);
}

TEST(Innovations, DeclaredMoments) {
  for (const auto& d : {InnovationDistribution::standard_normal(), InnovationDistribution::uniform_centered(),
                        InnovationDistribution::rademacher(), InnovationDistribution::student_t(7.0)}) {
    EXPECT_EQ(d.mean(), 0.0) << d.name();
    EXPECT_GT(d.variance(), 0.0) << d.name();
    EXPECT_TRUE(std::isfinite(d.fourth_moment())) << d.name();
    for (double p : {2.0, 3.0, 4.0}) EXPECT_GT(d.norm(p), 0.0) << d.name();
  }
  EXPECT_NEAR(InnovationDistribution::uniform_centered().variance(), 1.0, 1e-12);
  EXPECT_NEAR(InnovationDistribution::standard_normal().norm(4.0), std::pow(3.0, 0.25), 1e-12);
}

TEST(Innovations, InvalidParameters) {
  EXPECT_THROW(InnovationDistribution::student_t(4.0), ConfigError);
  EXPECT_THROW(InnovationDistribution::uniform_centered(0.0), ConfigError);
  EXPECT_THROW((void)sample_innovations(InnovationDistribution::standard_normal(), 0, kSeed), ConfigError);
}

TEST(Models, InvariantsRejected) {
  const auto n = InnovationDistribution::standard_normal();
  EXPECT_THROW(ProcessModel::linear(CoefficientSequence::explicit_values({}), n), ConfigError);
  EXPECT_THROW(ProcessModel::threshold_ar({1.0, 0.5, 1.0}, n), ConfigError);
  EXPECT_THROW(ProcessModel::arch1({0.0, 0.5}, n), ConfigError);
  EXPECT_THROW(ProcessModel::arch1({1.0, 1.0}, n), ConfigError);
  EXPECT_THROW(CoefficientSequence::geometric(1.0), ConfigError);
}

TEST(Models, BurnInDefaults) {
  const auto n = InnovationDistribution::standard_normal();
  EXPECT_EQ(ProcessModel::linear(CoefficientSequence::explicit_values({1, 0.5, 0.25}), n).burn_in(), 2u);
  EXPECT_EQ(ProcessModel::arch1({1.0, 0.3}, n).burn_in(), 1000u);
  EXPECT_EQ(ProcessModel::threshold_ar({0.5, -0.3, 1.0}, n).burn_in(), 1000u);
}

TEST(Models, GeometricTailBoundBelowTolerance) {
  const auto c = CoefficientSequence::geometric(0.5, 1e-10);
  EXPECT_LE(c.tail_bound, 1e-10);
  double exact_tail = std::pow(0.5, static_cast<double>(c.max_index() + 1)) / 0.5;
  EXPECT_NEAR(c.tail_bound, exact_tail, 1e-15);
  EXPECT_TRUE(std::isinf(CoefficientSequence::power(1.0, 100).tail_bound));
}

TEST(Models, LinearAnalyticMetadata) {
  const auto m = ProcessModel::linear(CoefficientSequence::explicit_values({1, 0.5}),
                                      InnovationDistribution::standard_normal());
  ASSERT_TRUE(m.analytic());
  EXPECT_DOUBLE_EQ(m.analytic()->total, 1.5);
  EXPECT_DOUBLE_EQ(m.analytic()->lambda, 0.5);
  EXPECT_DOUBLE_EQ(m.analytic()->sigma, 1.5);
  EXPECT_DOUBLE_EQ(m.analytic()->autocovariance[0], 1.25);
}

TEST(Paths, IdentityCoefficientsReproduceInnovations) {
  const auto m = ProcessModel::linear(CoefficientSequence::explicit_values({1}),
                                      InnovationDistribution::uniform_centered());
  const auto b = simulate_path(m, 500, kSeed);
  for (std::size_t k = 1; k <= 500; ++k) EXPECT_EQ(b.values()[k - 1], b.innovation(static_cast<std::int64_t>(k)));
}

TEST(Paths, LagOneAutocovariance) {
  const auto m = ProcessModel::linear(CoefficientSequence::explicit_values({1, 0.5}),
                                      InnovationDistribution::standard_normal());
  const auto b = simulate_path(m, 1'000'000, kSeed);
  EXPECT_NEAR(autocov(b.values(), 1), 0.5, 0.01);
}

TEST(Paths, ArchMeanZero) {
  const auto m = ProcessModel::arch1({0.2, 0.5}, InnovationDistribution::standard_normal());
  const auto b = simulate_path(m, 1'000'000, kSeed);
  EXPECT_NEAR(mean_of(b.values()), 0.0, 0.01);
}

TEST(Paths, ExactConvolution) {
  const auto coeffs = CoefficientSequence::geometric(0.7, 1e-10);
  const auto m = ProcessModel::linear(coeffs, InnovationDistribution::student_t(6.0));
  const auto b = simulate_path(m, 300, kSeed);
  for (std::size_t k = 1; k <= 300; ++k) {
    long double x = 0.0L;
    for (std::size_t i = 0; i <= coeffs.max_index(); ++i)
      x += static_cast<long double>(coeffs.coeffs[i]) * b.innovation(static_cast<std::int64_t>(k - i));
    const double v = b.values()[k - 1];
    EXPECT_NEAR(v, static_cast<double>(x), 1e-12 * std::max(1.0, std::abs(v)));
  }
}

TEST(Paths, PartialSumsIncrement) {
  const auto m = ProcessModel::threshold_ar({0.6, -0.3, 1.0}, InnovationDistribution::standard_normal());
  const auto b = simulate_path(m, 1000, kSeed);
  const auto S = b.partial_sums();
  EXPECT_EQ(S[0], 0.0);
  for (std::size_t k = 1; k <= 1000; ++k) EXPECT_NEAR(S[k] - S[k - 1], b.values()[k - 1], 1e-12 * std::max(1.0, std::abs(S[k])));
}

TEST(Paths, SeedDeterminism) {
  for (const auto& m : {ProcessModel::linear(CoefficientSequence::geometric(0.5), InnovationDistribution::standard_normal()),
                        ProcessModel::arch1({0.2, 0.5}, InnovationDistribution::rademacher()),
                        ProcessModel::threshold_ar({0.6, -0.3, 2.0}, InnovationDistribution::uniform_centered())}) {
    const auto a = simulate_path(m, 2000, kSeed.with_replication(11));
    const auto b = simulate_path(m, 2000, kSeed.with_replication(11));
    const auto c = simulate_path(m, 2000, kSeed.with_replication(12));
    EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
    EXPECT_TRUE(std::equal(a.innovations().begin(), a.innovations().end(), b.innovations().begin()));
    EXPECT_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
  }
}

TEST(Paths, StationaryAcrossHalves) {
  const std::size_t n = 1'000'000;
  for (const auto& m : {ProcessModel::linear(CoefficientSequence::explicit_values({1, 0.5}),
                                             InnovationDistribution::standard_normal()),
                        ProcessModel::linear(CoefficientSequence::geometric(0.5), InnovationDistribution::student_t(6.0)),
                        ProcessModel::arch1({0.2, 0.5}, InnovationDistribution::standard_normal()),
                        ProcessModel::threshold_ar({0.6, -0.3, 1.0}, InnovationDistribution::standard_normal())}) {
    const auto b = simulate_path(m, n, kSeed.with_replication(3));
    const auto x = b.values();
    const auto lo = x.subspan(0, n / 2), hi = x.subspan(n / 2);
    // Tolerances are about five Monte Carlo standard errors of the difference for these models.
    EXPECT_NEAR(mean_of(lo), mean_of(hi), 0.02) << m.describe();
    EXPECT_NEAR(autocov(lo, 0), autocov(hi, 0), 0.05 * autocov(x, 0)) << m.describe();
    EXPECT_NEAR(autocov(lo, 1), autocov(hi, 1), 0.05 * autocov(x, 0)) << m.describe();
  }
}

TEST(PartialSumPath, Basics) {
  const auto ones = PathBundle::from_values(std::vector<double>(100, 1.0));
  EXPECT_EQ(partial_sum_path(ones, 100, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(partial_sum_path(ones, 100, 0.5), 5.0);
  EXPECT_THROW((void)partial_sum_path(ones, 100, -0.1), DomainError);
  EXPECT_THROW((void)partial_sum_path(ones, 100, 1.5), DomainError);
  // right-continuous steps
  EXPECT_DOUBLE_EQ(partial_sum_path(ones, 100, 0.509), 5.0);
  EXPECT_DOUBLE_EQ(partial_sum_path(ones, 100, 0.51), 5.1);
}

TEST(PartialSumPath, LongRunVariance) {
  const auto m = ProcessModel::linear(CoefficientSequence::explicit_values({1, 0.5}),
                                      InnovationDistribution::standard_normal());
  const std::size_t reps = 4000, n = 10000;
  double sq = 0.0, s = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto b = simulate_path(m, n, kSeed.with_replication(static_cast<std::uint32_t>(r)));
    const double v = partial_sum_path(b, n, 1.0);
    s += v;
    sq += v * v;
  }
  const double var = sq / reps - (s / reps) * (s / reps);
  EXPECT_NEAR(var, 2.25, 0.05 * 2.25);
}
