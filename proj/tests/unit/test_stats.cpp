#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "causal_lab/errors.hpp"
#include "causal_lab/experiment.hpp"
#include "causal_lab/stats.hpp"

using namespace clab;

namespace {

const SeedLineage kSeed{777, 0, 0};

ProcessModel iid() {
  return ProcessModel::linear(CoefficientSequence::explicit_values({1.0}), InnovationDistribution::standard_normal());
}
ProcessModel ma1() {
  return ProcessModel::linear(CoefficientSequence::explicit_values({1.0, 0.5}),
                              InnovationDistribution::standard_normal());
}

}  // namespace

TEST(FunctionalStatistic, HandExamples) {
  const auto b = PathBundle::from_values({1.0, -1.0, 1.0, 1.0});
  EXPECT_NEAR(functional_statistic(b, FunctionalSpec::identity(), 4, 1.0), 0.0, 1e-15);
  // f = 1: sum over t = 2..4 of X_t / 2
  EXPECT_NEAR(functional_statistic(b, FunctionalSpec::constant(1.0), 4, 1.0), 0.5, 1e-15);
  EXPECT_EQ(functional_statistic(b, FunctionalSpec::identity(), 4, 0.25), 0.0);
}

TEST(FunctionalStatistic, ConstantIsShiftedPartialSum) {
  const auto b = simulate_path(ma1(), 1000, kSeed);
  for (double r : {0.1, 0.5, 0.999, 1.0}) {
    const double lhs = functional_statistic(b, FunctionalSpec::constant(1.0), 1000, r);
    const double rhs = partial_sum_path(b, 1000, r) - b.values()[0] / std::sqrt(1000.0);
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
}

TEST(FunctionalStatistic, OverflowGivesNan) {
  const auto b = PathBundle::from_values(std::vector<double>(10, 400.0));
  EXPECT_TRUE(std::isnan(functional_statistic(b, FunctionalSpec::exponential(50.0, true), 10, 1.0)) ||
              is_flagged(functional_statistic(b, FunctionalSpec::exponential(50.0, true), 10, 1.0)));
}

TEST(UnitRoot, SeriesAndAlpha) {
  const auto Y = unit_root_series(PathBundle::from_values({1.0, 2.0, 3.0}));
  ASSERT_EQ(Y.size(), 4u);
  EXPECT_EQ(Y[0], 0.0);
  EXPECT_EQ(Y[1], 1.0);
  EXPECT_EQ(Y[2], 3.0);
  EXPECT_EQ(Y[3], 6.0);

  const std::vector<double> ramp{0.0, 1.0, 2.0, 3.0};
  const auto a = ols_alpha(ramp);
  EXPECT_DOUBLE_EQ(a.alpha_hat, 8.0 / 5.0);
  EXPECT_DOUBLE_EQ(a.scaled, 3.0 * (8.0 / 5.0 - 1.0));

  const std::vector<double> flat(6, 2.5);
  EXPECT_EQ(ols_alpha(flat).scaled, 0.0);
  EXPECT_EQ(ols_alpha(flat).alpha_hat, 1.0);

  const std::vector<double> zeros(5, 0.0);
  EXPECT_THROW((void)ols_alpha(zeros), DegeneratePathError);
}

TEST(UnitRoot, TStatistic) {
  std::vector<double> Y{1.0};
  for (int t = 0; t < 20; ++t) Y.push_back(0.9 * Y.back());
  EXPECT_THROW((void)t_statistic(Y, ols_alpha(Y)), DegeneratePathError);

  const auto b = simulate_path(iid(), 500, kSeed);
  auto Z = unit_root_series(b);
  const double t1 = t_statistic(Z, ols_alpha(Z));
  for (double& z : Z) z *= 37.0;
  const double t2 = t_statistic(Z, ols_alpha(Z));
  EXPECT_NEAR(t1, t2, 1e-12 * std::max(1.0, std::abs(t1)));
}

TEST(UnitRoot, JointRatioIdentity) {
  for (std::uint32_t i = 0; i < 10; ++i) {
    const auto b = simulate_path(ma1(), 800, kSeed.with_replication(i));
    const auto j = joint_statistic(b, 800, 1.0);
    const auto Y = unit_root_series(b);
    EXPECT_NEAR(j.cross / j.square, ols_alpha(Y).scaled, 1e-12 * std::max(1.0, std::abs(j.cross / j.square)));
  }
}

TEST(UnitRoot, JointMeans) {
  const std::size_t n = 400, reps = 4000;
  auto means = [&](const ProcessModel& m) {
    double c = 0.0, s = 0.0, c2 = 0.0;
    for (std::size_t i = 0; i < reps; ++i) {
      const auto j = joint_statistic(simulate_path(m, n, kSeed.with_replication(static_cast<std::uint32_t>(i))), n, 1.0);
      c += j.cross;
      c2 += j.cross * j.cross;
      s += j.square;
    }
    const double mc = c / reps;
    return std::tuple{mc, std::sqrt((c2 / reps - mc * mc) / reps), s / reps};
  };
  const auto [c0, se0, s0] = means(iid());
  EXPECT_NEAR(c0, 0.0, 3.0 * se0);
  EXPECT_NEAR(s0, 0.5, 0.03);
  const auto [c1, se1, s1] = means(ma1());
  // E cross -> lambda = sum_{k>=1} gamma(k) = 0.5
  EXPECT_NEAR(c1, 0.5, 3.0 * se1 + 0.01);
  EXPECT_NEAR(s1, 2.25 * 0.5, 0.08);
}

TEST(Ensemble, EcdfAndQuantiles) {
  const EnsembleDistribution d({3.0, 1.0, 2.0, 2.0, std::numeric_limits<double>::quiet_NaN()});
  EXPECT_EQ(d.count(), 4u);
  EXPECT_EQ(d.flagged(), 1u);
  EXPECT_DOUBLE_EQ(d.flagged_fraction(), 0.2);
  EXPECT_EQ(d.ecdf(0.5), 0.0);
  EXPECT_EQ(d.ecdf(1.0), 0.25);
  EXPECT_EQ(d.ecdf(2.0), 0.75);
  EXPECT_EQ(d.ecdf(10.0), 1.0);
  EXPECT_EQ(d.median(), 2.0);
  EXPECT_EQ(d.quantile(0.0), 1.0);
  EXPECT_EQ(d.quantile(1.0), 3.0);
  EXPECT_DOUBLE_EQ(d.mean(), 2.0);
  EXPECT_TRUE(is_flagged(1e101));
  EXPECT_FALSE(is_flagged(-1e99));
}

TEST(Ensemble, EcdfMonotone) {
  std::vector<double> v;
  for (std::uint32_t i = 0; i < 500; ++i) v.push_back(CounterStream(kSeed).normal(i));
  const EnsembleDistribution d(v);
  double prev = 0.0;
  for (int k = -400; k <= 400; ++k) {
    const double e = d.ecdf(k * 0.01);
    EXPECT_GE(e, prev);
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, 1.0);
    prev = e;
  }
}

TEST(KS, Examples) {
  const EnsembleDistribution a({1.0, 2.0, 3.0});
  const auto same = ks_two_sample(a, a);
  EXPECT_EQ(same.statistic, 0.0);
  EXPECT_EQ(same.p_value, 1.0);
  const auto apart = ks_two_sample(EnsembleDistribution({0.0}), EnsembleDistribution({1.0}));
  EXPECT_EQ(apart.statistic, 1.0);
  EXPECT_NEAR(kolmogorov_survival(1.3581), 0.05, 1e-4);
  EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
}

TEST(KS, NullCalibration) {
  int rejections = 0;
  for (std::uint32_t trial = 0; trial < 100; ++trial) {
    const CounterStream sa(kSeed.with_replication(trial).with(Purpose::Innovations));
    const CounterStream sb(kSeed.with_replication(trial).with(Purpose::Brownian));
    std::vector<double> x(1000), y(1000);
    for (std::uint32_t i = 0; i < 1000; ++i) {
      x[i] = sa.normal(i);
      y[i] = sb.normal(i);
    }
    if (ks_two_sample(EnsembleDistribution(x), EnsembleDistribution(y)).p_value < 0.05) ++rejections;
  }
  EXPECT_GE(rejections, 1);
  EXPECT_LE(rejections, 12);
}

TEST(KS, RefusesFlaggedEnsembles) {
  std::vector<double> v(100, 0.0);
  for (int i = 0; i < 100; ++i) v[i] = i;
  v[0] = v[1] = std::numeric_limits<double>::infinity();
  EXPECT_THROW((void)ks_two_sample(EnsembleDistribution(v), EnsembleDistribution({1.0, 2.0})), ComparisonRefused);
  v[1] = 1.0;  // exactly 1% flagged is allowed
  EXPECT_NO_THROW((void)ks_two_sample(EnsembleDistribution(v), EnsembleDistribution({1.0, 2.0})));
}

TEST(Experiment, ConstantFunctionalIsClt) {
  for (const auto& m : {iid(), ma1()}) {
    const double sigma = m.analytic()->sigma;
    const auto stats = functional_ensemble(m, FunctionalSpec::constant(1.0), 1000, 1.0, 4000, kSeed);
    std::vector<double> ref(4000);
    const CounterStream z(kSeed.with(Purpose::Calibration));
    for (std::uint32_t i = 0; i < 4000; ++i) ref[i] = sigma * z.normal(i);
    EXPECT_GT(ks_two_sample(EnsembleDistribution(stats), EnsembleDistribution(ref)).p_value, 1e-3) << m.describe();
  }
}

TEST(Experiment, EnsembleIndependentOfWorkers) {
  const auto a = functional_ensemble(ma1(), FunctionalSpec::logistic(1.0), 300, 1.0, 64, kSeed, 1);
  const auto b = functional_ensemble(ma1(), FunctionalSpec::logistic(1.0), 300, 1.0, 64, kSeed, 3);
  EXPECT_EQ(a, b);
}

TEST(Experiment, FailedAssumptionsBlockUnlessOverridden) {
  const auto harmonic = ProcessModel::linear(CoefficientSequence::power(1.0, 1000),
                                             InnovationDistribution::standard_normal());
  Theorem1Config cfg;
  cfg.n_grid = {100, 200};
  cfg.reps = 200;
  cfg.seed = kSeed;
  const auto blocked = run_theorem1(harmonic, FunctionalSpec::identity(), cfg);
  EXPECT_FALSE(blocked.ran);
  EXPECT_FALSE(blocked.pass);
  EXPECT_FALSE(blocked.assumptions.pass);

  cfg.override_assumptions = true;
  const auto forced = run_theorem1(harmonic, FunctionalSpec::identity(), cfg);
  EXPECT_TRUE(forced.ran);
  EXPECT_FALSE(forced.banner.empty());
  EXPECT_EQ(forced.rows.size(), 2u);
}

TEST(Experiment, ExactOracleIdentity) {
  const auto s = exact_limit_samples(FunctionalSpec::identity(), 0.0, 1.0, 1.0, 20000, kSeed);
  const EnsembleDistribution d(s);
  EXPECT_NEAR(d.mean(), 0.0, 3.0 * d.mean_stderr());
  EXPECT_NEAR(d.variance(), 0.5, 0.03);
  EXPECT_GE(d.quantile(0.0), -0.5);
}
