#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "causal_lab/errors.hpp"
#include "causal_lab/functional.hpp"
#include "causal_lab/limit_law.hpp"
#include "causal_lab/stats.hpp"

using namespace clab;

namespace {

const SeedLineage kSeed{4242, 0, 0};

std::vector<FunctionalSpec> builtins() {
  return {FunctionalSpec::constant(2.0), FunctionalSpec::identity(), FunctionalSpec::polynomial({0.5, -1.0, 0.5}),
          FunctionalSpec::scaled_sine(1.5, 2.0), FunctionalSpec::logistic(3.0)};
}

BrownianGrid path(std::size_t M, std::uint32_t rep, double horizon = 1.0) {
  return BrownianGrid::simulate(M, horizon, kSeed.with_replication(rep).with(Purpose::Brownian));
}

struct MeanSe {
  double mean, se;
};
MeanSe mean_se(const std::vector<double>& v) {
  double s = 0.0, q = 0.0;
  for (double x : v) s += x;
  const double m = s / v.size();
  for (double x : v) q += (x - m) * (x - m);
  return {m, std::sqrt(q / (v.size() - 1) / v.size())};
}

}  // namespace

TEST(Functional, FiniteDifferenceChecks) {
  for (const auto& f : builtins()) {
    const auto v = f.validate();
    EXPECT_TRUE(v.ok()) << f.describe() << " first " << v.worst_first << " second " << v.worst_second;
  }
  EXPECT_TRUE(FunctionalSpec::exponential(0.5, true).validate().derivative_ok);
}

TEST(Functional, ParseAndDescribe) {
  EXPECT_EQ(FunctionalSpec::parse("identity").kind(), FunctionalSpec::Kind::Identity);
  EXPECT_EQ(FunctionalSpec::parse("constant:2").f(7.0), 2.0);
  EXPECT_EQ(FunctionalSpec::parse("polynomial:0,0,1").f(3.0), 9.0);
  EXPECT_DOUBLE_EQ(FunctionalSpec::parse("sine:2,0.5").f(1.0), 2.0 * std::sin(0.5));
  EXPECT_DOUBLE_EQ(FunctionalSpec::parse("logistic:1").f(0.0), 0.5);
  EXPECT_THROW(FunctionalSpec::parse("exp:1"), ConfigError);
  EXPECT_TRUE(FunctionalSpec::parse("exp:1", true).outside_hypotheses());
  EXPECT_THROW(FunctionalSpec::parse("cubic"), ConfigError);
  EXPECT_THROW(FunctionalSpec::parse("sine:1"), ConfigError);
  for (const auto& f : builtins()) EXPECT_FALSE(f.describe().empty());
}

TEST(Functional, GrowthBoundOnGrid) {
  for (const auto& f : builtins()) {
    for (int i = -1000; i <= 1000; ++i) {
      const double x = i * 0.005;
      EXPECT_LE(std::abs(f.df(x)), f.growth_K() * (1.0 + std::pow(std::abs(x), f.growth_alpha())) + 1e-12)
          << f.describe() << " x=" << x;
    }
  }
}

TEST(Brownian, SingleStepAndStructure) {
  const auto g = BrownianGrid::simulate(1, 1.0, kSeed);
  ASSERT_EQ(g.levels().size(), 2u);
  EXPECT_EQ(g.levels()[0], 0.0);
  EXPECT_EQ(g.levels()[1], g.increments()[0]);
  EXPECT_EQ(g.levels()[1], CounterStream(kSeed).normal(0));
  const auto h = path(64, 1, 2.0);
  for (std::size_t j = 0; j < 64; ++j) EXPECT_EQ(h.levels()[j + 1], h.levels()[j] + h.increments()[j]);
  EXPECT_THROW(BrownianGrid::simulate(0, 1.0, kSeed), ConfigError);
}

TEST(Brownian, Covariance) {
  const std::size_t N = 100000;
  double v1 = 0.0, c = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const auto g = path(2, static_cast<std::uint32_t>(i));
    v1 += g.levels()[2] * g.levels()[2];
    c += g.levels()[1] * g.levels()[2];
  }
  EXPECT_NEAR(v1 / N, 1.0, 0.01 + 3.0 * std::sqrt(2.0 / N));
  EXPECT_NEAR(c / N, 0.5, 0.01 + 3.0 * std::sqrt(1.25 / N));
}

TEST(Integrals, TrivialIntegrands) {
  const auto g = path(1000, 3);
  for (double r : {0.25, 0.5, 1.0}) {
    const std::size_t k = g.points_before(r);
    EXPECT_NEAR(ito_integral([](double) { return 1.0; }, g, r), g.levels()[k], 1e-12);
    EXPECT_EQ(ito_integral([](double) { return 0.0; }, g, r), 0.0);
    EXPECT_NEAR(riemann_integral([](double) { return 3.0; }, g, r), 3.0 * r, 3.0 * g.dt());
    EXPECT_EQ(riemann_integral([](double) { return 0.0; }, g, r), 0.0);
  }
  EXPECT_THROW((void)ito_integral([](double) { return 1.0; }, g, 1.5), DomainError);
}

TEST(Integrals, ItoIdentityRms) {
  const std::size_t M = 10000, N = 10000;
  double sq = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const auto g = path(M, static_cast<std::uint32_t>(i));
    const double b1 = g.levels().back();
    const double e = ito_integral([](double x) { return x; }, g, 1.0) - (b1 * b1 - 1.0) / 2.0;
    sq += e * e;
  }
  EXPECT_LE(std::sqrt(sq / N), 3.0 / std::sqrt(static_cast<double>(M)));
}

TEST(Integrals, SquaredPathMean) {
  const std::size_t N = 100000;
  std::vector<double> v(N);
  for (std::size_t i = 0; i < N; ++i)
    v[i] = riemann_integral([](double x) { return x * x; }, path(200, static_cast<std::uint32_t>(i)), 1.0);
  // left-point sum has mean (1 - 1/M)/2
  EXPECT_NEAR(mean_se(v).mean, 0.5, 0.01);
}

TEST(Limit, ConstantFunctional) {
  const auto g = path(500, 9);
  const auto s = limit_functional(FunctionalSpec::constant(1.0), 3.7, 1.5, 1.0, g);
  EXPECT_EQ(s.drift, 0.0);
  EXPECT_NEAR(s.value, 1.5 * g.levels().back(), 1e-12);
  EXPECT_EQ(s.value, s.drift + s.ito);
}

TEST(Limit, IdentityPerPath) {
  const auto g = path(20000, 10);
  const auto s = limit_functional(FunctionalSpec::identity(), 0.0, 1.0, 1.0, g);
  const double b1 = g.levels().back();
  EXPECT_NEAR(s.value, (b1 * b1 - 1.0) / 2.0, 5.0 / std::sqrt(20000.0));
}

TEST(Limit, DriftMean) {
  std::vector<double> v(100000);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = limit_functional(FunctionalSpec::identity(), 1.0, 1.0, 1.0, 50,
                            kSeed.with_replication(static_cast<std::uint32_t>(i)))
               .value;
  const auto ms = mean_se(v);
  EXPECT_NEAR(ms.mean, 1.0, 3.0 * ms.se);
}

TEST(Limit, EnsembleReproducible) {
  const auto a = limit_ensemble(FunctionalSpec::logistic(1.0), 0.3, 1.2, 1.0, 100, 300, kSeed, 1);
  const auto b = limit_ensemble(FunctionalSpec::logistic(1.0), 0.3, 1.2, 1.0, 100, 300, kSeed, 4);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].value, b[i].value);
}

TEST(Limit, ItoIsometryAndZeroMean) {
  const std::size_t M = 100, N = 20000;
  const double sigma = 1.3;
  for (const auto& f : builtins()) {
    std::vector<double> ito(N), iso(N), ito_sq(N);
    for (std::size_t i = 0; i < N; ++i) {
      const auto g = path(M, static_cast<std::uint32_t>(i));
      ito[i] = limit_functional(f, 0.7, sigma, 1.0, g).ito;
      double q = 0.0;
      for (std::size_t j = 0; j < M; ++j) q += f.f(sigma * g.levels()[j]) * f.f(sigma * g.levels()[j]);
      iso[i] = sigma * sigma * q / M;
    }
    const auto m = mean_se(ito);
    EXPECT_NEAR(m.mean, 0.0, 3.0 * m.se) << f.describe();
    for (std::size_t i = 0; i < N; ++i) ito_sq[i] = (ito[i] - m.mean) * (ito[i] - m.mean);
    const auto v = mean_se(ito_sq);
    const auto w = mean_se(iso);
    EXPECT_NEAR(v.mean, w.mean, 3.0 * std::hypot(v.se, w.se)) << f.describe();
  }
}

TEST(Sde, MatchesLimitFunctional) {
  for (const auto& f : builtins()) {
    const auto g = path(1000, 21);
    const auto p = simulate_sde(f, 0.8, 1.4, g);
    for (double r : {0.3, 0.77, 1.0}) {
      const auto s = limit_functional(f, 0.8, 1.4, r, g);
      const std::size_t k = g.points_before(r);
      EXPECT_NEAR(p.x1[k], s.value, 1e-12 * std::max(1.0, std::abs(s.value))) << f.describe();
    }
    for (std::size_t j = 0; j <= 1000; ++j) EXPECT_EQ(p.x2[j], 1.4 * g.levels()[j]);
  }
}

TEST(Sde, TrivialDynamics) {
  const auto g = path(300, 5);
  const auto still = simulate_sde(FunctionalSpec::identity(), 0.0, 0.0, g);
  for (double x : still.x1) EXPECT_EQ(x, 0.0);
  const auto flat = simulate_sde(FunctionalSpec::constant(1.0), 0.4, 1.7, g);
  for (std::size_t j = 0; j <= 300; ++j) EXPECT_NEAR(flat.x1[j], 1.7 * g.levels()[j], 1e-12);
}

TEST(Sde, StrongOrderHalf) {
  auto rms = [](std::size_t M) {
    double sq = 0.0;
    const std::size_t N = 2000;
    for (std::size_t i = 0; i < N; ++i) {
      const auto g = path(M, static_cast<std::uint32_t>(i));
      const auto p = simulate_sde(FunctionalSpec::identity(), 0.0, 1.0, g);
      const double b1 = g.levels().back();
      const double e = p.x1.back() - (b1 * b1 - 1.0) / 2.0;
      sq += e * e;
    }
    return std::sqrt(sq / N);
  };
  EXPECT_LE(rms(1000), 3.0 / std::sqrt(1000.0));
  const double ratio = rms(250) / rms(1000);
  EXPECT_GT(ratio, 1.5);
  EXPECT_LT(ratio, 2.5);
}

TEST(UnitRootLimit, DeterministicStub) {
  const std::size_t M = 400;
  std::vector<double> levels(M + 1);
  for (std::size_t j = 0; j <= M; ++j) levels[j] = static_cast<double>(j) / M;
  const auto g = BrownianGrid::from_levels(levels, 1.0);
  double I = 0.0, R = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    I += levels[j] * (levels[j + 1] - levels[j]);
    R += levels[j] * levels[j] / M;
  }
  const double lambda = 0.3, sigma = 1.7;
  const auto u = unit_root_limits(lambda, sigma, g);
  EXPECT_NEAR(u.ratio, (lambda + sigma * sigma * I) / (sigma * sigma * R), 1e-10);
  EXPECT_NEAR(u.t_form, (lambda + sigma * sigma * I) / std::sqrt(R), 1e-10);
  EXPECT_THROW((void)unit_root_limits(0.0, 0.0, g), ConfigError);
}

TEST(UnitRootLimit, FrozenDickeyFullerMedian) {
  const auto u = unit_root_ensemble(0.0, 1.0, 1000, 100000, kSeed);
  std::vector<double> r;
  for (const auto& x : u) r.push_back(x.ratio);
  const EnsembleDistribution d(r);
  EXPECT_NEAR(d.median(), -0.8487, 0.04);
  EXPECT_NEAR(d.quantile(0.05), -7.99, 0.25);
}

TEST(UnitRootLimit, LargeDriftShiftsRight) {
  const auto u = unit_root_ensemble(1000.0, 1.0, 500, 5000, kSeed);
  std::vector<double> r;
  for (const auto& x : u) r.push_back(x.ratio);
  EXPECT_GT(EnsembleDistribution(r).quantile(0.01), 0.0);
}
