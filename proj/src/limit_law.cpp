#include "causal_lab/limit_law.hpp"

#include <algorithm>
#include <cmath>

#include "causal_lab/errors.hpp"
#include "causal_lab/parallel.hpp"

namespace clab {

namespace {

constexpr double kOverflow = 1e100;

bool bad(double x) { return !std::isfinite(x) || std::abs(x) > kOverflow; }

void check_r(const BrownianGrid& grid, double r) {
  if (r < 0.0) throw DomainError("integration limit r must be >= 0");
  if (r > grid.horizon() * (1.0 + 1e-12)) throw DomainError("integration limit r exceeds the grid horizon");
}

}  // namespace

BrownianGrid BrownianGrid::simulate(std::size_t steps, double horizon, const SeedLineage& stream) {
  if (steps < 1) throw ConfigError("Brownian grid needs M >= 1");
  if (!(horizon > 0.0)) throw ConfigError("Brownian grid needs a positive horizon");
  BrownianGrid g;
  g.horizon_ = horizon;
  const double sd = std::sqrt(horizon / static_cast<double>(steps));
  const CounterStream cs(stream);
  g.increments_.resize(steps);
  g.levels_.assign(steps + 1, 0.0);
  for (std::size_t j = 0; j < steps; ++j) {
    g.increments_[j] = sd * cs.normal(static_cast<std::int64_t>(j));
    g.levels_[j + 1] = g.levels_[j] + g.increments_[j];
  }
  return g;
}

BrownianGrid BrownianGrid::from_levels(std::vector<double> levels, double horizon) {
  if (levels.size() < 2) throw ConfigError("injected path needs at least two levels");
  if (levels.front() != 0.0) throw ConfigError("injected path must start at 0");
  if (!(horizon > 0.0)) throw ConfigError("injected path needs a positive horizon");
  BrownianGrid g;
  g.horizon_ = horizon;
  g.increments_.resize(levels.size() - 1);
  for (std::size_t j = 0; j + 1 < levels.size(); ++j) g.increments_[j] = levels[j + 1] - levels[j];
  g.levels_ = std::move(levels);
  return g;
}

std::size_t BrownianGrid::points_before(double r) const {
  const double x = r / dt();
  const auto k = static_cast<std::size_t>(std::ceil(x - 1e-9 * std::max(1.0, x)));
  return std::min(k, steps());
}

double ito_integral(const ScalarFn& f, const BrownianGrid& grid, double r) {
  check_r(grid, r);
  const std::size_t k = grid.points_before(r);
  const auto& B = grid.levels();
  const auto& dB = grid.increments();
  double sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) sum += f(B[j]) * dB[j];
  return sum;
}

double riemann_integral(const ScalarFn& g, const BrownianGrid& grid, double r) {
  check_r(grid, r);
  const std::size_t k = grid.points_before(r);
  const auto& B = grid.levels();
  const double dt = grid.dt();
  double sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) sum += g(B[j]) * dt;
  return sum;
}

LimitSample limit_functional(const FunctionalSpec& f, double lambda, double sigma, double r,
                             const BrownianGrid& grid) {
  LimitSample s;
  s.steps = grid.steps();
  s.drift = lambda * riemann_integral([&](double b) { return f.df(sigma * b); }, grid, r);
  s.ito = sigma * ito_integral([&](double b) { return f.f(sigma * b); }, grid, r);
  s.value = s.drift + s.ito;
  s.flagged = bad(s.value) || bad(s.drift) || bad(s.ito);
  return s;
}

LimitSample limit_functional(const FunctionalSpec& f, double lambda, double sigma, double r, std::size_t steps,
                             const SeedLineage& stream) {
  auto s = limit_functional(f, lambda, sigma, r, BrownianGrid::simulate(steps, std::max(1.0, r), stream));
  s.seed = stream;
  return s;
}

SdePath simulate_sde(const FunctionalSpec& f, double lambda, double sigma, const BrownianGrid& grid) {
  const std::size_t M = grid.steps();
  const double dt = grid.dt();
  const auto& B = grid.levels();
  const auto& dB = grid.increments();
  SdePath p;
  p.x1.assign(M + 1, 0.0);
  p.x2.assign(M + 1, 0.0);
  // Drift and diffusion accumulate separately so X1 matches limit_functional term for term.
  double drift = 0.0, diff = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    const double x2 = sigma * B[j];
    drift += f.df(x2) * dt;
    diff += f.f(x2) * dB[j];
    p.x1[j + 1] = lambda * drift + sigma * diff;
    p.x2[j + 1] = sigma * B[j + 1];
    if (bad(p.x1[j + 1])) {
      p.flagged = true;
      for (std::size_t k = j + 2; k <= M; ++k) {
        p.x1[k] = p.x1[j + 1];
        p.x2[k] = sigma * B[k];
      }
      break;
    }
  }
  return p;
}

UnitRootLimit unit_root_limits(double lambda, double sigma, const BrownianGrid& grid, std::optional<double> gamma0) {
  if (!(sigma > 0.0)) throw ConfigError("unit_root_limits needs sigma > 0");
  if (gamma0 && !(*gamma0 > 0.0)) throw ConfigError("unit_root_limits needs gamma0 > 0");
  UnitRootLimit u;
  const double r = std::min(1.0, grid.horizon());
  u.ito = ito_integral([](double b) { return b; }, grid, r);
  u.area = riemann_integral([](double b) { return b * b; }, grid, r);
  const double s2 = sigma * sigma;
  const double num = lambda + s2 * u.ito;
  const double den_ratio = s2 * u.area;
  const double den_t = gamma0 ? sigma * std::sqrt(*gamma0) * std::sqrt(u.area) : std::sqrt(u.area);
  if (std::abs(den_ratio) < 1e-12 || den_t < 1e-12) {
    u.flagged = true;
    return u;
  }
  u.ratio = num / den_ratio;
  u.t_form = num / den_t;
  u.flagged = bad(u.ratio) || bad(u.t_form);
  return u;
}

std::vector<LimitSample> limit_ensemble(const FunctionalSpec& f, double lambda, double sigma, double r,
                                        std::size_t steps, std::size_t reps, const SeedLineage& stream,
                                        unsigned workers) {
  std::vector<LimitSample> out(reps);
  parallel_for(reps, workers, [&](std::size_t i) {
    const auto lineage = stream.with_replication(static_cast<std::uint32_t>(i));
    out[i] = limit_functional(f, lambda, sigma, r, steps, lineage);
  });
  return out;
}

std::vector<UnitRootLimit> unit_root_ensemble(double lambda, double sigma, std::size_t steps, std::size_t reps,
                                              const SeedLineage& stream, std::optional<double> gamma0,
                                              unsigned workers) {
  std::vector<UnitRootLimit> out(reps);
  parallel_for(reps, workers, [&](std::size_t i) {
    const auto lineage = stream.with_replication(static_cast<std::uint32_t>(i));
    out[i] = unit_root_limits(lambda, sigma, BrownianGrid::simulate(steps, 1.0, lineage), gamma0);
  });
  return out;
}

}  // namespace clab
