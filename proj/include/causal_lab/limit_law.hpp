#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "causal_lab/functional.hpp"
#include "causal_lab/rng.hpp"

namespace clab {

/// Brownian motion sampled on t_j = j N / M, j = 0..M.
class BrownianGrid {
 public:
  /// Increments are iid normal(0, N/M) from the stream's draws 0..M-1.
  static BrownianGrid simulate(std::size_t steps, double horizon, const SeedLineage& stream);
  /// Deterministic path injection (test stubs, matched paths). levels[0] must be 0.
  static BrownianGrid from_levels(std::vector<double> levels, double horizon);

  [[nodiscard]] std::size_t steps() const noexcept { return increments_.size(); }
  [[nodiscard]] double horizon() const noexcept { return horizon_; }
  [[nodiscard]] double dt() const noexcept { return horizon_ / static_cast<double>(steps()); }
  [[nodiscard]] const std::vector<double>& increments() const noexcept { return increments_; }
  [[nodiscard]] const std::vector<double>& levels() const noexcept { return levels_; }
  /// Number of grid points t_j with t_j < r.
  [[nodiscard]] std::size_t points_before(double r) const;

 private:
  BrownianGrid() = default;
  double horizon_ = 1.0;
  std::vector<double> increments_;
  std::vector<double> levels_;
};

using ScalarFn = std::function<double(double)>;

/// Left-point sum sum_{t_j < r} f(B(t_j)) (B(t_{j+1}) - B(t_j)).
[[nodiscard]] double ito_integral(const ScalarFn& f, const BrownianGrid& grid, double r);
/// Left-point sum sum_{t_j < r} g(B(t_j)) dt.
[[nodiscard]] double riemann_integral(const ScalarFn& g, const BrownianGrid& grid, double r);

struct LimitSample {
  double value = 0.0;
  double drift = 0.0;  // lambda int_0^r f'(sigma B) dv
  double ito = 0.0;    // sigma int_0^r f(sigma B) dB
  std::size_t steps = 0;
  SeedLineage seed;
  bool flagged = false;
};

/// Right side of the functional limit, evaluated with the limit of the
/// normalized partial sums, sigma B, inside f and f'.
[[nodiscard]] LimitSample limit_functional(const FunctionalSpec& f, double lambda, double sigma, double r,
                                           const BrownianGrid& grid);
[[nodiscard]] LimitSample limit_functional(const FunctionalSpec& f, double lambda, double sigma, double r,
                                           std::size_t steps, const SeedLineage& stream);

struct SdePath {
  std::vector<double> x1;  // X^1(t_j)
  std::vector<double> x2;  // X^2(t_j) = sigma B(t_j)
  bool flagged = false;
};

/// Euler-Maruyama for dX1 = lambda f'(X2) dt + f(X2) dX2, X2 = sigma B, on the grid's increments.
[[nodiscard]] SdePath simulate_sde(const FunctionalSpec& f, double lambda, double sigma, const BrownianGrid& grid);

struct UnitRootLimit {
  double ratio = 0.0;   // (lambda + sigma^2 I) / (sigma^2 R)
  double t_form = 0.0;  // (lambda + sigma^2 I) / sqrt(R), or / (sigma sqrt(gamma0) sqrt(R))
  double ito = 0.0;     // I = int_0^1 B dB
  double area = 0.0;    // R = int_0^1 B^2 dv
  bool flagged = false;
};

/// gamma0: short-run variance of X; when given, the t-form uses the self-normalized denominator.
[[nodiscard]] UnitRootLimit unit_root_limits(double lambda, double sigma, const BrownianGrid& grid,
                                             std::optional<double> gamma0 = std::nullopt);

/// Ensembles over replications 0..reps-1 of `stream`; the caller picks the substream.
[[nodiscard]] std::vector<LimitSample> limit_ensemble(const FunctionalSpec& f, double lambda, double sigma,
                                                      double r, std::size_t steps, std::size_t reps,
                                                      const SeedLineage& stream, unsigned workers = 1);
[[nodiscard]] std::vector<UnitRootLimit> unit_root_ensemble(double lambda, double sigma, std::size_t steps,
                                                            std::size_t reps, const SeedLineage& stream,
                                                            std::optional<double> gamma0 = std::nullopt,
                                                            unsigned workers = 1);

}  // namespace clab
