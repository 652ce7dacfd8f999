#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "causal_lab/functional.hpp"
#include "causal_lab/processes.hpp"

namespace clab {

/// Closed-form conditional structure of the increments X_t given F_{t-1}.
/// X_t = location_t + scale_t * eps_t with eps_t independent of F_{t-1}.
class ConditionalMomentOracle {
 public:
  enum class Kind { Constant, StateFormula, None };

  /// Increments location + scale * eps with no state; D_t = scale * eps_t.
  static ConditionalMomentOracle iid(double location, double scale, InnovationDistribution innovation);
  /// linear -> Constant, arch1 -> StateFormula, threshold-ar -> None.
  static ConditionalMomentOracle for_model(const ProcessModel& model);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] const InnovationDistribution& innovation() const noexcept { return innovation_; }

  struct Series {
    std::vector<double> location;  // E(X_t | F_{t-1}), t = 1..n (0-based storage)
    std::vector<double> scale;
    std::vector<double> D;         // martingale increment D_t
    std::vector<double> v;         // E(D_t^2 | F_{t-1})
  };
  /// Conditional quantities along a bundle. Throws UnsupportedModelError for kind None.
  [[nodiscard]] Series series(const PathBundle& bundle) const;

 private:
  enum class Source { Iid, Linear, Arch };
  ConditionalMomentOracle(Kind kind, Source source, InnovationDistribution innovation)
      : kind_(kind), source_(source), innovation_(innovation) {}

  Kind kind_;
  Source source_;
  InnovationDistribution innovation_;
  double location_ = 0.0;
  double scale_ = 1.0;
  double a0_ = 1.0;     // linear: leading coefficient
  double total_ = 1.0;  // linear: A
  double omega_ = 0.0;  // arch1
  double beta_ = 0.0;
};

/// B_s = sum_{i<=[s]} E(eta_i|F_{i-1}), C_s = sum_{i<=[s]} E(m_i^2|F_{i-1}), indexed by [s] = 0..n.
struct DiscreteCharacteristics {
  std::vector<double> B;
  std::vector<double> C;
};

/// Increments are the bundle values eta_i = X_i.
[[nodiscard]] DiscreteCharacteristics discrete_characteristics(const PathBundle& bundle,
                                                               const ConditionalMomentOracle& oracle);

/// sum_{i<=[s]} E(g(eta_i)|F_{i-1}) for polynomial g(x) = sum_k c_k x^k, exact from innovation moments.
[[nodiscard]] std::vector<double> third_characteristic_polynomial(const PathBundle& bundle,
                                                                  std::span<const double> g_coeffs,
                                                                  const ConditionalMomentOracle& oracle);

/// Same for arbitrary g, each conditional expectation estimated from `inner` innovation draws.
[[nodiscard]] std::vector<double> third_characteristic_integral(const PathBundle& bundle,
                                                                const std::function<double(double)>& g,
                                                                const ConditionalMomentOracle& oracle,
                                                                std::size_t inner, const SeedLineage& stream);

/// Piecewise-linear path on the grid s_k = k/n, k = 0..K: value(s) = level[k] + slope[k] (s - k/n)
/// on [k/n, (k+1)/n). Step paths have zero slope.
struct GridPath {
  std::size_t n = 1;
  std::vector<double> level;
  std::vector<double> slope;

  [[nodiscard]] std::size_t last() const noexcept { return level.size() - 1; }
  [[nodiscard]] double value(double s) const;
  /// Left limit at s_{k+1} of the piece started at s_k.
  [[nodiscard]] double left_limit(std::size_t k) const;
};

[[nodiscard]] GridPath step_path(std::size_t n, std::vector<double> level);

/// sup over s in (0, stop/n] of the Euclidean norm of (a_i(s) - b_i(s))_i, exact for piecewise-linear paths.
[[nodiscard]] double sup_distance(std::span<const GridPath* const> a, std::span<const GridPath* const> b,
                                  std::size_t stop);

struct PairPaths {
  std::size_t n = 1;
  double horizon = 1.0;
  GridPath x1;  // (1/sqrt n) sum_{t=2}^{[ns]} f(S_{t-1}/sqrt n) X_t
  GridPath x2;  // S_[ns] / sqrt n
  bool flagged = false;
};

[[nodiscard]] PairPaths pair_process(const PathBundle& bundle, const FunctionalSpec& f, std::size_t n,
                                     double horizon = 1.0);

struct CharacteristicPaths {
  std::size_t n = 1;
  double horizon = 1.0;
  GridPath B1, B2, C11, C12, C22;
};

/// B_n and C_n built from D_t and E(D_t^2|F_{t-1}).
[[nodiscard]] CharacteristicPaths empirical_characteristics(const PathBundle& bundle, const FunctionalSpec& f,
                                                            std::size_t n, const ConditionalMomentOracle& oracle,
                                                            double horizon = 1.0);

/// B o X_n and C o X_n including the fractional-part terms (piecewise linear in s).
[[nodiscard]] CharacteristicPaths composed_characteristics(const PathBundle& bundle, const FunctionalSpec& f,
                                                           double lambda, double sigma, std::size_t n,
                                                           double horizon = 1.0);

struct GapReport {
  std::size_t n = 0;
  double sup_jump = 0.0;
  double sup_C_gap[3] = {0.0, 0.0, 0.0};  // 11, 12, 22
  double sup_B_gap = 0.0;
  std::vector<double> b_grid;
  std::vector<double> big_jump_mass;  // one per b
  std::size_t stop_index = 0;         // last grid index used for the suprema
  bool stopped = false;
};

/// One replication. With `threshold`, suprema run up to the first s with |X_n(s)| >= threshold.
[[nodiscard]] GapReport gap_diagnostics(const PathBundle& bundle, const FunctionalSpec& f, double lambda,
                                        double sigma, std::size_t n, double horizon,
                                        std::span<const double> b_grid, const ConditionalMomentOracle& oracle,
                                        std::optional<double> threshold = std::nullopt);

/// (2/(b^2 n^2)) [sum_{t=2}^{[nN]} f^4(S_{t-1}/sqrt n) X_t^4 + sum_{t=2}^{[nN]} X_t^4] on one path.
[[nodiscard]] double big_jump_mass(const PathBundle& bundle, const FunctionalSpec& f, std::size_t n,
                                   double horizon, double b, std::size_t stop);

}  // namespace clab
