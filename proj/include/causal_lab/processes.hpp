#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "causal_lab/innovations.hpp"
#include "causal_lab/rng.hpp"

namespace clab {

/// MA(infinity) coefficients stored up to index m, with an analytic bound on
/// the discarded tail sum_{i>m} |a_i| (infinity when the family is not summable).
struct CoefficientSequence {
  enum class Family { Explicit, Geometric, Power };

  Family family = Family::Explicit;
  double family_parameter = 0.0;  // rate (geometric) or decay exponent (power)
  std::vector<double> coeffs;
  double tail_bound = 0.0;

  static CoefficientSequence explicit_values(std::vector<double> values);
  /// a_i = rate^i, truncated at the first m whose tail bound is <= tolerance.
  static CoefficientSequence geometric(double rate, double tolerance = 1e-10,
                                       std::size_t max_terms = 100'000);
  /// a_i = (i+1)^(-decay), i = 0..truncation. decay <= 1 has an infinite tail.
  static CoefficientSequence power(double decay, std::size_t truncation);

  [[nodiscard]] std::size_t max_index() const noexcept { return coeffs.size() - 1; }
  [[nodiscard]] double abs_sum() const;
  [[nodiscard]] std::string describe() const;
};

struct LinearSpec {
  CoefficientSequence coefficients;
};

/// X_t = theta_pos * max(X_{t-1}, 0) + theta_neg * min(X_{t-1}, 0) + scale * eps_t
struct ThresholdArSpec {
  double theta_pos = 0.0;
  double theta_neg = 0.0;
  double scale = 1.0;
};

/// X_t = eps_t * sqrt(omega + beta * X_{t-1}^2)
struct Arch1Spec {
  double omega = 1.0;
  double beta = 0.0;
};

/// Closed-form second-order structure, populated for linear models only.
struct AnalyticMetadata {
  double total = 0.0;               // A = sum a_i
  double lambda = 0.0;              // sum_{j>=1} gamma(j)
  double sigma = 0.0;               // |A| * ||eps||_2
  std::vector<double> autocovariance;  // gamma(0..m)
};

/// Rolling state for one-step recursion of a causal process.
struct ProcessState {
  std::vector<double> recent;  // linear: eps_t, eps_{t-1}, ..., newest first
  double last_value = 0.0;     // recursive models: X_{t-1}
};

class ProcessModel {
 public:
  using Variant = std::variant<LinearSpec, ThresholdArSpec, Arch1Spec>;

  static ProcessModel linear(CoefficientSequence coefficients, InnovationDistribution innovation,
                             std::optional<std::size_t> burn_in = std::nullopt);
  static ProcessModel threshold_ar(ThresholdArSpec spec, InnovationDistribution innovation,
                                   std::optional<std::size_t> burn_in = std::nullopt);
  static ProcessModel arch1(Arch1Spec spec, InnovationDistribution innovation,
                            std::optional<std::size_t> burn_in = std::nullopt);

  [[nodiscard]] const Variant& variant() const noexcept { return variant_; }
  [[nodiscard]] const InnovationDistribution& innovation() const noexcept { return innovation_; }
  [[nodiscard]] std::size_t burn_in() const noexcept { return burn_in_; }
  [[nodiscard]] const std::optional<AnalyticMetadata>& analytic() const noexcept { return analytic_; }
  [[nodiscard]] const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  [[nodiscard]] bool is_linear() const noexcept;
  /// Throws ConfigError when the model is not linear.
  [[nodiscard]] const CoefficientSequence& coefficients() const;
  [[nodiscard]] std::string kind_name() const;
  [[nodiscard]] std::string describe() const;

  [[nodiscard]] ProcessState initial_state() const;
  /// Feeds eps_t and returns X_t.
  double step(ProcessState& state, double innovation) const;

 private:
  ProcessModel(Variant v, InnovationDistribution innovation) : variant_(std::move(v)), innovation_(innovation) {}

  Variant variant_;
  InnovationDistribution innovation_;
  std::size_t burn_in_ = 0;
  std::optional<AnalyticMetadata> analytic_;
  std::vector<std::string> warnings_;
};

/// One simulated trajectory. Innovations cover times 1-burn_in .. n.
class PathBundle {
 public:
  PathBundle() = default;
  PathBundle(SeedLineage seed, std::size_t burn_in, std::vector<double> innovations,
             std::vector<double> values, std::vector<std::string> warnings = {});

  /// Deterministic stub with zero innovations (pre-sample included); used to
  /// drive path algebra from hand-written values.
  static PathBundle from_values(std::vector<double> values);

  [[nodiscard]] const SeedLineage& seed() const noexcept { return seed_; }
  [[nodiscard]] std::size_t burn_in() const noexcept { return burn_in_; }
  [[nodiscard]] std::size_t length() const noexcept { return values_.size(); }

  /// eps_k for k in [1-burn_in, n].
  [[nodiscard]] double innovation(std::int64_t k) const;
  [[nodiscard]] std::span<const double> innovations() const noexcept { return innovations_; }
  /// X_1..X_n (0-based storage).
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  /// S_0..S_n.
  [[nodiscard]] std::span<const double> partial_sums() const noexcept { return partial_sums_; }
  [[nodiscard]] const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  SeedLineage seed_;
  std::size_t burn_in_ = 0;
  std::vector<double> innovations_;
  std::vector<double> values_;
  std::vector<double> partial_sums_;
  std::vector<std::string> warnings_;
};

/// Stationary stretch X_1..X_n after burn_in pre-sample innovations.
[[nodiscard]] PathBundle simulate_path(const ProcessModel& model, std::size_t n,
                                       const SeedLineage& stream);

/// (1/sqrt(n)) S_[ns]: the cadlag partial-sum process at time s.
[[nodiscard]] double partial_sum_path(const PathBundle& bundle, std::size_t n, double s);

/// floor(n * s) with a guard against representation error at grid points.
[[nodiscard]] std::size_t grid_floor(std::size_t n, double s);

}  // namespace clab
