#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "causal_lab/functional.hpp"
#include "causal_lab/processes.hpp"

namespace clab {

/// Non-finite values or |x| > 1e100 mark an overflowed replication.
[[nodiscard]] bool is_flagged(double x) noexcept;

/// Replicated scalar statistic. Flagged values are dropped and counted.
class EnsembleDistribution {
 public:
  EnsembleDistribution() = default;
  explicit EnsembleDistribution(std::vector<double> values, std::map<std::string, std::string> manifest = {});

  [[nodiscard]] const std::vector<double>& samples() const noexcept { return samples_; }
  [[nodiscard]] const std::vector<double>& sorted() const noexcept { return sorted_; }
  [[nodiscard]] std::size_t count() const noexcept { return samples_.size(); }
  [[nodiscard]] std::size_t flagged() const noexcept { return flagged_; }
  [[nodiscard]] double flagged_fraction() const noexcept;
  [[nodiscard]] const std::map<std::string, std::string>& manifest() const noexcept { return manifest_; }

  /// Right-continuous empirical CDF.
  [[nodiscard]] double ecdf(double x) const;
  /// Type-7 (linear interpolation) quantile.
  [[nodiscard]] double quantile(double p) const;
  [[nodiscard]] double median() const { return quantile(0.5); }
  [[nodiscard]] double mean() const;
  [[nodiscard]] double variance() const;
  [[nodiscard]] double mean_stderr() const;
  /// sqrt(1/(4m)) / density at the median, density from the central 10% quantile spread.
  [[nodiscard]] double median_stderr() const;

 private:
  std::vector<double> samples_;
  std::vector<double> sorted_;
  std::size_t flagged_ = 0;
  std::map<std::string, std::string> manifest_;
};

struct KSResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t m = 0;
  std::size_t n = 0;
};

/// Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
[[nodiscard]] double kolmogorov_survival(double x);

/// Throws ComparisonRefused when either ensemble has more than 1% flagged replications.
[[nodiscard]] KSResult ks_two_sample(const EnsembleDistribution& a, const EnsembleDistribution& b);

/// (1/sqrt n) sum_{t=2}^{[nr]} f(S_{t-1}/sqrt n) X_t; NaN when f overflows.
[[nodiscard]] double functional_statistic(const PathBundle& bundle, const FunctionalSpec& f, std::size_t n,
                                          double r);

/// Y_0 = 0, Y_t = Y_{t-1} + X_t.
[[nodiscard]] std::vector<double> unit_root_series(const PathBundle& bundle);

struct OlsAlpha {
  double alpha_hat = 0.0;
  double alpha_minus_one = 0.0;  // sum Y_{t-1} X_t / sum Y_{t-1}^2, without cancellation
  double scaled = 0.0;  // n (alpha_hat - 1) = sum Y_{t-1} X_t / ((1/n) sum Y_{t-1}^2)
};

/// Y holds Y_0..Y_n; n is the number of regressions.
[[nodiscard]] OlsAlpha ols_alpha(std::span<const double> Y);

/// (sum Y_{t-1}^2)^{1/2} (alpha_hat - 1) / sqrt((1/n) sum (Y_t - alpha_hat Y_{t-1})^2).
[[nodiscard]] double t_statistic(std::span<const double> Y, const OlsAlpha& ols);

struct JointStatistic {
  double cross = 0.0;   // (1/n) sum_{t=1}^{[nr]} Y_{t-1} X_t
  double square = 0.0;  // (1/n^2) sum_{t=1}^{[nr]} Y_{t-1}^2
};

[[nodiscard]] JointStatistic joint_statistic(const PathBundle& bundle, std::size_t n, double r);

}  // namespace clab
