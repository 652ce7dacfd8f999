#include "causal_lab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "causal_lab/errors.hpp"
#include "causal_lab/parallel.hpp"

namespace clab {

bool is_flagged(double x) noexcept { return !std::isfinite(x) || std::abs(x) > 1e100; }

EnsembleDistribution::EnsembleDistribution(std::vector<double> values, std::map<std::string, std::string> manifest)
    : manifest_(std::move(manifest)) {
  samples_.reserve(values.size());
  for (double v : values) {
    if (is_flagged(v))
      ++flagged_;
    else
      samples_.push_back(v);
  }
  sorted_ = samples_;
  std::sort(sorted_.begin(), sorted_.end());
}

double EnsembleDistribution::flagged_fraction() const noexcept {
  const std::size_t total = samples_.size() + flagged_;
  return total ? static_cast<double>(flagged_) / static_cast<double>(total) : 0.0;
}

double EnsembleDistribution::ecdf(double x) const {
  if (sorted_.empty()) throw ConfigError("empty ensemble");
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EnsembleDistribution::quantile(double p) const {
  if (sorted_.empty()) throw ConfigError("empty ensemble");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
  const double h = p * static_cast<double>(sorted_.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted_.size() - 1);
  return sorted_[lo] + (h - static_cast<double>(lo)) * (sorted_[hi] - sorted_[lo]);
}

double EnsembleDistribution::mean() const {
  if (samples_.empty()) throw ConfigError("empty ensemble");
  CompensatedSum s;
  for (double v : samples_) s.add(v);
  return s.value() / static_cast<double>(samples_.size());
}

double EnsembleDistribution::variance() const {
  if (samples_.size() < 2) return 0.0;
  const double m = mean();
  CompensatedSum s;
  for (double v : samples_) s.add((v - m) * (v - m));
  return s.value() / static_cast<double>(samples_.size() - 1);
}

double EnsembleDistribution::mean_stderr() const {
  return std::sqrt(variance() / static_cast<double>(samples_.size()));
}

double EnsembleDistribution::median_stderr() const {
  const double spread = quantile(0.55) - quantile(0.45);
  if (spread <= 0.0) return 0.0;
  const double density = 0.1 / spread;
  return std::sqrt(0.25 / static_cast<double>(samples_.size())) / density;
}

// ---------------------------------------------------------------------------

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 1.18) {
    // 1 - sqrt(2 pi)/x sum_{k>=1} exp(-(2k-1)^2 pi^2 / (8 x^2))
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * x * x);
    double s = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double term = std::exp(-static_cast<double>((2 * k - 1) * (2 * k - 1)) * c);
      s += term;
      if (term < 1e-17 * s) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / x * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

KSResult ks_two_sample(const EnsembleDistribution& a, const EnsembleDistribution& b) {
  if (a.count() == 0 || b.count() == 0) throw ConfigError("KS test needs two nonempty ensembles");
  if (a.flagged_fraction() > 0.01 || b.flagged_fraction() > 0.01)
    throw ComparisonRefused("more than 1% flagged replications; comparison refused");
  const auto& x = a.sorted();
  const auto& y = b.sorted();
  const std::size_t m = x.size(), n = y.size();
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < m && j < n) {
    const double v = std::min(x[i], y[j]);
    while (i < m && x[i] == v) ++i;
    while (j < n && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(m) -
                             static_cast<double>(j) / static_cast<double>(n)));
  }
  KSResult res;
  res.statistic = d;
  res.m = m;
  res.n = n;
  const double en = std::sqrt(static_cast<double>(m) * static_cast<double>(n) / static_cast<double>(m + n));
  res.p_value = kolmogorov_survival(en * d);
  return res;
}

// ---------------------------------------------------------------------------

double functional_statistic(const PathBundle& bundle, const FunctionalSpec& f, std::size_t n, double r) {
  if (n < 1) throw DomainError("functional statistic needs n >= 1");
  if (!(r > 0.0)) throw DomainError("functional statistic needs r > 0");
  const std::size_t K = grid_floor(n, r);
  if (K > bundle.length()) throw DomainError("bundle shorter than [nr]");
  const double rn = std::sqrt(static_cast<double>(n));
  const auto S = bundle.partial_sums();
  const auto x = bundle.values();
  double sum = 0.0;
  for (std::size_t t = 2; t <= K; ++t) sum += f.f(S[t - 1] / rn) * x[t - 1];
  const double v = sum / rn;
  return is_flagged(v) ? std::numeric_limits<double>::quiet_NaN() : v;
}

std::vector<double> unit_root_series(const PathBundle& bundle) {
  const auto x = bundle.values();
  std::vector<double> y(x.size() + 1, 0.0);
  for (std::size_t t = 1; t <= x.size(); ++t) y[t] = y[t - 1] + x[t - 1];
  return y;
}

OlsAlpha ols_alpha(std::span<const double> Y) {
  if (Y.size() < 2) throw DegeneratePathError("OLS needs at least one regression");
  const auto n = static_cast<double>(Y.size() - 1);
  double cross = 0.0, lag_lead = 0.0, sq = 0.0;
  for (std::size_t t = 1; t < Y.size(); ++t) {
    cross += Y[t - 1] * (Y[t] - Y[t - 1]);
    lag_lead += Y[t - 1] * Y[t];
    sq += Y[t - 1] * Y[t - 1];
  }
  if (!(sq > 0.0)) throw DegeneratePathError("sum of squared lagged levels is zero");
  OlsAlpha out;
  out.alpha_hat = lag_lead / sq;
  out.alpha_minus_one = cross / sq;
  out.scaled = (cross / n) / (sq / (n * n));
  return out;
}

double t_statistic(std::span<const double> Y, const OlsAlpha& ols) {
  if (Y.size() < 2) throw DegeneratePathError("t statistic needs at least one regression");
  const auto n = static_cast<double>(Y.size() - 1);
  // alpha_hat - 1 is O(1/n); forming it from alpha_hat would cancel most digits
  const double d = ols.alpha_minus_one;
  double sq = 0.0, resid = 0.0, level = 0.0;
  for (std::size_t t = 1; t < Y.size(); ++t) {
    const double e = (Y[t] - Y[t - 1]) - d * Y[t - 1];
    sq += Y[t - 1] * Y[t - 1];
    resid += e * e;
    level += Y[t] * Y[t];
  }
  if (!(resid > 1e-24 * level) || !(resid > 0.0)) throw DegeneratePathError("residual variance is zero");
  return std::sqrt(sq) * d / std::sqrt(resid / n);
}

JointStatistic joint_statistic(const PathBundle& bundle, std::size_t n, double r) {
  if (n < 1) throw DomainError("joint statistic needs n >= 1");
  const std::size_t K = grid_floor(n, r);
  if (K > bundle.length()) throw DomainError("bundle shorter than [nr]");
  const auto x = bundle.values();
  const auto nn = static_cast<double>(n);
  double y = 0.0, cross = 0.0, sq = 0.0;
  for (std::size_t t = 1; t <= K; ++t) {
    // Y_{t-1} X_t with Y_{t-1} = Y_t - X_t, as in ols_alpha
    const double next = y + x[t - 1];
    cross += y * (next - y);
    sq += y * y;
    y = next;
  }
  return {cross / nn, sq / (nn * nn)};
}

}  // namespace clab
