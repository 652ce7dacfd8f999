#include "causal_lab/processes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "causal_lab/errors.hpp"
#include "causal_lab/parallel.hpp"

namespace clab {

namespace {

constexpr double kTailTolerance = 1e-10;
constexpr std::size_t kRecursiveBurnIn = 1000;
constexpr std::size_t kMaxStoredLags = 4096;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

void check_finite_coefficients(const std::vector<double>& coeffs) {
  if (coeffs.empty()) throw ConfigError("linear model needs at least one coefficient");
  for (double a : coeffs)
    if (!std::isfinite(a)) throw ConfigError("linear coefficients must be finite");
}

}  // namespace

// ---------------------------------------------------------------------------
// CoefficientSequence

CoefficientSequence CoefficientSequence::explicit_values(std::vector<double> values) {
  check_finite_coefficients(values);
  CoefficientSequence seq;
  seq.family = Family::Explicit;
  seq.coeffs = std::move(values);
  seq.tail_bound = 0.0;
  return seq;
}

CoefficientSequence CoefficientSequence::geometric(double rate, double tolerance,
                                                   std::size_t max_terms) {
  if (!(std::abs(rate) < 1.0)) throw ConfigError("geometric coefficients need |rate| < 1");
  if (!(tolerance > 0.0)) throw ConfigError("tail tolerance must be positive");
  CoefficientSequence seq;
  seq.family = Family::Geometric;
  seq.family_parameter = rate;
  const double r = std::abs(rate);
  double a = 1.0;
  for (std::size_t i = 0; i < max_terms; ++i) {
    seq.coeffs.push_back(a);
    // sum_{k>i} |rate|^k = |rate|^{i+1} / (1 - |rate|)
    seq.tail_bound = std::pow(r, static_cast<double>(i + 1)) / (1.0 - r);
    if (seq.tail_bound <= tolerance) break;
    a *= rate;
  }
  return seq;
}

CoefficientSequence CoefficientSequence::power(double decay, std::size_t truncation) {
  if (!(decay > 0.0)) throw ConfigError("power coefficients need decay > 0");
  CoefficientSequence seq;
  seq.family = Family::Power;
  seq.family_parameter = decay;
  seq.coeffs.resize(truncation + 1);
  for (std::size_t i = 0; i <= truncation; ++i)
    seq.coeffs[i] = std::pow(static_cast<double>(i + 1), -decay);
  // sum_{i>m} (i+1)^-d <= int_{m+1}^inf x^-d dx
  const double m1 = static_cast<double>(truncation + 1);
  seq.tail_bound = decay > 1.0 ? std::pow(m1, 1.0 - decay) / (decay - 1.0)
                               : std::numeric_limits<double>::infinity();
  return seq;
}

double CoefficientSequence::abs_sum() const {
  CompensatedSum s;
  for (double a : coeffs) s.add(std::abs(a));
  return s.value();
}

std::string CoefficientSequence::describe() const {
  switch (family) {
    case Family::Explicit: {
      std::string out = "explicit(";
      for (std::size_t i = 0; i < coeffs.size() && i < 8; ++i) out += (i ? "," : "") + fmt(coeffs[i]);
      if (coeffs.size() > 8) out += ",...";
      return out + ")";
    }
    case Family::Geometric: return "geometric(rate=" + fmt(family_parameter) + ")";
    case Family::Power:
      return "power(decay=" + fmt(family_parameter) + ",m=" + std::to_string(max_index()) + ")";
  }
  return "linear";
}

// ---------------------------------------------------------------------------
// ProcessModel

ProcessModel ProcessModel::linear(CoefficientSequence coefficients, InnovationDistribution innovation,
                                  std::optional<std::size_t> burn_in) {
  check_finite_coefficients(coefficients.coeffs);
  const std::size_t m = coefficients.max_index();
  ProcessModel model(LinearSpec{coefficients}, innovation);
  model.burn_in_ = burn_in.value_or(m);
  if (model.burn_in_ < m)
    model.warnings_.push_back("burn_in " + std::to_string(model.burn_in_) +
                              " is shorter than the coefficient window " + std::to_string(m) +
                              "; earliest values use zero pre-sample innovations");
  if (!(coefficients.tail_bound <= kTailTolerance))
    model.warnings_.push_back("truncated coefficient tail bound " + fmt(coefficients.tail_bound) +
                              " exceeds tolerance " + fmt(kTailTolerance));

  const auto& a = coefficients.coeffs;
  const double var = innovation.variance();
  AnalyticMetadata meta;
  CompensatedSum total, squares;
  for (double ai : a) {
    total.add(ai);
    squares.add(ai * ai);
  }
  meta.total = total.value();
  // sum_{j>=1} sum_i a_i a_{i+j} = (A^2 - sum a_i^2) / 2
  meta.lambda = var * (meta.total * meta.total - squares.value()) / 2.0;
  meta.sigma = std::abs(meta.total) * std::sqrt(var);
  const std::size_t lags = std::min(m, kMaxStoredLags);
  meta.autocovariance.resize(lags + 1);
  for (std::size_t j = 0; j <= lags; ++j) {
    CompensatedSum g;
    for (std::size_t i = 0; i + j <= m; ++i) g.add(a[i] * a[i + j]);
    meta.autocovariance[j] = var * g.value();
  }
  model.analytic_ = std::move(meta);
  return model;
}

ProcessModel ProcessModel::threshold_ar(ThresholdArSpec spec, InnovationDistribution innovation,
                                        std::optional<std::size_t> burn_in) {
  if (!(std::abs(spec.theta_pos) < 1.0) || !(std::abs(spec.theta_neg) < 1.0))
    throw ConfigError("threshold-ar needs |theta_pos| < 1 and |theta_neg| < 1");
  if (!(spec.scale > 0.0) || !std::isfinite(spec.scale))
    throw ConfigError("threshold-ar needs a positive noise scale");
  ProcessModel model(spec, innovation);
  model.burn_in_ = burn_in.value_or(kRecursiveBurnIn);
  const double rho = std::max(std::abs(spec.theta_pos), std::abs(spec.theta_neg));
  if (std::pow(rho, static_cast<double>(model.burn_in_)) > kTailTolerance)
    model.warnings_.push_back("burn_in " + std::to_string(model.burn_in_) +
                              " leaves contraction residue above tolerance");
  return model;
}

ProcessModel ProcessModel::arch1(Arch1Spec spec, InnovationDistribution innovation,
                                 std::optional<std::size_t> burn_in) {
  if (!(spec.omega > 0.0)) throw ConfigError("arch1 needs omega > 0");
  if (!(spec.beta >= 0.0)) throw ConfigError("arch1 needs beta >= 0");
  const double rho = spec.beta * innovation.variance();
  if (!(rho < 1.0)) throw ConfigError("arch1 needs beta * E[eps^2] < 1");
  ProcessModel model(spec, innovation);
  model.burn_in_ = burn_in.value_or(kRecursiveBurnIn);
  if (std::pow(rho, static_cast<double>(model.burn_in_)) > kTailTolerance)
    model.warnings_.push_back("burn_in " + std::to_string(model.burn_in_) +
                              " leaves contraction residue above tolerance");
  return model;
}

bool ProcessModel::is_linear() const noexcept { return std::holds_alternative<LinearSpec>(variant_); }

const CoefficientSequence& ProcessModel::coefficients() const {
  if (const auto* lin = std::get_if<LinearSpec>(&variant_)) return lin->coefficients;
  throw ConfigError("model '" + kind_name() + "' has no linear coefficients");
}

std::string ProcessModel::kind_name() const {
  return std::visit(
      [](const auto& spec) -> std::string {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, LinearSpec>) return "linear";
        else if constexpr (std::is_same_v<T, ThresholdArSpec>) return "threshold-ar";
        else return "arch1";
      },
      variant_);
}

std::string ProcessModel::describe() const {
  std::string body = std::visit(
      [](const auto& spec) -> std::string {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, LinearSpec>) {
          return "linear " + spec.coefficients.describe();
        } else if constexpr (std::is_same_v<T, ThresholdArSpec>) {
          return "threshold-ar(theta_pos=" + fmt(spec.theta_pos) + ",theta_neg=" +
                 fmt(spec.theta_neg) + ",scale=" + fmt(spec.scale) + ")";
        } else {
          return "arch1(omega=" + fmt(spec.omega) + ",beta=" + fmt(spec.beta) + ")";
        }
      },
      variant_);
  return body + " innovation=" + innovation_.name();
}

ProcessState ProcessModel::initial_state() const {
  ProcessState state;
  if (const auto* lin = std::get_if<LinearSpec>(&variant_))
    state.recent.assign(lin->coefficients.coeffs.size(), 0.0);
  return state;
}

double ProcessModel::step(ProcessState& state, double eps) const {
  return std::visit(
      [&](const auto& spec) -> double {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, LinearSpec>) {
          auto& recent = state.recent;
          std::rotate(recent.rbegin(), recent.rbegin() + 1, recent.rend());
          recent.front() = eps;
          const auto& a = spec.coefficients.coeffs;
          double x = 0.0;
          for (std::size_t i = 0; i < a.size(); ++i) x += a[i] * recent[i];
          state.last_value = x;
          return x;
        } else if constexpr (std::is_same_v<T, ThresholdArSpec>) {
          const double prev = state.last_value;
          const double x = (prev > 0.0 ? spec.theta_pos : spec.theta_neg) * prev + spec.scale * eps;
          state.last_value = x;
          return x;
        } else {
          const double prev = state.last_value;
          const double x = eps * std::sqrt(spec.omega + spec.beta * prev * prev);
          state.last_value = x;
          return x;
        }
      },
      variant_);
}

// ---------------------------------------------------------------------------
// PathBundle

PathBundle::PathBundle(SeedLineage seed, std::size_t burn_in, std::vector<double> innovations,
                       std::vector<double> values, std::vector<std::string> warnings)
    : seed_(seed),
      burn_in_(burn_in),
      innovations_(std::move(innovations)),
      values_(std::move(values)),
      warnings_(std::move(warnings)) {
  if (innovations_.size() != burn_in_ + values_.size())
    throw ConfigError("path bundle needs burn_in + n innovations");
  partial_sums_.resize(values_.size() + 1);
  partial_sums_[0] = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) partial_sums_[k + 1] = partial_sums_[k] + values_[k];
}

PathBundle PathBundle::from_values(std::vector<double> values) {
  std::vector<double> eps(values.size(), 0.0);
  return PathBundle(SeedLineage{}, 0, std::move(eps), std::move(values));
}

double PathBundle::innovation(std::int64_t k) const {
  const std::int64_t idx = k + static_cast<std::int64_t>(burn_in_) - 1;
  if (idx < 0 || idx >= static_cast<std::int64_t>(innovations_.size()))
    throw DomainError("innovation index " + std::to_string(k) + " outside stored range");
  return innovations_[static_cast<std::size_t>(idx)];
}

// ---------------------------------------------------------------------------

PathBundle simulate_path(const ProcessModel& model, std::size_t n, const SeedLineage& stream) {
  if (n < 1) throw ConfigError("simulate_path needs n >= 1");
  const std::size_t burn = model.burn_in();
  const auto first = 1 - static_cast<std::int64_t>(burn);
  std::vector<double> eps = sample_innovations(model.innovation(), burn + n, stream, first);
  std::vector<double> values(n);

  if (model.is_linear()) {
    // X_k = sum_{i=0}^m a_i eps_{k-i}; innovations before the pre-sample are zero.
    const auto& a = model.coefficients().coeffs;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t pos = burn + k;  // index of eps_{k+1}
      double x = 0.0;
      for (std::size_t i = 0; i < a.size() && i <= pos; ++i) x += a[i] * eps[pos - i];
      values[k] = x;
    }
  } else {
    ProcessState state = model.initial_state();
    for (std::size_t j = 0; j < burn; ++j) model.step(state, eps[j]);
    for (std::size_t k = 0; k < n; ++k) values[k] = model.step(state, eps[burn + k]);
  }
  return PathBundle(stream, burn, std::move(eps), std::move(values), model.warnings());
}

std::size_t grid_floor(std::size_t n, double s) {
  const double ns = static_cast<double>(n) * s;
  return static_cast<std::size_t>(std::floor(ns + 1e-9 * std::max(1.0, ns)));
}

double partial_sum_path(const PathBundle& bundle, std::size_t n, double s) {
  if (s < 0.0) throw DomainError("partial_sum_path needs s >= 0");
  if (n < 1) throw DomainError("partial_sum_path needs n >= 1");
  const std::size_t k = grid_floor(n, s);
  if (k > bundle.length())
    throw DomainError("partial_sum_path: [ns] = " + std::to_string(k) + " exceeds bundle length " +
                      std::to_string(bundle.length()));
  return bundle.partial_sums()[k] / std::sqrt(static_cast<double>(n));
}

}  // namespace clab
