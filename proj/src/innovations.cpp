#include "causal_lab/innovations.hpp"

#include <cmath>
#include <numbers>

#include "causal_lab/errors.hpp"
#include "causal_lab/parallel.hpp"

namespace clab {

namespace {

double normal_abs_moment(double p) {
  return std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
}

// Marsaglia-Tsang; shape >= 1.
double gamma_variate(DrawCursor& cursor, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = cursor.normal();
    const double v0 = 1.0 + c * x;
    if (v0 <= 0.0) continue;
    const double v = v0 * v0 * v0;
    const double u = cursor.uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

}  // namespace

InnovationDistribution InnovationDistribution::standard_normal() {
  return {InnovationKind::StandardNormal, 0.0};
}

InnovationDistribution InnovationDistribution::uniform_centered(double half_width) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw ConfigError("uniform-centered innovation needs a positive finite half width");
  return {InnovationKind::UniformCentered, half_width};
}

InnovationDistribution InnovationDistribution::rademacher() {
  return {InnovationKind::Rademacher, 0.0};
}

InnovationDistribution InnovationDistribution::student_t(double df) {
  if (!(df > 4.0) || !std::isfinite(df))
    throw ConfigError("student-t innovation needs df > 4 (finite fourth moment), got " +
                      std::to_string(df));
  return {InnovationKind::StudentT, df};
}

std::string InnovationDistribution::name() const {
  switch (kind_) {
    case InnovationKind::StandardNormal: return "standard-normal";
    case InnovationKind::UniformCentered: return "uniform-centered";
    case InnovationKind::Rademacher: return "rademacher";
    case InnovationKind::StudentT: return "student-t";
  }
  return "unknown";
}

double InnovationDistribution::variance() const {
  switch (kind_) {
    case InnovationKind::StandardNormal: return 1.0;
    case InnovationKind::UniformCentered: return param_ * param_ / 3.0;
    case InnovationKind::Rademacher: return 1.0;
    case InnovationKind::StudentT: return param_ / (param_ - 2.0);
  }
  return 0.0;
}

double InnovationDistribution::fourth_moment() const {
  switch (kind_) {
    case InnovationKind::StandardNormal: return 3.0;
    case InnovationKind::UniformCentered: return std::pow(param_, 4) / 5.0;
    case InnovationKind::Rademacher: return 1.0;
    case InnovationKind::StudentT:
      return 3.0 * param_ * param_ / ((param_ - 2.0) * (param_ - 4.0));
  }
  return 0.0;
}

double InnovationDistribution::abs_moment(double p) const {
  if (!(p > 0.0)) throw DomainError("moment order must be positive");
  switch (kind_) {
    case InnovationKind::StandardNormal: return normal_abs_moment(p);
    case InnovationKind::UniformCentered: return std::pow(param_, p) / (p + 1.0);
    case InnovationKind::Rademacher: return 1.0;
    case InnovationKind::StudentT: {
      if (p >= param_) throw DomainError("student-t moment of order >= df is infinite");
      const double nu = param_;
      return std::pow(nu, p / 2.0) * std::tgamma((p + 1.0) / 2.0) * std::tgamma((nu - p) / 2.0) /
             (std::sqrt(std::numbers::pi) * std::tgamma(nu / 2.0));
    }
  }
  return 0.0;
}

bool InnovationDistribution::has_closed_form_coupling() const noexcept {
  return kind_ != InnovationKind::StudentT;
}

double InnovationDistribution::coupling_norm_closed_form(double p) const {
  if (p < 1.0) throw DomainError("coupling norm needs p >= 1");
  switch (kind_) {
    case InnovationKind::StandardNormal:
      // eps - eps' ~ N(0, 2)
      return std::sqrt(2.0) * std::pow(normal_abs_moment(p), 1.0 / p);
    case InnovationKind::UniformCentered: {
      // triangular on [-2h, 2h]
      const double c = 2.0 * param_;
      return c * std::pow(2.0 / ((p + 1.0) * (p + 2.0)), 1.0 / p);
    }
    case InnovationKind::Rademacher:
      // values {-2, 0, 2} with probabilities {1/4, 1/2, 1/4}
      return 2.0 * std::pow(0.5, 1.0 / p);
    case InnovationKind::StudentT:
      break;
  }
  throw ConfigError("no closed-form coupling norm for " + name());
}

double InnovationDistribution::sample(const CounterStream& stream, std::int64_t draw) const {
  switch (kind_) {
    case InnovationKind::StandardNormal: return stream.normal(draw);
    case InnovationKind::UniformCentered: return param_ * (2.0 * stream.uniform(draw) - 1.0);
    case InnovationKind::Rademacher: return stream.sign(draw);
    case InnovationKind::StudentT: {
      const double z = stream.normal(draw);
      DrawCursor cursor(stream, draw, 2);
      const double chi2 = 2.0 * gamma_variate(cursor, param_ / 2.0);
      return z / std::sqrt(chi2 / param_);
    }
  }
  return 0.0;
}

std::vector<double> sample_innovations(const InnovationDistribution& dist, std::size_t count,
                                       const SeedLineage& lineage, std::int64_t first_index) {
  if (count < 1) throw ConfigError("sample_innovations needs count >= 1");
  const CounterStream stream(lineage);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = dist.sample(stream, first_index + static_cast<std::int64_t>(i));
  return out;
}

double coupling_constant(const InnovationDistribution& dist, double p, const SeedLineage& lineage,
                         std::size_t pairs) {
  if (p < 1.0) throw DomainError("coupling constant needs p >= 1, got " + std::to_string(p));
  if (dist.has_closed_form_coupling()) return dist.coupling_norm_closed_form(p);
  const CounterStream first(lineage.with(Purpose::Coupling, 0));
  const CounterStream second(lineage.with(Purpose::Coupling, 1));
  CompensatedSum acc;
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto d = static_cast<std::int64_t>(i);
    acc.add(std::pow(std::abs(dist.sample(first, d) - dist.sample(second, d)), p));
  }
  return std::pow(acc.value() / static_cast<double>(pairs), 1.0 / p);
}

}  // namespace clab
