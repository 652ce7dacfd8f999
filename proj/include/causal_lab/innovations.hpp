#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "causal_lab/rng.hpp"

namespace clab {

enum class InnovationKind { StandardNormal, UniformCentered, Rademacher, StudentT };

/// Law of the iid driving noise. Always mean zero with finite fourth moment.
class InnovationDistribution {
 public:
  static InnovationDistribution standard_normal();
  /// Uniform on [-half_width, half_width]; the default has unit variance.
  static InnovationDistribution uniform_centered(double half_width = 1.7320508075688772);
  static InnovationDistribution rademacher();
  /// Unscaled Student t. Requires df > 4.
  static InnovationDistribution student_t(double df);

  [[nodiscard]] InnovationKind kind() const noexcept { return kind_; }
  [[nodiscard]] double parameter() const noexcept { return param_; }
  [[nodiscard]] std::string name() const;

  [[nodiscard]] double mean() const noexcept { return 0.0; }
  [[nodiscard]] double variance() const;
  [[nodiscard]] double fourth_moment() const;
  /// E|eps|^p in closed form; p must be below df for Student t.
  [[nodiscard]] double abs_moment(double p) const;
  /// ||eps||_p = (E|eps|^p)^(1/p).
  [[nodiscard]] double norm(double p) const { return std::pow(abs_moment(p), 1.0 / p); }

  /// Closed form of ||eps - eps'||_p for an independent copy eps', when known.
  [[nodiscard]] bool has_closed_form_coupling() const noexcept;
  [[nodiscard]] double coupling_norm_closed_form(double p) const;

  /// One draw, a pure function of (stream, draw index).
  [[nodiscard]] double sample(const CounterStream& stream, std::int64_t draw) const;

 private:
  InnovationDistribution(InnovationKind kind, double param) : kind_(kind), param_(param) {}

  InnovationKind kind_;
  double param_;  // half width (uniform) or degrees of freedom (Student t)
};

/// `count` iid draws with draw indices first_index, first_index+1, ...
[[nodiscard]] std::vector<double> sample_innovations(const InnovationDistribution& dist,
                                                     std::size_t count,
                                                     const SeedLineage& stream,
                                                     std::int64_t first_index = 0);

/// ||eps - eps'||_p: closed form where available, otherwise Monte Carlo over `pairs` pairs.
[[nodiscard]] double coupling_constant(const InnovationDistribution& dist, double p,
                                       const SeedLineage& stream, std::size_t pairs = 1'000'000);

}  // namespace clab
