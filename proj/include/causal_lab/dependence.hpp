#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "causal_lab/processes.hpp"

namespace clab {

/// Beveridge-Nelson split of a coefficient sequence:
/// U_n = A eps_n + epst_{n-1} - epst_n with epst_n = sum_i tilde_i eps_{n-i}.
struct BNDecomposition {
  double total = 0.0;          // A = sum a_i
  std::vector<double> tilde;   // tilde_i = sum_{k>i} a_k, i = 0..m (tilde_m = 0)
};

[[nodiscard]] BNDecomposition bn_decompose(std::span<const double> coeffs);

/// epst_k = sum_i tilde_i eps_{k-i}, using the bundle's innovations (zero before the pre-sample).
[[nodiscard]] double tilde_innovation(const BNDecomposition& bn, const PathBundle& bundle, std::int64_t k);

/// theta_{n,p}, its tail sums Theta_{m,p} and partial sums Lambda_{n,p}.
/// `tail` bounds sum_{i > last stored n} theta_i.
struct DependenceProfile {
  double p = 2.0;
  std::vector<double> theta;
  std::vector<double> Theta;   // Theta[m] = sum_{i>=m} theta_i + tail
  std::vector<double> Lambda;  // Lambda[n] = sum_{i<=n} theta_i
  double tail = 0.0;

  static DependenceProfile from_theta(std::vector<double> theta, double p, double tail);
  /// Theta_{m,p} for any m, including m beyond the stored range (tail only).
  [[nodiscard]] double Theta_at(std::size_t m) const;
};

/// theta_{n,p} = c0 |a_n| with c0 = ||eps_0 - eps_0'||_p.
[[nodiscard]] std::vector<double> projection_norm_linear(std::span<const double> coeffs, double p,
                                                         const InnovationDistribution& innovation,
                                                         const SeedLineage& stream = {});

/// Analytic profile for a linear model (p-norm coupling constant times |a_n|).
[[nodiscard]] DependenceProfile linear_profile(const ProcessModel& model, double p,
                                               const SeedLineage& stream = {});

struct ProjectionEstimate {
  double theta = 0.0;
  double stderr_ = 0.0;
  double inner_bias = 0.0;    // J^{-1/2} * (pooled inner sample std)
  bool bias_flagged = false;  // inner_bias > theta / 3
  std::size_t outer = 0;
  std::size_t inner = 0;
};

/// Nested Monte Carlo estimate of ||E(X_n | F_0) - E(X_n | F_0*)||_p where
/// F_0* replaces eps_0 with an independent copy. For linear models this is
/// c0 |a_n|, the closed form used by projection_norm_linear.
[[nodiscard]] ProjectionEstimate projection_norm_mc(const ProcessModel& model, std::size_t n, double p,
                                                    std::size_t outer, std::size_t inner,
                                                    const SeedLineage& stream, unsigned workers = 1);

/// D_k, M_k, R_k of the martingale approximation for a linear bundle.
struct MartingaleApproximant {
  std::vector<double> D;  // D_1..D_n (0-based)
  std::vector<double> M;  // M_0..M_n
  std::vector<double> R;  // R_0..R_n
};

[[nodiscard]] MartingaleApproximant martingale_approximant_linear(const PathBundle& bundle,
                                                                  const ProcessModel& model,
                                                                  const BNDecomposition& bn);

enum class Provenance { Analytic, MonteCarlo };

struct LongRunParams {
  double lambda = 0.0;
  double sigma = 0.0;
  double gamma0 = 0.0;
  Provenance provenance = Provenance::Analytic;
  double lambda_stderr = 0.0;
  double sigma_stderr = 0.0;
  bool summable = true;
  std::string note;
};

/// Analytic for linear and arch1 models; Monte Carlo over `reps` paths of length `horizon` otherwise.
[[nodiscard]] LongRunParams long_run_params(const ProcessModel& model, std::size_t reps,
                                            std::size_t horizon, const SeedLineage& stream,
                                            unsigned workers = 1);

struct Assumption1Report {
  double q = 4.0;
  double q_star = 4.0;
  std::vector<std::size_t> n_grid;
  std::vector<double> Theta;       // Theta_{n,q*} on the grid
  std::vector<double> normalized;  // Theta_{n,q*} * n^{1/2-1/q*} * log n
  double sup = 0.0;
  bool pass = false;
  std::string reason;
};

/// Rate diagnostic: the normalized tail must stay bounded (plateau or decay).
/// The profile must be computed with p = min(q, 4).
[[nodiscard]] Assumption1Report assumption1_check(const DependenceProfile& profile, double q);

struct Assumption2Report {
  bool checked = false;
  double ratio = 0.0;  // geometric decay rate of ||E(D_k^2|F_0) - sigma^2||
  double sum = 0.0;
  bool pass = false;
  std::string reason;
};

/// Closed-form conditional variance models only (linear, arch1).
[[nodiscard]] Assumption2Report assumption2_check(const ProcessModel& model, double q,
                                                  const SeedLineage& stream);

struct Assumption3Report {
  double value = 0.0;
  double tail_bound = 0.0;
  bool pass = false;
  std::string reason;
};

/// sum_r sum_k sum_{j>k} |a_j| |tilde_{j+r}|, evaluated in O(m) as sum_j j |a_j| U_j.
[[nodiscard]] Assumption3Report assumption3_bound_linear(const CoefficientSequence& coeffs);

struct Lemma1Report {
  double q = 2.0;
  std::size_t n = 0;
  double lhs = 0.0;  // ||max_{k<=n} |S_k| ||_q
  double lhs_stderr = 0.0;
  double rhs = 0.0;  // q B_q / (q-1) * n^{1/q'} * Theta_{0,q}
  double Theta0 = 0.0;
  bool holds = false;  // lhs <= rhs + 3 stderr
};

/// B_q = 18 q^{3/2} (q-1)^{-1/2}, or 1 at q = 2.
[[nodiscard]] double burkholder_constant(double q);

/// Inequality check from precomputed per-replication maxima max_{k<=n}|S_k|.
[[nodiscard]] Lemma1Report lemma1_from_maxima(std::span<const double> maxima, double q, std::size_t n,
                                              double Theta0);

/// Monte Carlo check. Theta_{0,q} comes from `profile` or, for linear models, the analytic profile.
[[nodiscard]] Lemma1Report lemma1_inequality_check(const ProcessModel& model, double q, std::size_t n,
                                                   std::size_t reps, const SeedLineage& stream,
                                                   const std::optional<DependenceProfile>& profile = std::nullopt,
                                                   unsigned workers = 1);

/// max_{k<=n} |S_k| over one replication per index.
[[nodiscard]] std::vector<double> max_partial_sums(const ProcessModel& model, std::size_t n,
                                                   std::size_t reps, const SeedLineage& stream,
                                                   unsigned workers = 1);

}  // namespace clab
