#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "causal_lab/characteristics.hpp"
#include "causal_lab/dependence.hpp"
#include "causal_lab/functional.hpp"
#include "causal_lab/limit_law.hpp"
#include "causal_lab/processes.hpp"
#include "causal_lab/stats.hpp"

namespace clab {

struct AssumptionSummary {
  bool pass = true;
  std::vector<std::string> lines;
  std::optional<Assumption1Report> a1;
  std::optional<Assumption2Report> a2;
  std::optional<Assumption3Report> a3;
};

/// Assumptions 1-3 where they are checkable (q* = min(q, 4)).
[[nodiscard]] AssumptionSummary check_assumptions(const ProcessModel& model, double q, const SeedLineage& stream);

/// Finite-sample ensemble: one path per replication, statistic from `stat`.
[[nodiscard]] std::vector<double> functional_ensemble(const ProcessModel& model, const FunctionalSpec& f,
                                                      std::size_t n, double r, std::size_t reps,
                                                      const SeedLineage& stream, unsigned workers = 1);

struct UnitRootSample {
  double scaled = 0.0;  // n (alpha_hat - 1)
  double t = 0.0;       // t_alpha
};

[[nodiscard]] std::vector<UnitRootSample> unit_root_statistics(const ProcessModel& model, std::size_t n,
                                                               std::size_t reps, const SeedLineage& stream,
                                                               unsigned workers = 1);

enum class OracleMode {
  Simulated,  // limit_functional on a Brownian grid with M steps
  Exact,      // closed form at r for identity or constant f
};

struct Theorem1Config {
  std::vector<std::size_t> n_grid{250, 1000, 4000};
  std::size_t reps = 4000;
  double r = 1.0;
  double horizon = 1.0;
  SeedLineage seed;
  unsigned workers = 1;
  OracleMode oracle = OracleMode::Simulated;
  std::optional<std::size_t> oracle_steps;  // default: matched to each n
  bool override_assumptions = false;
  std::size_t gap_reps = 0;                 // 0 disables gap diagnostics
  std::vector<double> b_grid{1.0, 2.0};
  double p_threshold = 1e-3;
  std::size_t lr_reps = 200;                // Monte Carlo long-run parameters (nonlinear models)
  std::size_t lr_horizon = 20000;
};

struct KSRow {
  std::size_t n = 0;
  std::size_t oracle_steps = 0;
  KSResult ks;            // vs the oracle at oracle_steps
  KSResult ks_reference;  // vs the fixed-resolution reference oracle
  bool refused = false;
  std::string refusal;
  double stat_mean = 0.0, stat_median = 0.0;
  double oracle_mean = 0.0, oracle_median = 0.0;
  std::size_t stat_flagged = 0, oracle_flagged = 0;
};

struct GapRow {
  std::size_t n = 0;
  std::size_t reps = 0;
  double median_jump = 0.0;
  double median_C[3] = {0.0, 0.0, 0.0};
  double median_B = 0.0;
  std::vector<double> mean_big_jump;
};

struct Theorem1Report {
  std::string model;
  std::string functional;
  LongRunParams params;
  AssumptionSummary assumptions;
  std::string banner;
  bool ran = false;
  std::vector<KSRow> rows;
  std::vector<GapRow> gaps;
  std::size_t reference_steps = 0;  // 0 for the exact oracle
  std::vector<EnsembleDistribution> stat_ensembles;
  std::vector<EnsembleDistribution> oracle_ensembles;
  bool trend_ok = false;
  bool p_ok = false;
  bool pass = false;
};

/// Finite-sample vs limit ensembles at every n. The verdict needs KS p above the threshold at
/// the largest n (oracle at M = n unless oracle_steps is set) and a smaller KS distance to the
/// reference oracle (M = oracle_steps or the largest n) at the largest n than at the smallest.
[[nodiscard]] Theorem1Report run_theorem1(const ProcessModel& model, const FunctionalSpec& f,
                                          const Theorem1Config& cfg);

/// Exact limit samples (identity or constant f) from N(0, r) draws.
[[nodiscard]] std::vector<double> exact_limit_samples(const FunctionalSpec& f, double lambda, double sigma, double r,
                                                      std::size_t reps, const SeedLineage& stream);

/// Median-based gap diagnostics over `reps` replications.
[[nodiscard]] GapRow gap_trend_row(const ProcessModel& model, const FunctionalSpec& f, double lambda, double sigma,
                                   std::size_t n, double horizon, std::size_t reps, std::span<const double> b_grid,
                                   const SeedLineage& stream, unsigned workers = 1);

struct UnitRootConfig {
  std::vector<std::size_t> n_grid{1000};
  std::size_t reps = 4000;
  SeedLineage seed;
  unsigned workers = 1;
  std::optional<std::size_t> oracle_steps;
  bool self_normalized_t = false;  // divide the t-form by sigma sqrt(gamma0)
  bool override_assumptions = false;
  double p_threshold = 1e-3;
  std::size_t lr_reps = 200;
  std::size_t lr_horizon = 20000;
};

struct UnitRootRow {
  std::size_t n = 0;
  std::size_t oracle_steps = 0;
  KSResult ks_scaled, ks_t;
  bool refused = false;
  std::string refusal;
  double scaled_median = 0.0;
  double oracle_median = 0.0;
  double null_median = 0.0;       // lambda = 0, sigma = 1 oracle
  double null_median_stderr = 0.0;
  double shift_in_stderr = 0.0;   // (scaled_median - null_median) / null_median_stderr
};

struct UnitRootReport {
  std::string model;
  LongRunParams params;
  AssumptionSummary assumptions;
  std::string banner;
  bool ran = false;
  std::vector<UnitRootRow> rows;
  std::vector<EnsembleDistribution> scaled_ensembles, t_ensembles;
  std::vector<EnsembleDistribution> oracle_ratio, oracle_t;
  bool pass = false;
};

[[nodiscard]] UnitRootReport run_unit_root(const ProcessModel& model, const UnitRootConfig& cfg);

}  // namespace clab
