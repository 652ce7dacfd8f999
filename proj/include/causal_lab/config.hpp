#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "causal_lab/experiment.hpp"
#include "causal_lab/functional.hpp"
#include "causal_lab/processes.hpp"

namespace clab {

inline constexpr int kSchemaVersion = 1;

/// Values given on the command line; they win over the file.
struct FlagOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  bool override_assumptions = false;
  bool allow_exp_growth = false;
};

/// Flat `key = value` file, '#' starts a comment. The full key list with
/// defaults lives in config_keys(); README documents each one.
class RunConfig {
 public:
  struct KeyDef {
    const char* name;
    const char* fallback;  // empty: no default
    const char* doc;
  };
  static const std::vector<KeyDef>& config_keys();

  /// Throws ConfigError naming origin:line for any bad line, unknown key or bad value.
  static RunConfig parse(const std::string& text, const std::string& origin = "<config>",
                         const FlagOverrides& flags = {});
  static RunConfig load(const std::filesystem::path& path, const FlagOverrides& flags = {});

  /// Every key in schema order with its effective value; parses back to the same config.
  [[nodiscard]] std::string effective_text() const;

  // run
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string out;

  // model
  std::string model;
  std::string coefficient_family;
  std::vector<double> coefficients;
  double geometric_rate = 0.5;
  double power_decay = 2.0;
  std::size_t power_truncation = 1000;
  double tail_tolerance = 1e-10;
  double theta_pos = 0.5, theta_neg = 0.5, noise_scale = 1.0;
  double omega = 1.0, beta = 0.3;
  std::optional<std::size_t> burn_in;
  std::string innovation;
  double innovation_df = 5.0;
  double uniform_half_width = 1.7320508075688772;

  // experiments
  std::string functional;
  std::vector<std::size_t> n_grid;
  std::size_t reps = 4000;
  double r = 1.0;
  double horizon = 1.0;
  std::string oracle;
  std::optional<std::size_t> oracle_steps;
  double p_threshold = 1e-3;
  std::size_t gap_reps = 0;
  std::vector<double> b_grid;
  std::optional<double> threshold;
  bool override_assumptions = false;
  bool allow_exp_growth = false;
  std::string t_form;
  std::size_t lr_reps = 200;
  std::size_t lr_horizon = 20000;

  // dependence
  double q = 2.0;
  std::size_t lemma_n = 400;
  std::size_t lemma_reps = 4000;
  std::size_t profile_length = 16;
  std::size_t projection_outer = 400;
  std::size_t projection_inner = 200;

  // simulate / characteristics
  std::size_t n = 1000;
  std::size_t paths = 1;

 private:
  std::map<std::string, std::string> values_;
};

[[nodiscard]] ProcessModel build_model(const RunConfig& cfg);
[[nodiscard]] FunctionalSpec build_functional(const RunConfig& cfg);
[[nodiscard]] Theorem1Config theorem1_config(const RunConfig& cfg);
[[nodiscard]] UnitRootConfig unit_root_config(const RunConfig& cfg);

}  // namespace clab
