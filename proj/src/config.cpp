#include "causal_lab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "causal_lab/errors.hpp"

namespace clab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

// Converts raw strings, remembering where each key came from for error messages.
class Reader {
 public:
  Reader(const std::map<std::string, std::string>& values, const std::map<std::string, std::string>& where)
      : values_(values), where_(where) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(where_.at(key) + ": key '" + key + "': " + what);
  }

  const std::string& raw(const std::string& key) const { return values_.at(key); }

  double real(const std::string& key) const {
    const auto& s = raw(key);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
      fail(key, "expected a real number, got '" + s + "'");
    return v;
  }

  std::uint64_t u64(const std::string& key, const std::string& s) const {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
      fail(key, "expected a non-negative integer, got '" + s + "'");
    return v;
  }
  std::uint64_t u64(const std::string& key) const { return u64(key, raw(key)); }

  std::size_t count(const std::string& key, std::size_t min) const {
    const auto v = u64(key);
    if (v < min) fail(key, "must be >= " + std::to_string(min));
    return static_cast<std::size_t>(v);
  }

  std::optional<std::size_t> opt_count(const std::string& key, std::size_t min) const {
    if (raw(key).empty()) return std::nullopt;
    return count(key, min);
  }

  bool flag(const std::string& key) const {
    const auto& s = raw(key);
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    fail(key, "expected true or false, got '" + s + "'");
  }

  std::string choice(const std::string& key, std::initializer_list<const char*> allowed) const {
    const auto& s = raw(key);
    std::string list;
    for (const char* a : allowed) {
      if (s == a) return s;
      list += (list.empty() ? "" : ", ") + std::string(a);
    }
    fail(key, "expected one of " + list + ", got '" + s + "'");
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split_list(raw(key))) {
      double v = 0.0;
      const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
      if (res.ec != std::errc() || res.ptr != item.data() + item.size() || !std::isfinite(v))
        fail(key, "bad list entry '" + item + "'");
      out.push_back(v);
    }
    if (out.empty()) fail(key, "list is empty");
    return out;
  }

  std::vector<std::size_t> counts(const std::string& key) const {
    std::vector<std::size_t> out;
    for (const auto& item : split_list(raw(key))) out.push_back(static_cast<std::size_t>(u64(key, item)));
    if (out.empty()) fail(key, "list is empty");
    return out;
  }

 private:
  const std::map<std::string, std::string>& values_;
  const std::map<std::string, std::string>& where_;
};

}  // namespace

const std::vector<RunConfig::KeyDef>& RunConfig::config_keys() {
  static const std::vector<KeyDef> keys = {
      {"schema_version", "", "must be 1"},
      {"seed", "", "master seed (u64); required here or via --seed"},
      {"workers", "1", "worker threads; results do not depend on it"},
      {"out", "out", "artifact directory"},
      {"model", "linear", "linear | tar | arch1"},
      {"coefficient_family", "explicit", "explicit | geometric | power | harmonic"},
      {"coefficients", "1", "explicit a_0,a_1,..."},
      {"geometric_rate", "0.5", "a_i = rate^i"},
      {"power_decay", "2", "a_i = (i+1)^-decay"},
      {"power_truncation", "1000", "last stored index for power/harmonic"},
      {"tail_tolerance", "1e-10", "geometric truncation tolerance"},
      {"theta_pos", "0.5", "tar slope above 0"},
      {"theta_neg", "0.5", "tar slope below 0"},
      {"noise_scale", "1", "tar innovation scale"},
      {"omega", "1", "arch1 intercept"},
      {"beta", "0.3", "arch1 slope"},
      {"burn_in", "", "pre-sample length (empty: model default)"},
      {"innovation", "normal", "normal | uniform | rademacher | student_t"},
      {"innovation_df", "5", "student_t degrees of freedom (> 4)"},
      {"uniform_half_width", "1.7320508075688772", "uniform on [-w, w]"},
      {"functional", "identity", "identity | constant:c | polynomial:c0,c1,.. | sine:amp,freq | logistic:s | exp:rate"},
      {"n_grid", "250,1000,4000", "sample sizes, strictly increasing"},
      {"reps", "4000", "replications per ensemble (>= 100)"},
      {"r", "1", "time point of the functional"},
      {"horizon", "1", "horizon N of the path processes"},
      {"oracle", "simulated", "simulated | exact (identity or constant f)"},
      {"oracle_steps", "", "Brownian grid size M (empty: M = n)"},
      {"p_threshold", "0.001", "KS p-value needed at the largest n"},
      {"gap_reps", "0", "replications for gap diagnostics (0: off)"},
      {"b_grid", "1,2", "truncation levels b of the big-jump bound"},
      {"threshold", "", "stop paths when |X_n| reaches this (characteristics)"},
      {"override_assumptions", "false", "run even when assumption checks fail"},
      {"allow_exp_growth", "false", "permit exp:rate functionals"},
      {"t_form", "printed", "printed | self-normalized"},
      {"lr_reps", "200", "paths for Monte Carlo long-run parameters"},
      {"lr_horizon", "20000", "path length for Monte Carlo long-run parameters"},
      {"q", "2", "moment order (> 1)"},
      {"lemma_n", "400", "n of the maximal inequality check"},
      {"lemma_reps", "4000", "replications of the maximal inequality check"},
      {"profile_length", "16", "Monte Carlo projection norms for n = 0..this (nonlinear)"},
      {"projection_outer", "400", "outer replications per projection norm"},
      {"projection_inner", "200", "inner replications per projection norm"},
      {"n", "1000", "path length (simulate, characteristics)"},
      {"paths", "1", "number of paths (simulate)"},
  };
  return keys;
}

RunConfig RunConfig::parse(const std::string& text, const std::string& origin, const FlagOverrides& flags) {
  std::map<std::string, std::string> values, where;
  std::map<std::string, bool> known;
  for (const auto& k : config_keys()) known[k.name] = true;

  std::istringstream in(text);
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string loc = origin + ":" + std::to_string(lineno);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(loc + ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    if (!known.count(key)) throw ConfigError(loc + ": unknown key '" + key + "'");
    if (values.count(key)) throw ConfigError(loc + ": key '" + key + "' set twice (first at " + where[key] + ")");
    values[key] = trim(line.substr(eq + 1));
    where[key] = loc;
  }

  auto force = [&](const char* key, std::string v, const char* flag) {
    values[key] = std::move(v);
    where[key] = std::string("command line ") + flag;
  };
  if (flags.seed) force("seed", std::to_string(*flags.seed), "--seed");
  if (flags.workers) force("workers", std::to_string(*flags.workers), "--workers");
  if (flags.out) force("out", *flags.out, "--out");
  if (flags.override_assumptions) force("override_assumptions", "true", "--override-assumptions");
  if (flags.allow_exp_growth) force("allow_exp_growth", "true", "--allow-exp-growth");

  if (!values.count("schema_version"))
    throw ConfigError(origin + ": missing required key 'schema_version' (expected " + std::to_string(kSchemaVersion) +
                      ")");
  if (!values.count("seed") || values["seed"].empty())
    throw ConfigError(origin + ": missing required key 'seed' (set it in the file or pass --seed)");
  for (const auto& k : config_keys()) {
    if (!values.count(k.name)) {
      values[k.name] = k.fallback;
      where[k.name] = origin + " (default)";
    }
  }

  const Reader rd(values, where);
  if (rd.raw("schema_version") != std::to_string(kSchemaVersion))
    rd.fail("schema_version", "unsupported schema version '" + rd.raw("schema_version") + "'");

  RunConfig c;
  c.seed = rd.u64("seed");
  c.workers = static_cast<unsigned>(rd.count("workers", 1));
  c.out = rd.raw("out");
  if (c.out.empty()) rd.fail("out", "must not be empty");

  c.model = rd.choice("model", {"linear", "tar", "arch1"});
  c.coefficient_family = rd.choice("coefficient_family", {"explicit", "geometric", "power", "harmonic"});
  c.coefficients = rd.reals("coefficients");
  c.geometric_rate = rd.real("geometric_rate");
  c.power_decay = rd.real("power_decay");
  c.power_truncation = rd.count("power_truncation", 1);
  c.tail_tolerance = rd.real("tail_tolerance");
  if (!(c.tail_tolerance > 0.0)) rd.fail("tail_tolerance", "must be > 0");
  c.theta_pos = rd.real("theta_pos");
  c.theta_neg = rd.real("theta_neg");
  c.noise_scale = rd.real("noise_scale");
  c.omega = rd.real("omega");
  c.beta = rd.real("beta");
  c.burn_in = rd.opt_count("burn_in", 0);
  c.innovation = rd.choice("innovation", {"normal", "uniform", "rademacher", "student_t"});
  c.innovation_df = rd.real("innovation_df");
  c.uniform_half_width = rd.real("uniform_half_width");

  c.functional = rd.raw("functional");
  c.n_grid = rd.counts("n_grid");
  for (std::size_t i = 0; i < c.n_grid.size(); ++i) {
    if (c.n_grid[i] < 2) rd.fail("n_grid", "entries must be >= 2");
    if (i && c.n_grid[i] <= c.n_grid[i - 1]) rd.fail("n_grid", "must be strictly increasing");
  }
  c.reps = rd.count("reps", 100);
  c.horizon = rd.real("horizon");
  if (!(c.horizon > 0.0)) rd.fail("horizon", "must be > 0");
  c.r = rd.real("r");
  if (!(c.r > 0.0) || c.r > c.horizon) rd.fail("r", "must lie in (0, horizon]");
  c.oracle = rd.choice("oracle", {"simulated", "exact"});
  c.oracle_steps = rd.opt_count("oracle_steps", 1);
  c.p_threshold = rd.real("p_threshold");
  if (!(c.p_threshold > 0.0 && c.p_threshold < 1.0)) rd.fail("p_threshold", "must lie in (0, 1)");
  c.gap_reps = rd.count("gap_reps", 0);
  c.b_grid = rd.reals("b_grid");
  for (double b : c.b_grid)
    if (!(b > 0.0)) rd.fail("b_grid", "entries must be > 0");
  if (!rd.raw("threshold").empty()) {
    c.threshold = rd.real("threshold");
    if (!(*c.threshold > 0.0)) rd.fail("threshold", "must be > 0");
  }
  c.override_assumptions = rd.flag("override_assumptions");
  c.allow_exp_growth = rd.flag("allow_exp_growth");
  c.t_form = rd.choice("t_form", {"printed", "self-normalized"});
  c.lr_reps = rd.count("lr_reps", 2);
  c.lr_horizon = rd.count("lr_horizon", 8);

  c.q = rd.real("q");
  if (!(c.q > 1.0)) rd.fail("q", "must be > 1");
  c.lemma_n = rd.count("lemma_n", 1);
  c.lemma_reps = rd.count("lemma_reps", 2);
  c.profile_length = rd.count("profile_length", 1);
  c.projection_outer = rd.count("projection_outer", 2);
  c.projection_inner = rd.count("projection_inner", 2);

  c.n = rd.count("n", 2);
  c.paths = rd.count("paths", 1);

  // Catch bad functional strings at load time, with the line.
  try {
    (void)FunctionalSpec::parse(c.functional, c.allow_exp_growth);
  } catch (const ConfigError& e) {
    rd.fail("functional", e.what());
  }

  c.values_ = std::move(values);
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path, const FlagOverrides& flags) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string(), flags);
}

std::string RunConfig::effective_text() const {
  std::string out;
  for (const auto& k : config_keys()) {
    const auto& v = values_.at(k.name);
    out += std::string(k.name) + " = " + v + "\n";
  }
  return out;
}

ProcessModel build_model(const RunConfig& cfg) {
  InnovationDistribution inn = InnovationDistribution::standard_normal();
  if (cfg.innovation == "uniform") inn = InnovationDistribution::uniform_centered(cfg.uniform_half_width);
  else if (cfg.innovation == "rademacher") inn = InnovationDistribution::rademacher();
  else if (cfg.innovation == "student_t") inn = InnovationDistribution::student_t(cfg.innovation_df);

  if (cfg.model == "tar")
    return ProcessModel::threshold_ar({cfg.theta_pos, cfg.theta_neg, cfg.noise_scale}, inn, cfg.burn_in);
  if (cfg.model == "arch1") return ProcessModel::arch1({cfg.omega, cfg.beta}, inn, cfg.burn_in);

  CoefficientSequence coeffs;
  if (cfg.coefficient_family == "geometric")
    coeffs = CoefficientSequence::geometric(cfg.geometric_rate, cfg.tail_tolerance);
  else if (cfg.coefficient_family == "power")
    coeffs = CoefficientSequence::power(cfg.power_decay, cfg.power_truncation);
  else if (cfg.coefficient_family == "harmonic")
    coeffs = CoefficientSequence::power(1.0, cfg.power_truncation);
  else
    coeffs = CoefficientSequence::explicit_values(cfg.coefficients);
  return ProcessModel::linear(std::move(coeffs), inn, cfg.burn_in);
}

FunctionalSpec build_functional(const RunConfig& cfg) {
  return FunctionalSpec::parse(cfg.functional, cfg.allow_exp_growth);
}

Theorem1Config theorem1_config(const RunConfig& cfg) {
  Theorem1Config t;
  t.n_grid = cfg.n_grid;
  t.reps = cfg.reps;
  t.r = cfg.r;
  t.horizon = cfg.horizon;
  t.seed = SeedLineage{cfg.seed, 0, 0};
  t.workers = cfg.workers;
  t.oracle = cfg.oracle == "exact" ? OracleMode::Exact : OracleMode::Simulated;
  t.oracle_steps = cfg.oracle_steps;
  t.override_assumptions = cfg.override_assumptions;
  t.gap_reps = cfg.gap_reps;
  t.b_grid = cfg.b_grid;
  t.p_threshold = cfg.p_threshold;
  t.lr_reps = cfg.lr_reps;
  t.lr_horizon = cfg.lr_horizon;
  return t;
}

UnitRootConfig unit_root_config(const RunConfig& cfg) {
  UnitRootConfig u;
  u.n_grid = cfg.n_grid;
  u.reps = cfg.reps;
  u.seed = SeedLineage{cfg.seed, 0, 0};
  u.workers = cfg.workers;
  u.oracle_steps = cfg.oracle_steps;
  u.self_normalized_t = cfg.t_form == "self-normalized";
  u.override_assumptions = cfg.override_assumptions;
  u.p_threshold = cfg.p_threshold;
  u.lr_reps = cfg.lr_reps;
  u.lr_horizon = cfg.lr_horizon;
  return u;
}

}  // namespace clab
