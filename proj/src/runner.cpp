#include "causal_lab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "causal_lab/errors.hpp"
#include "causal_lab/export.hpp"

namespace clab {

using nlohmann::json;

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

// Collects artifact names; manifest.json is written last and lists them.
class ArtifactDir {
 public:
  ArtifactDir(const RunConfig& cfg, std::string sub) : cfg_(cfg), sub_(std::move(sub)), root_(cfg.out) {
    std::filesystem::create_directories(root_);
  }

  void csv(const std::string& name, const CsvWriter& w) {
    w.save(root_ / name);
    files_.push_back(name);
  }
  void json_file(const std::string& name, const json& j) {
    save_json(j, root_ / name);
    files_.push_back(name);
  }

  void finish(bool pass, const json& summary) {
    {
      std::ofstream cfg_out(root_ / "config.txt", std::ios::binary);
      cfg_out << "# effective configuration; rerun with the command in manifest.json\n" << cfg_.effective_text();
    }
    json config = json::object();
    std::istringstream lines(cfg_.effective_text());
    std::string line;
    while (std::getline(lines, line)) {
      const auto eq = line.find(" = ");
      config[line.substr(0, eq)] = line.substr(eq + 3);
    }
    json m = {{"subcommand", sub_},
              {"schema_version", kSchemaVersion},
              {"master_seed", cfg_.seed},
              {"workers", cfg_.workers},
              {"rerun", "causal-lab " + sub_ + " --config " + (root_ / "config.txt").string()},
              {"config", config},
              {"artifacts", files_},
              {"summary", summary},
              {"verdict", pass ? "pass" : "fail"}};
    save_json(m, root_ / "manifest.json");
  }

 private:
  const RunConfig& cfg_;
  std::string sub_;
  std::filesystem::path root_;
  std::vector<std::string> files_;
};

SeedLineage master(const RunConfig& cfg) { return SeedLineage{cfg.seed, 0, 0}; }

LongRunParams params(const ProcessModel& model, const RunConfig& cfg) {
  return long_run_params(model, cfg.lr_reps, cfg.lr_horizon, master(cfg).with(Purpose::LongRun), cfg.workers);
}

std::size_t path_length(std::size_t n, double horizon) {
  return std::max<std::size_t>(grid_floor(n, horizon), 1);
}

// ---------------------------------------------------------------------------

int run_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto model = build_model(cfg);
  ArtifactDir dir(cfg, "simulate");
  std::size_t warnings = 0;
  for (std::size_t p = 0; p < cfg.paths; ++p) {
    const auto stream = master(cfg).with_replication(static_cast<std::uint32_t>(p)).with(Purpose::Innovations);
    const auto bundle = simulate_path(model, cfg.n, stream);
    warnings += bundle.warnings().size();
    dir.csv("path_" + std::to_string(p) + ".csv", path_csv(bundle));
    for (const auto& w : bundle.warnings()) err << "simulate: path " << p << ": " << w << "\n";
  }
  json summary = {{"model", model.describe()}, {"n", cfg.n}, {"paths", cfg.paths}, {"warnings", model.warnings()}};
  dir.finish(true, summary);
  out << "simulate: PASS (" << cfg.paths << " path(s) of length " << cfg.n << ", " << model.describe() << ")\n";
  return kExitPass;
}

int run_dependence(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto model = build_model(cfg);
  ArtifactDir dir(cfg, "dependence");
  const auto seed = master(cfg);

  err << "dependence: checking assumptions\n";
  const auto assumptions = check_assumptions(model, cfg.q, seed);
  for (const auto& l : assumptions.lines) err << "  " << l << "\n";

  DependenceProfile profile;
  json profile_note;
  if (model.is_linear()) {
    profile = linear_profile(model, cfg.q, seed.with(Purpose::Coupling));
    profile_note = "analytic";
  } else {
    err << "dependence: Monte Carlo projection norms for n = 0.." << cfg.profile_length << "\n";
    std::vector<double> theta;
    for (std::size_t k = 0; k <= cfg.profile_length; ++k) {
      const auto est = projection_norm_mc(model, k, cfg.q, cfg.projection_outer, cfg.projection_inner,
                                          seed.with_replication(static_cast<std::uint32_t>(k)), cfg.workers);
      theta.push_back(est.theta);
    }
    profile = DependenceProfile::from_theta(std::move(theta), cfg.q, 0.0);
    profile_note = "monte-carlo; tail beyond profile_length not bounded";
  }

  CsvWriter pcsv({"n", "theta", "Theta", "Lambda"});
  for (std::size_t k = 0; k < profile.theta.size(); ++k)
    pcsv.row({std::to_string(k), CsvWriter::num(profile.theta[k]), CsvWriter::num(profile.Theta[k]),
              CsvWriter::num(profile.Lambda[k])});
  dir.csv("profile.csv", pcsv);

  json lemma = nullptr;
  bool lemma_ok = true;
  if (std::isfinite(profile.Theta_at(0))) {
    err << "dependence: maximal inequality at n = " << cfg.lemma_n << "\n";
    const auto rep = lemma1_inequality_check(model, cfg.q, cfg.lemma_n, cfg.lemma_reps, seed, profile, cfg.workers);
    lemma = to_json(rep);
    lemma_ok = rep.holds;
  } else {
    lemma = "not checked: Theta_0 is infinite";
  }

  const bool pass = assumptions.pass && lemma_ok;
  json report = {{"model", model.describe()},
                 {"profile", to_json(profile)},
                 {"profile_source", profile_note},
                 {"assumptions", to_json(assumptions)},
                 {"maximal_inequality", lemma},
                 {"verdict", pass ? "pass" : "fail"}};
  dir.json_file("dependence.json", report);
  dir.finish(pass, {{"assumptions", assumptions.lines}, {"maximal_inequality_holds", lemma_ok}});

  std::string why;
  if (assumptions.a1 && !assumptions.a1->pass) why = "Assumption 1 fails: " + assumptions.a1->reason;
  else if (!assumptions.pass) why = "assumption check failed";
  else if (!lemma_ok) why = "maximal inequality violated";
  else why = "assumptions hold, maximal inequality holds";
  out << "dependence: " << (pass ? "PASS" : "FAIL") << " (" << why << ")\n";
  return pass ? kExitPass : kExitVerdictFail;
}

int run_characteristics(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto model = build_model(cfg);
  const auto f = build_functional(cfg);
  const auto oracle = ConditionalMomentOracle::for_model(model);
  if (oracle.kind() == ConditionalMomentOracle::Kind::None)
    throw UnsupportedModelError("characteristics need closed-form conditional moments; " + model.kind_name() +
                                " has none");
  ArtifactDir dir(cfg, "characteristics");
  const auto lr = params(model, cfg);
  const auto seed = master(cfg);

  const auto bundle = simulate_path(model, path_length(cfg.n, cfg.horizon), seed.with(Purpose::Innovations));
  const auto emp = empirical_characteristics(bundle, f, cfg.n, oracle, cfg.horizon);
  const auto comp = composed_characteristics(bundle, f, lr.lambda, lr.sigma, cfg.n, cfg.horizon);
  dir.csv("characteristics.csv", characteristics_csv({{"empirical_", &emp}, {"composed_", &comp}}));

  const auto gap = gap_diagnostics(bundle, f, lr.lambda, lr.sigma, cfg.n, cfg.horizon, cfg.b_grid, oracle,
                                   cfg.threshold);
  json report = {{"model", model.describe()},
                 {"functional", f.describe()},
                 {"long_run", to_json(lr)},
                 {"single_path", to_json(gap)}};

  bool pass = std::isfinite(gap.sup_jump) && std::isfinite(gap.sup_B_gap);
  std::string why = "single-path diagnostics finite";
  if (cfg.gap_reps > 0) {
    json rows = json::array();
    std::vector<GapRow> trend;
    for (std::size_t gi = 0; gi < cfg.n_grid.size(); ++gi) {
      err << "characteristics: gap medians at n = " << cfg.n_grid[gi] << "\n";
      trend.push_back(gap_trend_row(model, f, lr.lambda, lr.sigma, cfg.n_grid[gi], cfg.horizon, cfg.gap_reps,
                                    cfg.b_grid, seed.with(Purpose::Conditional, static_cast<std::uint32_t>(gi)),
                                    cfg.workers));
      rows.push_back(to_json(trend.back()));
    }
    // a gap that is exactly zero at both sizes (iid B gap, say) has nothing left to shrink
    const auto shrinks = [](double now, double before) { return now < before || (now == 0.0 && before == 0.0); };
    bool down = true;
    for (std::size_t i = 1; i < trend.size(); ++i) {
      down = down && shrinks(trend[i].median_jump, trend[i - 1].median_jump) &&
             shrinks(trend[i].median_B, trend[i - 1].median_B);
      for (int c = 0; c < 3; ++c) down = down && shrinks(trend[i].median_C[c], trend[i - 1].median_C[c]);
    }
    report["trend"] = rows;
    report["trend_decreasing"] = down;
    pass = pass && down;
    why = down ? "gap medians decrease in n" : "gap medians do not decrease in n";
  }
  report["verdict"] = pass ? "pass" : "fail";
  dir.json_file("characteristics.json", report);
  dir.finish(pass, {{"sup_jump", gap.sup_jump}, {"sup_B_gap", gap.sup_B_gap}});
  out << "characteristics: " << (pass ? "PASS" : "FAIL") << " (" << why << ")\n";
  return pass ? kExitPass : kExitVerdictFail;
}

int run_limit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto model = build_model(cfg);
  const auto f = build_functional(cfg);
  ArtifactDir dir(cfg, "limit");
  const auto lr = params(model, cfg);
  const std::size_t M = cfg.oracle_steps.value_or(cfg.n);
  err << "limit: " << cfg.reps << " samples on M = " << M << " (lambda " << fmt(lr.lambda) << ", sigma "
      << fmt(lr.sigma) << ")\n";
  const auto samples = limit_ensemble(f, lr.lambda, lr.sigma, cfg.r, M, cfg.reps,
                                      master(cfg).with(Purpose::Brownian), cfg.workers);
  CsvWriter w({"value"});
  std::vector<double> values;
  for (const auto& s : samples) {
    const double v = s.flagged ? std::nan("") : s.value;
    values.push_back(v);
    w.row({CsvWriter::num(v)});
  }
  dir.csv("limit.csv", w);
  const EnsembleDistribution dist(values);
  const bool pass = dist.flagged_fraction() <= 0.01;
  json manifest = {{"f", f.describe()},   {"lambda", lr.lambda}, {"sigma", lr.sigma},
                   {"r", cfg.r},          {"M", M},              {"reps", cfg.reps},
                   {"master_seed", cfg.seed}, {"long_run", to_json(lr)},
                   {"mean", dist.count() ? dist.mean() : 0.0},
                   {"median", dist.count() ? dist.median() : 0.0},
                   {"flagged", dist.flagged()}};
  dir.json_file("limit.json", manifest);
  dir.finish(pass, {{"flagged_fraction", dist.flagged_fraction()}});
  out << "limit: " << (pass ? "PASS" : "FAIL") << " (" << dist.count() << " samples, mean " << fmt(dist.mean())
      << ", flagged " << dist.flagged() << ")\n";
  return pass ? kExitPass : kExitVerdictFail;
}

int run_theorem1_cmd(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto model = build_model(cfg);
  const auto f = build_functional(cfg);
  ArtifactDir dir(cfg, "theorem1");
  err << "theorem1: " << model.describe() << ", f = " << f.describe() << "\n";
  const auto rep = run_theorem1(model, f, theorem1_config(cfg));
  for (const auto& l : rep.assumptions.lines) err << "  " << l << "\n";
  if (!rep.banner.empty()) err << "theorem1: " << rep.banner << "\n";
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& row = rep.rows[i];
    err << "  n = " << row.n << ": D = " << fmt(row.ks.statistic) << ", p = " << fmt(row.ks.p_value)
        << ", D vs reference = " << fmt(row.ks_reference.statistic) << (row.refused ? " (refused)" : "") << "\n";
    dir.csv("statistic_n" + std::to_string(row.n) + ".csv", ensemble_csv(rep.stat_ensembles[i].samples(), "value"));
    dir.csv("oracle_n" + std::to_string(row.n) + ".csv", ensemble_csv(rep.oracle_ensembles[i].samples(), "value"));
  }
  dir.json_file("theorem1.json", to_json(rep));
  dir.finish(rep.pass, {{"p_ok", rep.p_ok}, {"trend_ok", rep.trend_ok}, {"banner", rep.banner}});

  std::string why;
  if (!rep.ran) why = rep.banner + "; rerun with --override-assumptions to force";
  else
    why = "reference D " + fmt(rep.rows.front().ks_reference.statistic) + " -> " +
          fmt(rep.rows.back().ks_reference.statistic) + ", p at n=" +
          std::to_string(rep.rows.back().n) + " " + fmt(rep.rows.back().ks.p_value);
  out << "theorem1: " << (rep.pass ? "PASS" : "FAIL") << " (" << why << ")\n";
  return rep.pass ? kExitPass : kExitVerdictFail;
}

int run_unitroot_cmd(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto model = build_model(cfg);
  ArtifactDir dir(cfg, "unitroot");
  err << "unitroot: " << model.describe() << "\n";
  const auto rep = run_unit_root(model, unit_root_config(cfg));
  for (const auto& l : rep.assumptions.lines) err << "  " << l << "\n";
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& row = rep.rows[i];
    err << "  n = " << row.n << ": p(scaled) = " << fmt(row.ks_scaled.p_value) << ", p(t) = " << fmt(row.ks_t.p_value)
        << ", median shift vs lambda=0 law = " << fmt(row.shift_in_stderr) << " se\n";
    const std::string tag = "_n" + std::to_string(row.n) + ".csv";
    dir.csv("scaled" + tag, ensemble_csv(rep.scaled_ensembles[i].samples(), "value"));
    dir.csv("t" + tag, ensemble_csv(rep.t_ensembles[i].samples(), "value"));
    dir.csv("oracle_ratio" + tag, ensemble_csv(rep.oracle_ratio[i].samples(), "value"));
    dir.csv("oracle_t" + tag, ensemble_csv(rep.oracle_t[i].samples(), "value"));
  }
  dir.json_file("unitroot.json", to_json(rep));
  dir.finish(rep.pass, {{"banner", rep.banner}});
  std::string why;
  if (!rep.ran) why = rep.banner + "; rerun with --override-assumptions to force";
  else
    why = "p(scaled) " + fmt(rep.rows.back().ks_scaled.p_value) + ", p(t) " + fmt(rep.rows.back().ks_t.p_value);
  out << "unitroot: " << (rep.pass ? "PASS" : "FAIL") << " (" << why << ")\n";
  return rep.pass ? kExitPass : kExitVerdictFail;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"simulate", "dependence", "characteristics",
                                                 "limit",    "theorem1",   "unitroot"};
  return names;
}

int run_subcommand(const std::string& name, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (name == "simulate") return run_simulate(cfg, out, err);
  if (name == "dependence") return run_dependence(cfg, out, err);
  if (name == "characteristics") return run_characteristics(cfg, out, err);
  if (name == "limit") return run_limit(cfg, out, err);
  if (name == "theorem1") return run_theorem1_cmd(cfg, out, err);
  if (name == "unitroot") return run_unitroot_cmd(cfg, out, err);
  throw ConfigError("unknown subcommand '" + name + "'");
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"causal-lab: functional limit experiments for causal processes"};
  app.require_subcommand(1, 1);
  std::string config_path;
  FlagOverrides flags;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string out_dir;
  for (const auto& name : subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "config file")->required();
    sub->add_option("--seed", seed, "master seed (overrides the file)");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "artifact directory");
    sub->add_flag("--override-assumptions", flags.override_assumptions, "run even if assumption checks fail");
    sub->add_flag("--allow-exp-growth", flags.allow_exp_growth, "permit exponential-growth functionals");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  auto* sub = app.get_subcommands().front();
  if (sub->count("--seed")) flags.seed = seed;
  if (sub->count("--workers")) flags.workers = workers;
  if (sub->count("--out")) flags.out = out_dir;

  try {
    const auto cfg = RunConfig::load(config_path, flags);
    return run_subcommand(sub->get_name(), cfg, out, err);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitError;
}

}  // namespace clab
