#include "causal_lab/export.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "causal_lab/errors.hpp"

namespace clab {

using nlohmann::json;

namespace {

// JSON has no inf/nan; keep them readable instead of null.
json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
}

}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); }

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw ConfigError("CSV row has the wrong number of fields");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) text_ += ',';
    text_ += escape(fields[i]);
  }
  text_ += "\r\n";
}

void CsvWriter::save(const std::filesystem::path& path) const { write_file(path, text_); }

std::string CsvWriter::num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string CsvWriter::escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

CsvWriter path_csv(const PathBundle& bundle) {
  CsvWriter w({"index", "innovation", "value", "partial_sum"});
  const auto first = 1 - static_cast<std::int64_t>(bundle.burn_in());
  const auto x = bundle.values();
  const auto S = bundle.partial_sums();
  for (std::int64_t t = first; t <= static_cast<std::int64_t>(bundle.length()); ++t) {
    if (t < 1) {
      w.row({std::to_string(t), CsvWriter::num(bundle.innovation(t)), "", ""});
    } else if (t >= 1) {
      const auto k = static_cast<std::size_t>(t);
      w.row({std::to_string(t), CsvWriter::num(bundle.innovation(t)), CsvWriter::num(x[k - 1]),
             CsvWriter::num(S[k])});
    }
  }
  return w;
}

CsvWriter characteristics_csv(const std::vector<std::pair<std::string, const CharacteristicPaths*>>& sets) {
  CsvWriter w({"s", "component", "value"});
  for (const auto& [prefix, paths] : sets) {
    const std::pair<const char*, const GridPath*> parts[] = {
        {"B1", &paths->B1}, {"B2", &paths->B2}, {"C11", &paths->C11}, {"C12", &paths->C12}, {"C22", &paths->C22}};
    for (const auto& [name, path] : parts) {
      for (std::size_t k = 0; k <= path->last(); ++k) {
        const double s = static_cast<double>(k) / static_cast<double>(paths->n);
        w.row({CsvWriter::num(s), prefix + name, CsvWriter::num(path->level[k])});
      }
    }
  }
  return w;
}

CsvWriter ensemble_csv(const std::vector<double>& values, const std::string& column) {
  CsvWriter w({column});
  for (double v : values) w.row({CsvWriter::num(v)});
  return w;
}

json to_json(const DependenceProfile& p) {
  return {{"p", p.p}, {"theta", numbers(p.theta)}, {"Theta", numbers(p.Theta)}, {"Lambda", numbers(p.Lambda)},
          {"tail", number(p.tail)}};
}

json to_json(const Assumption1Report& r) {
  json grid = json::array();
  for (auto n : r.n_grid) grid.push_back(n);
  return {{"q", r.q},         {"q_star", r.q_star}, {"n_grid", grid},          {"Theta", numbers(r.Theta)},
          {"normalized", numbers(r.normalized)}, {"sup", number(r.sup)}, {"verdict", r.pass ? "pass" : "fail"},
          {"reason", r.reason}};
}

json to_json(const Assumption2Report& r) {
  return {{"checked", r.checked}, {"ratio", number(r.ratio)}, {"sum", number(r.sum)},
          {"verdict", r.pass ? "pass" : "fail"}, {"reason", r.reason}};
}

json to_json(const Assumption3Report& r) {
  return {{"value", number(r.value)}, {"tail_bound", number(r.tail_bound)}, {"verdict", r.pass ? "pass" : "fail"},
          {"reason", r.reason}};
}

json to_json(const Lemma1Report& r) {
  return {{"q", r.q},     {"n", r.n},         {"lhs", r.lhs}, {"lhs_stderr", r.lhs_stderr},
          {"rhs", r.rhs}, {"Theta0", r.Theta0}, {"verdict", r.holds ? "pass" : "fail"}};
}

json to_json(const LongRunParams& p) {
  return {{"lambda", number(p.lambda)},
          {"sigma", number(p.sigma)},
          {"gamma0", number(p.gamma0)},
          {"provenance", p.provenance == Provenance::Analytic ? "analytic" : "monte-carlo"},
          {"lambda_stderr", p.lambda_stderr},
          {"sigma_stderr", p.sigma_stderr},
          {"summable", p.summable},
          {"note", p.note}};
}

json to_json(const AssumptionSummary& s) {
  json j = {{"verdict", s.pass ? "pass" : "fail"}, {"lines", s.lines}};
  if (s.a1) j["assumption1"] = to_json(*s.a1);
  if (s.a2) j["assumption2"] = to_json(*s.a2);
  if (s.a3) j["assumption3"] = to_json(*s.a3);
  return j;
}

json to_json(const GapReport& g) {
  return {{"n", g.n},
          {"sup_jump", g.sup_jump},
          {"sup_C_gap", {{"11", g.sup_C_gap[0]}, {"12", g.sup_C_gap[1]}, {"22", g.sup_C_gap[2]}}},
          {"sup_B_gap", g.sup_B_gap},
          {"b_grid", numbers(g.b_grid)},
          {"big_jump_mass", numbers(g.big_jump_mass)},
          {"stop_index", g.stop_index},
          {"stopped", g.stopped}};
}

json to_json(const GapRow& g) {
  return {{"n", g.n},
          {"reps", g.reps},
          {"median_sup_jump", g.median_jump},
          {"median_sup_C_gap", {{"11", g.median_C[0]}, {"12", g.median_C[1]}, {"22", g.median_C[2]}}},
          {"median_sup_B_gap", g.median_B},
          {"mean_big_jump_mass", numbers(g.mean_big_jump)}};
}

json to_json(const Theorem1Report& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"n", row.n},
                    {"oracle_steps", row.oracle_steps},
                    {"ks_D", row.ks.statistic},
                    {"ks_p", row.ks.p_value},
                    {"reference_D", row.ks_reference.statistic},
                    {"reference_p", row.ks_reference.p_value},
                    {"refused", row.refused},
                    {"refusal", row.refusal},
                    {"stat_mean", row.stat_mean},
                    {"stat_median", row.stat_median},
                    {"oracle_mean", row.oracle_mean},
                    {"oracle_median", row.oracle_median},
                    {"stat_flagged", row.stat_flagged},
                    {"oracle_flagged", row.oracle_flagged}});
  }
  json gaps = json::array();
  for (const auto& g : r.gaps) gaps.push_back(to_json(g));
  return {{"model", r.model},       {"functional", r.functional},
          {"banner", r.banner},     {"ran", r.ran},
          {"long_run", to_json(r.params)}, {"assumptions", to_json(r.assumptions)},
          {"ks", rows},             {"reference_steps", r.reference_steps}, {"gaps", gaps},
          {"trend_ok", r.trend_ok}, {"p_ok", r.p_ok},
          {"verdict", r.pass ? "pass" : "fail"}};
}

json to_json(const UnitRootReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"n", row.n},
                    {"oracle_steps", row.oracle_steps},
                    {"ks_scaled_D", row.ks_scaled.statistic},
                    {"ks_scaled_p", row.ks_scaled.p_value},
                    {"ks_t_D", row.ks_t.statistic},
                    {"ks_t_p", row.ks_t.p_value},
                    {"refused", row.refused},
                    {"refusal", row.refusal},
                    {"scaled_median", row.scaled_median},
                    {"oracle_median", row.oracle_median},
                    {"null_median", row.null_median},
                    {"null_median_stderr", row.null_median_stderr},
                    {"shift_in_stderr", row.shift_in_stderr}});
  }
  return {{"model", r.model},
          {"banner", r.banner},
          {"ran", r.ran},
          {"long_run", to_json(r.params)},
          {"assumptions", to_json(r.assumptions)},
          {"rows", rows},
          {"verdict", r.pass ? "pass" : "fail"}};
}

void save_json(const json& j, const std::filesystem::path& path) { write_file(path, j.dump(2) + "\n"); }

}  // namespace clab
