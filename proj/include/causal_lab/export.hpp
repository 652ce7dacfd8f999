#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "causal_lab/characteristics.hpp"
#include "causal_lab/dependence.hpp"
#include "causal_lab/experiment.hpp"
#include "causal_lab/processes.hpp"

namespace clab {

/// RFC 4180 writer: CRLF line ends, quoting only where needed, doubles as %.17g.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& fields);
  [[nodiscard]] const std::string& text() const noexcept { return text_; }
  void save(const std::filesystem::path& path) const;

  static std::string num(double x);
  static std::string escape(const std::string& field);

 private:
  std::size_t columns_;
  std::string text_;
};

/// index, innovation, value, partial_sum for t = 1-burn_in .. n (value empty before 1).
[[nodiscard]] CsvWriter path_csv(const PathBundle& bundle);

/// Long format: s, component, value at every grid point; component names carry the prefix.
[[nodiscard]] CsvWriter characteristics_csv(
    const std::vector<std::pair<std::string, const CharacteristicPaths*>>& sets);

[[nodiscard]] CsvWriter ensemble_csv(const std::vector<double>& values, const std::string& column);

[[nodiscard]] nlohmann::json to_json(const DependenceProfile& profile);
[[nodiscard]] nlohmann::json to_json(const Assumption1Report& rep);
[[nodiscard]] nlohmann::json to_json(const Assumption2Report& rep);
[[nodiscard]] nlohmann::json to_json(const Assumption3Report& rep);
[[nodiscard]] nlohmann::json to_json(const Lemma1Report& rep);
[[nodiscard]] nlohmann::json to_json(const LongRunParams& p);
[[nodiscard]] nlohmann::json to_json(const AssumptionSummary& s);
[[nodiscard]] nlohmann::json to_json(const GapReport& g);
[[nodiscard]] nlohmann::json to_json(const GapRow& g);
[[nodiscard]] nlohmann::json to_json(const Theorem1Report& rep);
[[nodiscard]] nlohmann::json to_json(const UnitRootReport& rep);

/// Pretty-printed with a trailing newline.
void save_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace clab
