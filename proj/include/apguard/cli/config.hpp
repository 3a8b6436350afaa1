#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "apguard/attack.hpp"
#include "apguard/experiment.hpp"

namespace apguard::cli {

enum class DataSource { synthetic, csv };

struct DataSettings {
  DataSource source = DataSource::synthetic;
  // Raw compact-layout CSVs; queries must carry ground-truth labels.
  std::filesystem::path survey_csv;
  std::filesystem::path queries_csv;
};

struct AttackSettings {
  AttackKind kind = AttackKind::CV;
  double fraction = 0.5;
  // Explicit malicious AP names; when empty, floor(fraction * n) APs are drawn.
  std::vector<std::string> malicious;
  std::map<std::string, double> arco_offsets;
  std::size_t trial = 0;
};

enum class Protocol { detection, cdf, both };

struct ExperimentSettings {
  Protocol protocol = Protocol::both;
  std::vector<AttackKind> kinds{std::begin(kAllAttackKinds), std::end(kAllAttackKinds)};
  std::vector<double> fractions{0.1, 0.2, 0.3, 0.4, 0.5};
  std::size_t trials = 20;
  double cdf_fraction = 0.5;
  // CSV with an error_m column, fed into the baseline-external curve.
  std::optional<std::filesystem::path> external_baseline;
};

struct RunConfig {
  PipelineConfig pipeline;
  DataSettings data;
  AttackSettings attack;
  ExperimentSettings experiment;
  std::optional<std::filesystem::path> out;

  void validate() const;
};

// INI text. Relative paths resolve against base_dir. Unknown sections or keys,
// malformed values and invalid settings throw ConfigError.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

// Canonical INI rendering; parse_config(render_config(c)) reproduces c.
std::string render_config(const RunConfig& config);

std::string_view to_string(Protocol p);

}  // namespace apguard::cli
