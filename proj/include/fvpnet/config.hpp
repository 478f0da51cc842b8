#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "fvpnet/algorithm.hpp"
#include "fvpnet/errors.hpp"
#include "fvpnet/graph.hpp"

namespace fvpnet {

struct ConfigIssue {
  int line = 0;  // 0 when the issue is not tied to a line (e.g. a missing key)
  std::string key;
  std::string message;
};

/// Carries every problem found in a scenario file, not just the first.
class ConfigError : public Error {
 public:
  ConfigError(std::string source, std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::vector<ConfigIssue> issues_;
};

struct OutputOptions {
  std::filesystem::path dir = "out";
  bool states = true;
  bool plots = true;
  bool dump_mixing = false;
};

struct CheckSelection {
  std::vector<std::string> names;  // empty: all
  std::size_t samples = 1000;
  double state_scale = 10.0;
  std::vector<double> etas;  // lemma-4 etas; empty: the run's eta
  std::size_t occurrence_steps = 10000;
  std::size_t connectivity_states = 100;
};

struct ScenarioConfig {
  Scenario scenario;  // validated
  GraphSet graph_set;  // the set used for occurrence and connectivity accounting
  OutputOptions output;
  CheckSelection checks;
  std::string source;
};

/// Names accepted in `checks.run`.
const std::vector<std::string>& known_check_names();

/// Reads a scenario file. Relative paths inside it resolve against the file's
/// directory. Throws ConfigError listing every violation.
ScenarioConfig parse_config(const std::filesystem::path& path);

/// Same, from text; `base_dir` resolves relative paths.
ScenarioConfig parse_config_text(const std::string& text, const std::string& source = "<string>",
                                 const std::filesystem::path& base_dir = ".");

/// Numeric matrix file: one row per line, comma separated, '#' comments.
std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path);

}  // namespace fvpnet
