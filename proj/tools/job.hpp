#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rvflx/experiment.hpp"
#include "rvflx/models.hpp"

namespace rvflx::cli {

inline constexpr const char* kConfigSchema = "rvflx.config/1";

enum ExitCode : int { kOk = 0, kPartialFailure = 1, kConfigError = 2 };

/// Everything a command needs. Serialized next to every result set.
struct JobConfig {
  std::string command;
  std::vector<std::string> inputs;  // dataset files or directories, results CSV, model bundle
  std::vector<ModelKind> models = {kAllModelKinds.begin(), kAllModelKinds.end()};
  std::optional<std::string> grid_file;
  Grid grid = Grid::defaults();
  std::uint64_t seed = 0;
  std::size_t folds = 5;
  double alpha_level = 0.05;
  HyperParams hp;                        // train, sensitivity, ablate
  bool tune = false;                     // sensitivity/ablate: pick hp by grid search first
  std::vector<double> alphas = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  TransformMethod method = TransformMethod::natural;  // convert
  std::string out;
  std::size_t jobs = 1;
  bool force = false;
};

nlohmann::json to_json(const JobConfig& config);
JobConfig job_config_from_json(const nlohmann::json& j);

/// fnv1a over the serialized config minus the fields that cannot change a
/// result (output directory, thread count, overwrite flag); 16 hex digits.
std::string config_hash(const JobConfig& config);

using Logger = std::function<void(std::string_view)>;

/// Runs config.command. Returns an ExitCode; configuration problems are
/// reported through `log` and yield kConfigError.
int run_command(const JobConfig& config, const Logger& log);

}  // namespace rvflx::cli
