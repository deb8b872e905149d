#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rvflx/experiment.hpp"
#include "rvflx/stats.hpp"

namespace rvflx {

inline constexpr const char* kResultsSchema = "rvflx.results/1";
inline constexpr const char* kStatsSchema = "rvflx.stats/1";

/// Fixed-notation number with `digits` decimals; "inf"/"nan" for non-finite values.
std::string format_fixed(double value, int digits = 6);
/// Shortest round-trip representation.
std::string format_exact(double value);

/// Provenance written into every results file.
struct ResultsMetadata {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::size_t folds = 5;
};

/// One row per dataset x model.
std::string results_csv(const std::vector<RunResult>& results, const ResultsMetadata& meta);
nlohmann::json results_json(const std::vector<RunResult>& results, const ResultsMetadata& meta);

/// Long-format results (dataset, model, mean_accuracy[, std_accuracy]) pivoted
/// into a table. Models and datasets keep first-appearance order. Missing
/// cells raise DataError naming each one.
AccuracyTable parse_results_csv(const std::string& text, const std::string& source = "<memory>");
AccuracyTable read_results_csv(const std::filesystem::path& path);

struct StatsReport {
  AccuracyTable table;
  RealVector avg_ranks;
  std::optional<FriedmanReport> friedman;  // absent with fewer than two datasets
};

StatsReport build_stats_report(const AccuracyTable& table, double alpha_level);
std::string stats_text(const StatsReport& report);
nlohmann::json stats_json(const StatsReport& report);

}  // namespace rvflx
