#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "rvflx/matrix.hpp"

namespace rvflx {

struct Dataset {
  std::string name;
  RealMatrix features;        // k x r
  RealMatrix targets_onehot;  // k x d
  std::vector<int> labels;    // class index per row
  std::vector<std::string> class_names;

  Eigen::Index n_samples() const { return features.rows(); }
  Eigen::Index n_features() const { return features.cols(); }
  Eigen::Index n_classes() const { return static_cast<Eigen::Index>(class_names.size()); }

  /// Rows `rows` of this dataset, same class list.
  Dataset subset(const std::vector<Eigen::Index>& rows) const;
};

/// Which column holds the class label: "first", "last", or a 0-based index.
struct LabelColumn {
  enum class Where { first, last, index } where = Where::last;
  std::size_t index = 0;

  static LabelColumn parse(const std::string& text);
  std::string to_string() const;
};

struct CsvOptions {
  char delimiter = ',';
  LabelColumn label_column;
  bool header = true;
  std::size_t min_classes = 2;  // prediction inputs may carry a single class
};

/// Thrown on malformed CSV content; carries file/row/column context.
class ParseError : public DataError {
 public:
  using DataError::DataError;
};

RealMatrix one_hot(const std::vector<int>& labels, Eigen::Index n_classes);

/// Features parsed as reals; labels mapped to class indices in order of first
/// appearance. Empty cells are rejected.
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Parses CSV text already in memory; `source` names it in error messages.
Dataset parse_csv(const std::string& text, const std::string& name, const CsvOptions& options = {},
                  const std::string& source = "<memory>");

/// Dataset files in a directory. A `manifest.json` of the form
///   {"datasets": [{"file": "x.csv", "name": "x", "label_column": "last",
///                  "header": true, "delimiter": ","}, ...]}
/// selects and configures entries; otherwise every *.csv is taken with
/// default options, sorted by file name.
struct DatasetEntry {
  std::filesystem::path path;
  std::string name;
  CsvOptions options;
};
std::vector<DatasetEntry> discover_datasets(const std::filesystem::path& dir);

struct FoldPlan {
  std::size_t n_folds = 0;
  std::vector<std::size_t> assignments;  // test fold of each row
  std::uint64_t seed = 0;

  std::vector<Eigen::Index> test_rows(std::size_t fold) const;
  std::vector<Eigen::Index> train_rows(std::size_t fold) const;
};

/// Seeded shuffle inside each class, then round-robin fold assignment that
/// carries its position from one class to the next, so fold sizes differ by at
/// most one and per-class counts by at most one.
FoldPlan stratified_kfold(const Dataset& ds, std::size_t n_folds, std::uint64_t seed);

/// Per-column z-score parameters (population standard deviation).
struct Standardizer {
  RealRowVector mean;
  RealRowVector stddev;  // zero marks a constant column, mapped to 0

  static Standardizer fit(const RealMatrix& m);
  RealMatrix apply(const RealMatrix& m) const;
};

struct NormalizedFold {
  RealMatrix train;
  RealMatrix test;
  Standardizer params;
};

/// Z-scores both splits with statistics from `train` only.
NormalizedFold normalize_fold(const RealMatrix& train, const RealMatrix& test);

}  // namespace rvflx
