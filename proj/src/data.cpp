#include "rvflx/data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace rvflx {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  std::string out(s.substr(first, last - first + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
      cell.push_back(ch);
    } else if (ch == delimiter && !quoted) {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell.push_back(ch);
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

bool parse_double(const std::string& text, double& value) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end && std::isfinite(value);
}

}  // namespace

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows) const {
  Dataset out;
  out.name = name;
  out.class_names = class_names;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.targets_onehot.resize(static_cast<Eigen::Index>(rows.size()), targets_onehot.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto row = rows[i];
    const auto dst = static_cast<Eigen::Index>(i);
    out.features.row(dst) = features.row(row);
    out.targets_onehot.row(dst) = targets_onehot.row(row);
    out.labels.push_back(labels[static_cast<std::size_t>(row)]);
  }
  return out;
}

LabelColumn LabelColumn::parse(const std::string& text) {
  LabelColumn col;
  if (text == "first") {
    col.where = Where::first;
  } else if (text == "last") {
    col.where = Where::last;
  } else {
    std::size_t idx = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), idx);
    if (ec != std::errc() || ptr != text.data() + text.size())
      throw ArgumentError("label column must be 'first', 'last' or a 0-based index, got '" + text + "'");
    col.where = Where::index;
    col.index = idx;
  }
  return col;
}

std::string LabelColumn::to_string() const {
  switch (where) {
    case Where::first: return "first";
    case Where::last: return "last";
    case Where::index: return std::to_string(index);
  }
  return "last";
}

RealMatrix one_hot(const std::vector<int>& labels, Eigen::Index n_classes) {
  RealMatrix m = RealMatrix::Zero(static_cast<Eigen::Index>(labels.size()), n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= n_classes) throw ArgumentError("label out of range for one-hot encoding");
    m(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return m;
}

Dataset parse_csv(const std::string& text, const std::string& name, const CsvOptions& options,
                  const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = options.header;
  std::size_t n_cols = 0;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> raw_labels;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_line(line, options.delimiter);
    if (header_pending) {
      header_pending = false;
      n_cols = cells.size();
      continue;
    }
    if (n_cols == 0) n_cols = cells.size();
    if (cells.size() != n_cols)
      throw ParseError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(n_cols) +
                       " columns, found " + std::to_string(cells.size()));
    if (n_cols < 2) throw ParseError(source + ": need at least one feature column and a label column");

    std::size_t label_idx = n_cols - 1;
    if (options.label_column.where == LabelColumn::Where::first) label_idx = 0;
    if (options.label_column.where == LabelColumn::Where::index) {
      label_idx = options.label_column.index;
      if (label_idx >= n_cols)
        throw ParseError(source + ": label column " + std::to_string(label_idx) + " out of range");
    }

    std::vector<double> features;
    features.reserve(n_cols - 1);
    for (std::size_t j = 0; j < n_cols; ++j) {
      if (j == label_idx) continue;
      if (cells[j].empty() || cells[j] == "?")
        throw ParseError(source + ":" + std::to_string(line_no) + ": missing value in column " +
                         std::to_string(j + 1));
      double value = 0.0;
      if (!parse_double(cells[j], value))
        throw ParseError(source + ":" + std::to_string(line_no) + ": column " + std::to_string(j + 1) +
                         ": non-numeric feature '" + cells[j] + "'");
      features.push_back(value);
    }
    if (cells[label_idx].empty())
      throw ParseError(source + ":" + std::to_string(line_no) + ": empty label");
    rows.push_back(std::move(features));
    raw_labels.push_back(cells[label_idx]);
  }
  if (rows.empty()) throw DataError(source + ": no data rows");

  Dataset ds;
  ds.name = name;
  std::map<std::string, int> index_of;
  for (const auto& label : raw_labels) {
    auto [it, inserted] = index_of.try_emplace(label, static_cast<int>(ds.class_names.size()));
    if (inserted) ds.class_names.push_back(label);
    ds.labels.push_back(it->second);
  }
  if (ds.class_names.size() < options.min_classes)
    throw DataError(source + ": need at least " + std::to_string(options.min_classes) + " classes, found " + std::to_string(ds.class_names.size()));

  const auto k = static_cast<Eigen::Index>(rows.size());
  const auto r = static_cast<Eigen::Index>(rows.front().size());
  ds.features.resize(k, r);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < r; ++j)
      ds.features(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  ds.targets_onehot = one_hot(ds.labels, ds.n_classes());
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path.stem().string(), options, path.string());
}

std::vector<DatasetEntry> discover_datasets(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError(dir.string() + " is not a directory");
  std::vector<DatasetEntry> entries;
  const fs::path manifest = dir / "manifest.json";
  if (fs::exists(manifest)) {
    std::ifstream in(manifest);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw DataError(manifest.string() + ": " + e.what());
    }
    for (const auto& item : doc.at("datasets")) {
      DatasetEntry entry;
      entry.path = dir / item.at("file").get<std::string>();
      entry.name = item.value("name", entry.path.stem().string());
      entry.options.header = item.value("header", true);
      entry.options.label_column = LabelColumn::parse(item.value("label_column", std::string("last")));
      const auto delim = item.value("delimiter", std::string(","));
      if (delim.size() != 1) throw DataError(manifest.string() + ": delimiter must be one character");
      entry.options.delimiter = delim[0];
      entries.push_back(std::move(entry));
    }
    return entries;
  }
  for (const auto& file : fs::directory_iterator(dir))
    if (file.is_regular_file() && file.path().extension() == ".csv")
      entries.push_back({file.path(), file.path().stem().string(), {}});
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
  return entries;
}

std::vector<Eigen::Index> FoldPlan::test_rows(std::size_t fold) const {
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] == fold) rows.push_back(static_cast<Eigen::Index>(i));
  return rows;
}

std::vector<Eigen::Index> FoldPlan::train_rows(std::size_t fold) const {
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] != fold) rows.push_back(static_cast<Eigen::Index>(i));
  return rows;
}

FoldPlan stratified_kfold(const Dataset& ds, std::size_t n_folds, std::uint64_t seed) {
  const auto k = static_cast<std::size_t>(ds.n_samples());
  if (n_folds < 2) throw ArgumentError("need at least two folds");
  if (n_folds > k)
    throw ArgumentError("cannot split " + std::to_string(k) + " rows into " + std::to_string(n_folds) + " folds");

  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(ds.n_classes()));
  for (std::size_t i = 0; i < k; ++i) by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);

  FoldPlan plan;
  plan.n_folds = n_folds;
  plan.seed = seed;
  plan.assignments.assign(k, 0);
  Rng rng(seed);
  std::size_t next = 0;
  for (auto& rows : by_class) {
    for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.below(i)]);
    for (std::size_t row : rows) {
      plan.assignments[row] = next;
      next = (next + 1) % n_folds;
    }
  }
  return plan;
}

Standardizer Standardizer::fit(const RealMatrix& m) {
  if (m.rows() == 0) throw ArgumentError("cannot standardize an empty matrix");
  Standardizer s;
  s.mean = m.colwise().mean();
  s.stddev = ((m.rowwise() - s.mean).array().square().colwise().sum() / static_cast<double>(m.rows()))
                 .sqrt()
                 .matrix();
  return s;
}

RealMatrix Standardizer::apply(const RealMatrix& m) const {
  if (m.cols() != mean.size())
    throw ArgumentError("standardizer fitted on " + std::to_string(mean.size()) + " columns, got " +
                        std::to_string(m.cols()));
  RealMatrix out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    // Columns whose spread is at rounding level of their mean are treated as constant.
    const bool constant = !(stddev(j) > 1e-12 * std::max(1.0, std::abs(mean(j))));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      out(i, j) = constant ? 0.0 : (m(i, j) - mean(j)) / stddev(j);
  }
  return out;
}

NormalizedFold normalize_fold(const RealMatrix& train, const RealMatrix& test) {
  if (train.cols() != test.cols()) throw ArgumentError("train and test splits have different column counts");
  NormalizedFold out;
  out.params = Standardizer::fit(train);
  out.train = out.params.apply(train);
  out.test = out.params.apply(test);
  return out;
}

}  // namespace rvflx
