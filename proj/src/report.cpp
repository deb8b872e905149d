#include "rvflx/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "rvflx/data.hpp"
#include "rvflx/serialization.hpp"

namespace rvflx {

using nlohmann::json;

namespace {

constexpr const char* kFeatureScaling = "z-score per column, fitted on each training fold";
constexpr const char* kTieBreak =
    "highest mean CV accuracy; then fewer hidden nodes; then later C in the grid list; then first enumerated";
constexpr const char* kAccuracyDefinition = "mean test accuracy over the cross-validation folds (no nested CV)";

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, delim)) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

std::string join_folds(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += format_fixed(values[i]);
  }
  return out;
}

}  // namespace

std::string format_fixed(double value, int digits) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

std::string format_exact(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string results_csv(const std::vector<RunResult>& results, const ResultsMetadata& meta) {
  std::ostringstream out;
  out << "schema,dataset,model,mean_accuracy,std_accuracy,c,n_hidden,activation,alpha,varpi,direct_link,seed,"
         "folds,fold_accuracies,config_hash\n";
  for (const auto& r : results) {
    out << kResultsSchema << ',' << r.dataset << ',' << to_string(r.kind) << ',' << format_fixed(r.mean_accuracy)
        << ',' << format_fixed(r.std_accuracy) << ',' << format_exact(r.best.c) << ',' << r.best.n_hidden << ','
        << to_string(r.best.activation) << ',' << format_exact(r.best.alpha) << ',' << r.best.varpi << ','
        << (r.best.direct_link ? 1 : 0) << ',' << r.best.seed << ',' << meta.folds << ','
        << join_folds(r.fold_accuracies) << ',' << meta.config_hash << '\n';
  }
  return out.str();
}

json results_json(const std::vector<RunResult>& results, const ResultsMetadata& meta) {
  json rows = json::array();
  for (const auto& r : results) {
    rows.push_back({{"dataset", r.dataset},
                    {"model", to_string(r.kind)},
                    {"best", to_json(r.best)},
                    {"best_index", r.best_index},
                    {"fold_accuracies", r.fold_accuracies},
                    {"mean_accuracy", r.mean_accuracy},
                    {"std_accuracy", r.std_accuracy},
                    {"points_evaluated", r.points_evaluated},
                    {"points_failed", r.points_failed}});
  }
  return {{"schema", kResultsSchema},
          {"seed", meta.seed},
          {"config_hash", meta.config_hash},
          {"metadata",
           {{"folds", meta.folds},
            {"feature_scaling", kFeatureScaling},
            {"model_selection", kTieBreak},
            {"reported_accuracy", kAccuracyDefinition},
            {"std_definition", "sample standard deviation over folds"}}},
          {"results", rows}};
}

AccuracyTable parse_results_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty results file");
  const auto header = split(line, ',');
  const auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  };
  const auto dataset_col = column("dataset");
  const auto model_col = column("model");
  const auto acc_col = column("mean_accuracy");
  const auto std_col = column("std_accuracy");
  if (!dataset_col || !model_col || !acc_col)
    throw DataError(source + ": results need dataset, model and mean_accuracy columns");

  AccuracyTable table;
  std::map<std::string, std::size_t> model_index;
  std::map<std::string, std::size_t> dataset_index;
  std::map<std::pair<std::size_t, std::size_t>, std::pair<double, double>> cells;
  std::size_t line_no = 1;
  bool have_std = std_col.has_value();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \r\n\t") == std::string::npos) continue;
    const auto cells_in_row = split(line, ',');
    if (cells_in_row.size() < header.size())
      throw ParseError(source + ":" + std::to_string(line_no) + ": too few columns");
    const auto& ds = cells_in_row[*dataset_col];
    const auto& model = cells_in_row[*model_col];
    if (!dataset_index.count(ds)) {
      dataset_index[ds] = table.datasets.size();
      table.datasets.push_back(ds);
    }
    if (!model_index.count(model)) {
      model_index[model] = table.models.size();
      table.models.push_back(model);
    }
    const auto parse = [&](std::size_t col) {
      double v = 0.0;
      const auto& s = cells_in_row[col];
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError(source + ":" + std::to_string(line_no) + ": bad number '" + s + "'");
      return v;
    };
    double sd = std::nan("");
    if (std_col) {
      if (cells_in_row[*std_col].empty()) have_std = false;
      else sd = parse(*std_col);
    }
    const auto key = std::make_pair(dataset_index[ds], model_index[model]);
    if (cells.count(key)) throw DataError(source + ": duplicate entry for " + ds + "/" + model);
    cells[key] = {parse(*acc_col), sd};
  }

  const auto n_d = static_cast<Eigen::Index>(table.datasets.size());
  const auto n_m = static_cast<Eigen::Index>(table.models.size());
  table.accuracy = RealMatrix::Constant(n_d, n_m, std::nan(""));
  RealMatrix sd = RealMatrix::Constant(n_d, n_m, std::nan(""));
  std::vector<std::string> missing;
  for (Eigen::Index d = 0; d < n_d; ++d)
    for (Eigen::Index m = 0; m < n_m; ++m) {
      const auto it = cells.find({static_cast<std::size_t>(d), static_cast<std::size_t>(m)});
      if (it == cells.end()) {
        missing.push_back(table.datasets[static_cast<std::size_t>(d)] + "/" + table.models[static_cast<std::size_t>(m)]);
        continue;
      }
      table.accuracy(d, m) = it->second.first;
      sd(d, m) = it->second.second;
    }
  if (!missing.empty()) {
    std::string msg = source + ": results table is incomplete; missing cells:";
    for (const auto& cell : missing) msg += "\n  " + cell;
    throw DataError(msg);
  }
  if (have_std && all_finite(sd)) table.stddev = sd;
  return table;
}

AccuracyTable read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_results_csv(buf.str(), path.string());
}

StatsReport build_stats_report(const AccuracyTable& table, double alpha_level) {
  StatsReport rep;
  rep.table = table;
  rep.avg_ranks = average_ranks(table);
  if (table.datasets.size() >= 2 && table.models.size() >= 2)
    rep.friedman = friedman(rep.avg_ranks, table.models.size(), table.datasets.size(), alpha_level);
  return rep;
}

std::string stats_text(const StatsReport& rep) {
  const auto& t = rep.table;
  std::ostringstream out;
  std::size_t width = 18;
  for (const auto& m : t.models) width = std::max(width, m.size() + 2);
  const auto cell = [&](const std::string& s) {
    out << s;
    for (std::size_t i = s.size(); i < width; ++i) out << ' ';
  };
  const auto row = [&](const std::string& label, const RealVector& values, int digits) {
    cell(label);
    for (Eigen::Index i = 0; i < values.size(); ++i) cell(format_fixed(values(i), digits));
    out << '\n';
  };
  cell("Metric | Model");
  for (const auto& m : t.models) cell(m);
  out << '\n';
  row("Average Accuracy", t.accuracy.colwise().mean().transpose(), 4);
  row("Average Rank", rep.avg_ranks, 4);
  if (t.stddev) row("Average Std. Dvn.", t.stddev->colwise().mean().transpose(), 4);
  out << "\nModels: " << t.models.size() << ", datasets: " << t.datasets.size() << '\n';
  if (!rep.friedman) {
    out << "Friedman test skipped: needs at least two datasets and two models.\n";
    return out.str();
  }
  const auto& f = *rep.friedman;
  out << "Friedman chi2_F = " << format_fixed(f.chi2, 4) << " (dof " << format_fixed(f.dof1, 0) << ")\n";
  out << "Iman-Davenport F_F = " << format_fixed(f.ff, 4) << ", critical F(" << format_fixed(f.dof1, 0) << ", "
      << format_fixed(f.dof2, 0) << ") = " << format_fixed(f.critical_f, 4) << " at alpha = " << f.alpha_level
      << (f.degenerate ? " [degenerate denominator]" : "") << '\n';
  out << "Null hypothesis " << (f.reject ? "rejected" : "not rejected") << '\n';
  if (f.nemenyi_cd > 0.0) {
    out << "Nemenyi C.D. = " << format_fixed(f.nemenyi_cd, 4) << '\n';
    for (std::size_t a = 0; a < t.models.size(); ++a) {
      const auto beaten = beaten_by(f.pairwise, t.models, a);
      if (beaten.empty()) continue;
      out << "  " << t.models[a] << " significantly better than:";
      for (const auto& b : beaten) out << ' ' << b;
      out << '\n';
    }
  }
  return out.str();
}

json stats_json(const StatsReport& rep) {
  const auto& t = rep.table;
  json j{{"schema", kStatsSchema},
         {"models", t.models},
         {"datasets", t.datasets},
         {"average_accuracy", std::vector<double>()},
         {"average_rank", std::vector<double>(rep.avg_ranks.data(), rep.avg_ranks.data() + rep.avg_ranks.size())}};
  const RealVector mean_acc = t.accuracy.colwise().mean().transpose();
  j["average_accuracy"] = std::vector<double>(mean_acc.data(), mean_acc.data() + mean_acc.size());
  if (t.stddev) {
    const RealVector mean_sd = t.stddev->colwise().mean().transpose();
    j["average_std"] = std::vector<double>(mean_sd.data(), mean_sd.data() + mean_sd.size());
  }
  if (rep.friedman) {
    const auto& f = *rep.friedman;
    json pairwise = json::array();
    for (Eigen::Index a = 0; a < f.pairwise.rows(); ++a) {
      std::vector<bool> row;
      for (Eigen::Index b = 0; b < f.pairwise.cols(); ++b) row.push_back(f.pairwise(a, b));
      pairwise.push_back(row);
    }
    j["friedman"] = {{"chi2", f.chi2},
                     {"ff", f.degenerate ? json(nullptr) : json(f.ff)},
                     {"dof", {f.dof1, f.dof2}},
                     {"alpha_level", f.alpha_level},
                     {"critical_f", f.critical_f},
                     {"reject", f.reject},
                     {"degenerate", f.degenerate},
                     {"nemenyi_cd", f.nemenyi_cd},
                     {"significantly_better", pairwise}};
  }
  return j;
}

}  // namespace rvflx
