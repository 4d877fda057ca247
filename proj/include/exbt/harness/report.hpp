#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "exbt/harness/pipeline.hpp"

namespace exbt::harness {

struct FoldRow {
  int fold = 0;
  bool failed = false;
  double profit = 0.0;
  double excess_profit = 0.0;
  std::optional<double> sharpe;
};

/// Per-fold results of one model variant.
struct VariantResult {
  std::string name;
  std::vector<FoldRow> folds;
};

VariantResult variant_from(const std::string& name, const CvReport& report);
/// Reads the fold rows of a metrics.csv written by write_metrics.
VariantResult read_metrics_csv(const std::filesystem::path& path, std::string name = {});

/// Sample quantile with linear interpolation between order statistics
/// (h = (n - 1) p). Throws DataError on an empty sample.
double quantile(std::vector<double> values, double p);

struct Distribution {
  int n = 0;
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0, mean = 0.0;
};

Distribution summarise(const std::vector<double>& values);

struct SplitTable {
  std::string metric;  // profit, excess_profit, sharpe
  std::vector<int> folds;
  std::vector<std::string> variants;
  /// values[f][v], empty when the fold failed or the value is undefined.
  std::vector<std::vector<std::optional<double>>> values;
  /// Across variants, per fold.
  std::vector<std::optional<Distribution>> per_fold;
  /// Across folds, per variant.
  std::vector<std::optional<double>> variant_mean;
};

std::vector<SplitTable> profit_by_split(const std::vector<VariantResult>& variants);

/// Writes profit_by_split.csv, profit_by_split.svg and report.md into `dir`.
void profit_by_split_report(const std::vector<VariantResult>& variants, const std::filesystem::path& dir);

}  // namespace exbt::harness
