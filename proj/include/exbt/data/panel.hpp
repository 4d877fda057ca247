#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "exbt/data/csv.hpp"

namespace exbt::data {

enum class Role { price, feature, nlp_score };

std::string_view to_string(Role r);

/// Missing cells are stored as quiet NaN.
inline bool is_missing(double v) { return std::isnan(v); }

struct Column {
  std::string name;
  Role role = Role::feature;
  Eigen::VectorXd values;
};

/// Date-indexed daily table of named numeric columns. Immutable once built:
/// every transformation returns a new Panel.
///
/// Invariants checked on construction: dates strictly increasing with a
/// step of exactly one day, all columns as long as the date index, unique
/// column names, exactly one price column.
class Panel {
 public:
  Panel() = default;
  Panel(std::vector<Date> dates, std::vector<Column> columns);

  std::size_t size() const { return dates_.size(); }
  const std::vector<Date>& dates() const { return dates_; }
  const std::vector<Column>& columns() const { return columns_; }
  std::vector<std::string> column_names() const;
  /// Every non-price column, in file order.
  std::vector<std::string> feature_names() const;

  bool has_column(std::string_view name) const;
  const Column& column(std::string_view name) const;
  const Eigen::VectorXd& values(std::string_view name) const { return column(name).values; }
  const std::string& price_column() const;
  const Eigen::VectorXd& price() const { return values(price_column()); }

  /// Index of the first observed value in the column, or size() if none.
  std::size_t first_observed(std::string_view name) const;
  /// Position of `d` in the date index; throws DataError if outside the span.
  std::size_t index_of(Date d) const;

  /// Rows [begin, end).
  Panel slice(std::size_t begin, std::size_t end) const;
  /// Copy with one column's values replaced (or appended when new).
  Panel with_column(Column c) const;
  /// Copy without the named columns. The price column cannot be dropped.
  Panel without_columns(const std::vector<std::string>& names) const;

  friend bool operator==(const Panel& a, const Panel& b);

 private:
  std::vector<Date> dates_;
  std::vector<Column> columns_;
};

/// Columns whose name ends in `_score` are tagged nlp_score, the named
/// price column is tagged price, everything else is a feature.
Panel load_panel(const std::filesystem::path& path, std::string_view price_column);
void save_panel(const Panel& panel, const std::filesystem::path& path);

struct Exclusion {
  std::string column;
  Date start;
  Date end;  // inclusive
};
using ExclusionList = std::vector<Exclusion>;

ExclusionList load_exclusions(const std::filesystem::path& path);
/// Sets the listed cells to missing.
Panel apply_exclusions(const Panel& panel, const ExclusionList& excl);

/// Previous-day fill. Leading gaps stay missing.
Panel impute_forward(const Panel& panel);
Eigen::VectorXd impute_forward(const Eigen::VectorXd& column);

}  // namespace exbt::data
