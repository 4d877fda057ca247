#include "exbt/data/panel.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "exbt/error.hpp"

namespace exbt::data {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string_view to_string(Role r) {
  switch (r) {
    case Role::price: return "price";
    case Role::feature: return "feature";
    case Role::nlp_score: return "nlp_score";
  }
  return "feature";
}

Panel::Panel(std::vector<Date> dates, std::vector<Column> columns)
    : dates_(std::move(dates)), columns_(std::move(columns)) {
  for (std::size_t i = 1; i < dates_.size(); ++i) {
    if (dates_[i] - dates_[i - 1] != std::chrono::days{1}) {
      throw DataError("panel dates must advance by exactly one day at " +
                      format_date(dates_[i]));
    }
  }
  std::set<std::string_view> seen;
  int prices = 0;
  for (const auto& c : columns_) {
    if (!seen.insert(c.name).second) throw DataError("duplicate column '" + c.name + "'");
    if (std::size_t(c.values.size()) != dates_.size()) {
      throw DataError("column '" + c.name + "' length does not match the date index");
    }
    if (c.role == Role::price) ++prices;
  }
  if (prices != 1) throw DataError("panel needs exactly one price column");
}

std::vector<std::string> Panel::column_names() const {
  std::vector<std::string> out;
  for (const auto& c : columns_) out.push_back(c.name);
  return out;
}

std::vector<std::string> Panel::feature_names() const {
  std::vector<std::string> out;
  for (const auto& c : columns_) {
    if (c.role != Role::price) out.push_back(c.name);
  }
  return out;
}

bool Panel::has_column(std::string_view name) const {
  return std::any_of(columns_.begin(), columns_.end(),
                     [&](const Column& c) { return c.name == name; });
}

const Column& Panel::column(std::string_view name) const {
  for (const auto& c : columns_) {
    if (c.name == name) return c;
  }
  throw DataError("unknown column '" + std::string(name) + "'");
}

const std::string& Panel::price_column() const {
  for (const auto& c : columns_) {
    if (c.role == Role::price) return c.name;
  }
  throw DataError("panel has no price column");
}

std::size_t Panel::first_observed(std::string_view name) const {
  const auto& v = values(name);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!is_missing(v[i])) return std::size_t(i);
  }
  return size();
}

std::size_t Panel::index_of(Date d) const {
  if (dates_.empty() || d < dates_.front() || d > dates_.back()) {
    throw DataError("date " + format_date(d) + " lies outside the panel span");
  }
  return std::size_t((d - dates_.front()).count());
}

Panel Panel::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw DataError("panel slice out of range");
  std::vector<Date> dates(dates_.begin() + std::ptrdiff_t(begin),
                          dates_.begin() + std::ptrdiff_t(end));
  std::vector<Column> cols;
  cols.reserve(columns_.size());
  for (const auto& c : columns_) {
    cols.push_back({c.name, c.role, c.values.segment(Eigen::Index(begin), Eigen::Index(end - begin))});
  }
  return Panel(std::move(dates), std::move(cols));
}

Panel Panel::with_column(Column c) const {
  auto cols = columns_;
  auto it = std::find_if(cols.begin(), cols.end(), [&](const Column& x) { return x.name == c.name; });
  if (it != cols.end()) {
    *it = std::move(c);
  } else {
    cols.push_back(std::move(c));
  }
  return Panel(dates_, std::move(cols));
}

Panel Panel::without_columns(const std::vector<std::string>& names) const {
  std::vector<Column> cols;
  for (const auto& c : columns_) {
    if (std::find(names.begin(), names.end(), c.name) == names.end()) {
      cols.push_back(c);
    } else if (c.role == Role::price) {
      throw DataError("the price column cannot be dropped");
    }
  }
  return Panel(dates_, std::move(cols));
}

bool operator==(const Panel& a, const Panel& b) {
  if (a.dates_ != b.dates_ || a.columns_.size() != b.columns_.size()) return false;
  for (std::size_t j = 0; j < a.columns_.size(); ++j) {
    const auto& x = a.columns_[j];
    const auto& y = b.columns_[j];
    if (x.name != y.name || x.role != y.role) return false;
    for (Eigen::Index i = 0; i < x.values.size(); ++i) {
      bool mx = is_missing(x.values[i]), my = is_missing(y.values[i]);
      if (mx != my || (!mx && x.values[i] != y.values[i])) return false;
    }
  }
  return true;
}

Panel load_panel(const std::filesystem::path& path, std::string_view price_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open panel file " + path.string());
  CsvReader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header)) throw DataError(path.string() + ": empty file");
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);

  std::size_t date_col = header.size();
  std::set<std::string> names;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (!names.insert(header[j]).second) {
      throw DataError(path.string() + ": duplicate column '" + header[j] + "'");
    }
    if (header[j] == "date") date_col = j;
  }
  if (date_col == header.size()) throw DataError(path.string() + ": no 'date' column");
  if (!names.contains(std::string(price_column))) {
    throw DataError(path.string() + ": price column '" + std::string(price_column) + "' absent");
  }

  std::vector<Date> raw_dates;
  std::vector<std::vector<double>> raw(header.size());
  std::vector<std::string> row;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    std::string where = path.string() + ":" + std::to_string(reader.line());
    if (row.size() != header.size()) {
      throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(row.size()));
    }
    auto d = parse_date(row[date_col]);
    if (!d) throw DataError(where + ": unparsable date '" + row[date_col] + "'");
    if (!raw_dates.empty()) {
      if (*d == raw_dates.back()) throw DataError(where + ": duplicate date " + row[date_col]);
      if (*d < raw_dates.back()) throw DataError(where + ": non-increasing date " + row[date_col]);
    }
    raw_dates.push_back(*d);
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (j == date_col) continue;
      auto v = parse_cell(row[j]);
      if (!v) {
        throw DataError(where + ": column '" + header[j] + "': unparsable value '" + row[j] + "'");
      }
      raw[j].push_back(*v);
    }
  }
  if (raw_dates.empty()) throw DataError(path.string() + ": no data rows");

  // Materialise calendar gaps as all-missing rows.
  const auto n = std::size_t((raw_dates.back() - raw_dates.front()).count()) + 1;
  std::vector<Date> dates(n);
  for (std::size_t i = 0; i < n; ++i) dates[i] = raw_dates.front() + std::chrono::days{i};

  std::vector<Column> cols;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j == date_col) continue;
    Column c;
    c.name = header[j];
    c.role = header[j] == price_column   ? Role::price
             : ends_with(c.name, "_score") ? Role::nlp_score
                                           : Role::feature;
    c.values = Eigen::VectorXd::Constant(Eigen::Index(n), kNaN);
    for (std::size_t r = 0; r < raw_dates.size(); ++r) {
      c.values[(raw_dates[r] - raw_dates.front()).count()] = raw[j][r];
    }
    cols.push_back(std::move(c));
  }
  return Panel(std::move(dates), std::move(cols));
}

void save_panel(const Panel& panel, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "date";
  for (const auto& c : panel.columns()) out << ',' << csv_escape(c.name);
  out << '\n';
  for (std::size_t i = 0; i < panel.size(); ++i) {
    out << format_date(panel.dates()[i]);
    for (const auto& c : panel.columns()) out << ',' << format_double(c.values[Eigen::Index(i)]);
    out << '\n';
  }
}

ExclusionList load_exclusions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open exclusion file " + path.string());
  CsvReader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row) || row != std::vector<std::string>{"column", "start_date", "end_date"}) {
    throw DataError(path.string() + ": header must be column,start_date,end_date");
  }
  ExclusionList out;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    std::string where = path.string() + ":" + std::to_string(reader.line());
    if (row.size() != 3) throw DataError(where + ": expected 3 fields");
    auto s = parse_date(row[1]);
    auto e = parse_date(row[2]);
    if (!s || !e) throw DataError(where + ": unparsable date");
    if (*e < *s) throw DataError(where + ": end_date before start_date");
    out.push_back({row[0], *s, *e});
  }
  return out;
}

Panel apply_exclusions(const Panel& panel, const ExclusionList& excl) {
  auto cols = panel.columns();
  for (const auto& x : excl) {
    auto it = std::find_if(cols.begin(), cols.end(), [&](const Column& c) { return c.name == x.column; });
    if (it == cols.end()) throw DataError("exclusion names unknown column '" + x.column + "'");
    std::size_t b = panel.index_of(x.start);
    std::size_t e = panel.index_of(x.end);
    it->values.segment(Eigen::Index(b), Eigen::Index(e - b + 1)).setConstant(kNaN);
  }
  return Panel(panel.dates(), std::move(cols));
}

Eigen::VectorXd impute_forward(const Eigen::VectorXd& column) {
  Eigen::VectorXd out = column;
  for (Eigen::Index i = 1; i < out.size(); ++i) {
    if (is_missing(out[i])) out[i] = out[i - 1];
  }
  return out;
}

Panel impute_forward(const Panel& panel) {
  auto cols = panel.columns();
  for (auto& c : cols) c.values = impute_forward(c.values);
  return Panel(panel.dates(), std::move(cols));
}

}  // namespace exbt::data
