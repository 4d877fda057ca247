#include "exbt/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "exbt/data/csv.hpp"
#include "exbt/error.hpp"

namespace exbt::harness {

namespace {

std::string opt(const std::optional<double>& v) { return v ? data::format_double(*v) : std::string(); }

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw DataError("cannot write " + p.string());
  return out;
}

void write_csv(const std::vector<SplitTable>& tables, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  const auto& variants = tables.front().variants;
  out << "metric,fold";
  for (const auto& v : variants) out << ',' << data::csv_escape(v);
  out << ",n,min,q1,median,q3,max,mean\n";
  for (const auto& t : tables) {
    for (std::size_t f = 0; f < t.folds.size(); ++f) {
      out << t.metric << ',' << t.folds[f];
      for (const auto& v : t.values[f]) out << ',' << opt(v);
      if (const auto& d = t.per_fold[f]) {
        out << ',' << d->n << ',' << data::format_double(d->min) << ',' << data::format_double(d->q1) << ','
            << data::format_double(d->median) << ',' << data::format_double(d->q3) << ','
            << data::format_double(d->max) << ',' << data::format_double(d->mean) << '\n';
      } else {
        out << ",0,,,,,,\n";
      }
    }
    out << t.metric << ",mean";
    for (const auto& m : t.variant_mean) out << ',' << opt(m);
    out << ",,,,,,,\n";
  }
}

void write_svg(const SplitTable& t, const std::filesystem::path& path) {
  double lo = 0.0, hi = 0.0;
  for (const auto& d : t.per_fold) {
    if (!d) continue;
    lo = std::min(lo, d->min);
    hi = std::max(hi, d->max);
  }
  if (hi - lo < 1e-12) hi = lo + 1.0;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const int left = 70, top = 30, plot_h = 300, slot = 60;
  const int width = left + slot * int(t.folds.size()) + 30, height = top + plot_h + 50;
  auto y = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };

  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<text x=\"" << left << "\" y=\"18\" font-size=\"13\">" << t.metric << " by split across "
      << t.variants.size() << " variant(s)</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    out << "<line x1=\"" << left - 4 << "\" y1=\"" << fixed(y(v), 2) << "\" x2=\"" << left << "\" y2=\""
        << fixed(y(v), 2) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << fixed(y(v) + 4, 2) << "\" text-anchor=\"end\">" << fixed(v, 3)
        << "</text>\n";
  }
  if (lo < 0.0 && hi > 0.0) {
    out << "<line x1=\"" << left << "\" y1=\"" << fixed(y(0), 2) << "\" x2=\"" << width - 30 << "\" y2=\""
        << fixed(y(0), 2) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (std::size_t f = 0; f < t.folds.size(); ++f) {
    const double cx = left + slot * (double(f) + 0.5);
    out << "<text x=\"" << fixed(cx, 2) << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\">"
        << t.folds[f] << "</text>\n";
    const auto& d = t.per_fold[f];
    if (!d) continue;
    const double bw = 18;
    out << "<line x1=\"" << fixed(cx, 2) << "\" y1=\"" << fixed(y(d->max), 2) << "\" x2=\"" << fixed(cx, 2)
        << "\" y2=\"" << fixed(y(d->min), 2) << "\" stroke=\"black\"/>\n";
    out << "<rect x=\"" << fixed(cx - bw, 2) << "\" y=\"" << fixed(y(d->q3), 2) << "\" width=\"" << 2 * bw
        << "\" height=\"" << fixed(std::max(1.0, y(d->q1) - y(d->q3)), 2)
        << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << fixed(cx - bw, 2) << "\" y1=\"" << fixed(y(d->median), 2) << "\" x2=\""
        << fixed(cx + bw, 2) << "\" y2=\"" << fixed(y(d->median), 2) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
  }
  out << "<text x=\"" << left + slot * int(t.folds.size()) / 2 << "\" y=\"" << height - 8
      << "\" text-anchor=\"middle\">cross-validation split</text>\n";
  out << "</svg>\n";
}

void write_markdown(const std::vector<SplitTable>& tables, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "# Profit by cross-validation split\n\n";
  for (const auto& t : tables) {
    out << "## " << t.metric << "\n\n| fold |";
    for (const auto& v : t.variants) out << ' ' << v << " |";
    out << " min | q1 | median | q3 | max |\n|---|";
    for (std::size_t i = 0; i < t.variants.size() + 5; ++i) out << "---|";
    out << '\n';
    for (std::size_t f = 0; f < t.folds.size(); ++f) {
      out << "| " << t.folds[f] << " |";
      for (const auto& v : t.values[f]) out << ' ' << (v ? fixed(*v) : "n/a") << " |";
      if (const auto& d = t.per_fold[f]) {
        out << ' ' << fixed(d->min) << " | " << fixed(d->q1) << " | " << fixed(d->median) << " | "
            << fixed(d->q3) << " | " << fixed(d->max) << " |\n";
      } else {
        out << " | | | | |\n";
      }
    }
    out << "| mean |";
    for (const auto& m : t.variant_mean) out << ' ' << (m ? fixed(*m) : "n/a") << " |";
    out << " | | | | |\n\n";
  }
  out << "![profit by split](profit_by_split.svg)\n";
}

}  // namespace

VariantResult variant_from(const std::string& name, const CvReport& report) {
  VariantResult v;
  v.name = name;
  for (const auto& f : report.folds) {
    v.folds.push_back({f.fold, f.failed, f.metrics.profit, f.metrics.excess_profit, f.metrics.sharpe});
  }
  return v;
}

VariantResult read_metrics_csv(const std::filesystem::path& path, std::string name) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  data::CsvReader reader(in);
  std::vector<std::string> header, row;
  if (!reader.next(header)) throw DataError(path.string() + ": empty metrics file");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* k : {"fold", "status", "profit", "excess_profit", "sharpe", "model", "target"}) {
    if (!col.count(k)) throw DataError(path.string() + ": missing column '" + std::string(k) + "'");
  }
  VariantResult v;
  v.name = std::move(name);
  auto number = [&](const std::string& s, const char* what) {
    const auto x = data::parse_cell(s);
    if (!x) throw DataError(path.string() + ":" + std::to_string(reader.line()) + ": bad " + what);
    return *x;
  };
  while (reader.next(row)) {
    if (row.size() != header.size()) throw DataError(path.string() + ":" + std::to_string(reader.line()) + ": ragged row");
    if (row[col["fold"]] == "mean") continue;
    if (v.name.empty()) v.name = row[col["model"]] + "/" + row[col["target"]];
    FoldRow f;
    f.fold = int(number(row[col["fold"]], "fold"));
    f.failed = row[col["status"]] != "ok";
    if (!f.failed) {
      f.profit = number(row[col["profit"]], "profit");
      f.excess_profit = number(row[col["excess_profit"]], "excess_profit");
      const double s = number(row[col["sharpe"]], "sharpe");
      if (!std::isnan(s)) f.sharpe = s;
    }
    v.folds.push_back(f);
  }
  return v;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw DataError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (double(values.size()) - 1.0) * p;
  const std::size_t lo = std::size_t(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - double(lo)) * (values[hi] - values[lo]);
}

Distribution summarise(const std::vector<double>& values) {
  Distribution d;
  d.n = int(values.size());
  d.min = quantile(values, 0.0);
  d.q1 = quantile(values, 0.25);
  d.median = quantile(values, 0.5);
  d.q3 = quantile(values, 0.75);
  d.max = quantile(values, 1.0);
  double s = 0.0;
  for (double x : values) s += x;
  d.mean = s / double(values.size());
  return d;
}

std::vector<SplitTable> profit_by_split(const std::vector<VariantResult>& variants) {
  if (variants.empty()) throw DataError("report: no results given");
  std::vector<int> folds;
  for (const auto& v : variants) {
    for (const auto& f : v.folds) folds.push_back(f.fold);
  }
  std::sort(folds.begin(), folds.end());
  folds.erase(std::unique(folds.begin(), folds.end()), folds.end());

  std::vector<SplitTable> tables;
  for (const char* metric : {"profit", "excess_profit", "sharpe"}) {
    SplitTable t;
    t.metric = metric;
    t.folds = folds;
    for (const auto& v : variants) t.variants.push_back(v.name);
    t.values.assign(folds.size(), std::vector<std::optional<double>>(variants.size()));
    for (std::size_t vi = 0; vi < variants.size(); ++vi) {
      for (const auto& f : variants[vi].folds) {
        if (f.failed) continue;
        const std::size_t fi = std::size_t(std::lower_bound(folds.begin(), folds.end(), f.fold) - folds.begin());
        const std::string m = metric;
        t.values[fi][vi] = m == "profit" ? std::optional(f.profit)
                           : m == "excess_profit" ? std::optional(f.excess_profit)
                                                  : f.sharpe;
      }
    }
    for (std::size_t fi = 0; fi < folds.size(); ++fi) {
      std::vector<double> xs;
      for (const auto& x : t.values[fi]) {
        if (x) xs.push_back(*x);
      }
      t.per_fold.push_back(xs.empty() ? std::nullopt : std::optional(summarise(xs)));
    }
    for (std::size_t vi = 0; vi < variants.size(); ++vi) {
      double s = 0.0;
      int n = 0;
      for (std::size_t fi = 0; fi < folds.size(); ++fi) {
        if (t.values[fi][vi]) {
          s += *t.values[fi][vi];
          ++n;
        }
      }
      t.variant_mean.push_back(n ? std::optional(s / n) : std::nullopt);
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

void profit_by_split_report(const std::vector<VariantResult>& variants, const std::filesystem::path& dir) {
  const std::vector<SplitTable> tables = profit_by_split(variants);
  std::filesystem::create_directories(dir);
  write_csv(tables, dir / "profit_by_split.csv");
  write_svg(tables.front(), dir / "profit_by_split.svg");
  write_markdown(tables, dir / "report.md");
}

}  // namespace exbt::harness
