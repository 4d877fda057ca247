#include "exbt/prep/transforms.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include "exbt/error.hpp"

namespace exbt::prep {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Eigen::Index first_finite(const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isfinite(v[i])) return i;
  }
  return v.size();
}

FeatureMeta decide(const std::string& name, const Eigen::VectorXd& column, bool is_price,
                   double alpha, int max_diff) {
  FeatureMeta m;
  m.column = name;
  m.alpha = alpha;
  const Eigen::Index start = first_finite(column);
  if (start == column.size()) throw DataError("column '" + name + "' is entirely missing");
  Eigen::VectorXd level = column.tail(column.size() - start);
  if (!level.allFinite()) {
    throw DataError("column '" + name + "' has interior gaps; impute before transforming");
  }
  if (level.maxCoeff() == level.minCoeff()) {
    m.constant = true;
    return m;
  }

  const bool positive = level.minCoeff() > 0.0;
  if (is_price) {
    if (!positive) throw DataError("price column '" + name + "' must be strictly positive");
    m.logged = true;
  } else {
    m.het = stats::het_vote(level, alpha);
    if (m.het.heteroskedastic()) {
      if (positive) {
        m.logged = true;
      } else {
        m.log_blocked = true;
      }
    }
  }
  if (m.logged) level = level.array().log();

  for (;;) {
    m.unit_root = stats::unit_root_vote(level, alpha);
    if (!m.unit_root.has_unit_root()) break;
    if (m.order_of_integration == max_diff) {
      m.diff_cap_reached = true;
      break;
    }
    level = (level.tail(level.size() - 1) - level.head(level.size() - 1)).eval();
    ++m.order_of_integration;
  }
  return m;
}

}  // namespace

Differenced difference(const Eigen::VectorXd& v, int order) {
  Differenced d;
  d.first = first_finite(v);
  d.values = v;
  for (int k = 0; k < order; ++k) {
    const Eigen::Index s = d.first + k;
    if (s >= d.values.size()) throw DataError("difference: series too short");
    d.initial.push_back(d.values[s]);
    Eigen::VectorXd next = Eigen::VectorXd::Constant(v.size(), kNaN);
    for (Eigen::Index i = s + 1; i < v.size(); ++i) next[i] = d.values[i] - d.values[i - 1];
    d.values = std::move(next);
  }
  return d;
}

Eigen::VectorXd integrate(const Differenced& d) {
  Eigen::VectorXd v = d.values;
  for (int k = int(d.initial.size()) - 1; k >= 0; --k) {
    const Eigen::Index s = d.first + k;
    v[s] = d.initial[std::size_t(k)];
    for (Eigen::Index i = s + 1; i < v.size(); ++i) v[i] += v[i - 1];
  }
  return v;
}

std::vector<FeatureMeta> fit_transform_plan(const data::Panel& panel, double alpha, int max_diff) {
  if (max_diff < 0) throw ConfigError("max_diff must be nonnegative");
  std::vector<FeatureMeta> out;
  for (const auto& c : panel.columns()) {
    out.push_back(decide(c.name, c.values, c.role == data::Role::price, alpha, max_diff));
  }
  return out;
}

data::Panel apply_transforms(const data::Panel& panel, const std::vector<FeatureMeta>& meta) {
  data::Panel out = panel;
  for (const auto& m : meta) {
    if (!panel.has_column(m.column)) continue;
    data::Column c = panel.column(m.column);
    if (m.logged) {
      const Eigen::Index s = first_finite(c.values);
      if (s < c.values.size() && c.values.tail(c.values.size() - s).minCoeff() <= 0.0) {
        throw DataError("column '" + m.column + "' turned nonpositive; cannot apply log");
      }
      c.values = c.values.array().log();
    }
    c.values = difference(c.values, m.order_of_integration).values;
    out = out.with_column(std::move(c));
  }
  return out;
}

TransformResult fit_transforms(const data::Panel& panel, double alpha, int max_diff) {
  TransformResult r;
  r.meta = fit_transform_plan(panel, alpha, max_diff);
  int trim = 0;
  for (const auto& m : r.meta) trim = std::max(trim, m.order_of_integration);
  data::Panel transformed = apply_transforms(panel, r.meta);
  r.panel = transformed.slice(std::size_t(trim), transformed.size());
  r.raw_price = panel.price().tail(Eigen::Index(panel.size()) - trim);
  return r;
}

void write_feature_meta(const std::vector<FeatureMeta>& meta, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  auto b = [](bool v) { return v ? "1" : "0"; };
  out << "column,order_of_integration,logged,adf,pp,kpss,white,bp,gq\n";
  for (const auto& m : meta) {
    out << data::csv_escape(m.column) << ',' << m.order_of_integration << ',' << b(m.logged) << ','
        << b(m.unit_root.adf) << ',' << b(m.unit_root.pp) << ',' << b(m.unit_root.kpss) << ','
        << b(m.het.white) << ',' << b(m.het.bp) << ',' << b(m.het.gq) << '\n';
  }
}

}  // namespace exbt::prep
