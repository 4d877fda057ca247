#include "exbt/granger/granger.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "exbt/error.hpp"
#include "exbt/stats/ols.hpp"

namespace exbt::granger {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Design with columns [1, y_{t-1..t-own}, x_{t-l} for l in lags] over all t
// where every entry is finite.
struct LaggedDesign {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

LaggedDesign lagged_design(const Eigen::VectorXd& y, const Eigen::VectorXd& x, int own_lags,
                           const std::vector<int>& lags) {
  if (y.size() != x.size()) throw DataError("granger: target and feature lengths differ");
  const int max_lag = lags.empty() ? 0 : *std::max_element(lags.begin(), lags.end());
  const Eigen::Index start = std::max(own_lags, max_lag);
  const Eigen::Index k = 1 + own_lags + Eigen::Index(lags.size());
  std::vector<Eigen::Index> rows;
  for (Eigen::Index t = start; t < y.size(); ++t) {
    bool ok = std::isfinite(y[t]);
    for (int j = 1; ok && j <= own_lags; ++j) ok = std::isfinite(y[t - j]);
    for (std::size_t j = 0; ok && j < lags.size(); ++j) ok = std::isfinite(x[t - lags[j]]);
    if (ok) rows.push_back(t);
  }
  LaggedDesign d;
  d.X.resize(Eigen::Index(rows.size()), k);
  d.y.resize(Eigen::Index(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto t = rows[r];
    const auto i = Eigen::Index(r);
    d.y[i] = y[t];
    d.X(i, 0) = 1.0;
    for (int j = 1; j <= own_lags; ++j) d.X(i, j) = y[t - j];
    for (std::size_t j = 0; j < lags.size(); ++j) d.X(i, 1 + own_lags + Eigen::Index(j)) = x[t - lags[j]];
  }
  return d;
}

void check_args(int lag, int own_lags) {
  if (lag < 1) throw ConfigError("granger: lag must be >= 1");
  if (own_lags < 0) throw ConfigError("granger: own_lags must be >= 0");
}

bool has_variance(const Eigen::VectorXd& v) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isfinite(v[i])) {
      lo = std::min(lo, v[i]);
      hi = std::max(hi, v[i]);
    }
  }
  return hi > lo;
}

}  // namespace

std::string_view to_string(Mode m) { return m == Mode::per_lag ? "per_lag" : "joint"; }

Mode parse_mode(std::string_view s) {
  if (s == "per_lag") return Mode::per_lag;
  if (s == "joint") return Mode::joint;
  throw ConfigError("unknown granger mode '" + std::string(s) + "'");
}

double granger_per_lag(const Eigen::VectorXd& target, const Eigen::VectorXd& feature, int lag,
                       int own_lags) {
  check_args(lag, own_lags);
  LaggedDesign d = lagged_design(target, feature, own_lags, {lag});
  if (d.y.size() <= own_lags + lag + 10) throw DataError("granger_per_lag: insufficient length");
  stats::OlsFit fit = stats::ols(d.X, d.y);
  return stats::t_pvalue(fit.t_stat(d.X.cols() - 1), double(fit.dof));
}

double granger_joint(const Eigen::VectorXd& target, const Eigen::VectorXd& feature, int max_lag,
                     int own_lags) {
  check_args(max_lag, own_lags);
  std::vector<int> lags(static_cast<std::size_t>(max_lag));
  for (int l = 1; l <= max_lag; ++l) lags[std::size_t(l - 1)] = l;
  LaggedDesign d = lagged_design(target, feature, own_lags, lags);
  if (d.y.size() <= own_lags + max_lag + 10) throw DataError("granger_joint: insufficient length");
  stats::OlsFit full = stats::ols(d.X, d.y);
  stats::OlsFit restricted = stats::ols(d.X.leftCols(1 + own_lags), d.y);
  if (full.ssr == 0.0) return restricted.ssr > 0.0 ? 0.0 : 1.0;
  const double q = max_lag;
  const double f = ((restricted.ssr - full.ssr) / q) / (full.ssr / double(full.dof));
  return stats::f_pvalue(f, q, double(full.dof));
}

std::vector<LagUnit> LagSelection::selected() const {
  std::vector<LagUnit> out;
  std::copy_if(tested.begin(), tested.end(), std::back_inserter(out),
               [](const LagUnit& u) { return u.selected; });
  return out;
}

LagSelection select_features(const data::Panel& panel, const Eigen::VectorXd& target_labels,
                             Mode mode, double alpha, int max_lag, int own_lags,
                             const std::vector<std::string>& skip) {
  if (std::size_t(target_labels.size()) != panel.size()) {
    throw DataError("select_features: target not aligned with panel");
  }
  LagSelection sel;
  sel.mode = mode;
  sel.max_lag = max_lag;
  sel.alpha = alpha;

  // y'[s] = target[s-1]: the move after day s-1, observed at s.
  const Eigen::Index n = target_labels.size();
  Eigen::VectorXd shifted = Eigen::VectorXd::Constant(n, kNaN);
  if (n > 1) shifted.tail(n - 1) = target_labels.head(n - 1);

  auto tested = [](auto&& test) {
    try {
      return test();
    } catch (const NumericalError&) {
      return 1.0;
    }
  };

  auto names = panel.column_names();
  std::sort(names.begin(), names.end());
  for (const auto& name : names) {
    if (std::find(skip.begin(), skip.end(), name) != skip.end()) continue;
    const Eigen::VectorXd& x = panel.values(name);
    const bool usable = has_variance(x);
    if (mode == Mode::per_lag) {
      for (int lag = 1; lag <= max_lag; ++lag) {
        LagUnit u{name, lag, 1.0, false};
        if (usable) u.p_value = tested([&] { return granger_per_lag(shifted, x, lag, own_lags); });
        u.selected = u.p_value <= alpha;
        sel.tested.push_back(u);
      }
    } else {
      LagUnit u{name, 0, 1.0, false};
      if (usable) u.p_value = tested([&] { return granger_joint(shifted, x, max_lag, own_lags); });
      u.selected = u.p_value <= alpha;
      sel.tested.push_back(u);
    }
  }
  return sel;
}

void write_selection(const LagSelection& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "column,lag,p_value,selected\n";
  for (const auto& u : s.tested) {
    out << data::csv_escape(u.column) << ',';
    if (s.mode == Mode::per_lag) out << u.lag;
    out << ',' << data::format_double(u.p_value) << ',' << (u.selected ? 1 : 0) << '\n';
  }
}

}  // namespace exbt::granger
