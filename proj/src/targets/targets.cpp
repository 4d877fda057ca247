#include "exbt/targets/targets.hpp"

#include <fstream>
#include <functional>
#include <limits>

#include "exbt/error.hpp"

namespace exbt::targets {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string_view to_string(TargetKind k) {
  switch (k) {
    case TargetKind::continuous_return: return "continuous_return";
    case TargetKind::binary_updown: return "binary_updown";
    case TargetKind::extrema_pair: return "extrema_pair";
  }
  return "binary_updown";
}

TargetKind parse_target_kind(std::string_view s) {
  if (s == "continuous_return" || s == "continuous") return TargetKind::continuous_return;
  if (s == "binary_updown" || s == "binary") return TargetKind::binary_updown;
  if (s == "extrema_pair" || s == "extrema") return TargetKind::extrema_pair;
  throw ConfigError("unknown target kind '" + std::string(s) + "'");
}

Eigen::VectorXd TargetSeries::labels(int which) const {
  const Eigen::VectorXd& src =
      kind == TargetKind::extrema_pair ? (which == 0 ? is_min : is_max) : values;
  return defined.select(src, Eigen::VectorXd::Constant(src.size(), kNaN));
}

TargetSeries continuous_return_target(const Eigen::VectorXd& price) {
  const Eigen::Index n = price.size();
  if (n < 2) throw DataError("continuous_return_target: need at least two prices");
  if (!(price.array() > 0.0).all()) {
    throw DataError("continuous_return_target: prices must be strictly positive");
  }
  TargetSeries t;
  t.kind = TargetKind::continuous_return;
  t.values = Eigen::VectorXd::Constant(n, kNaN);
  t.values.head(n - 1) = price.tail(n - 1).array().log() - price.head(n - 1).array().log();
  t.defined = Mask::Constant(n, true);
  t.defined[n - 1] = false;
  return t;
}

TargetSeries binary_updown_target(const Eigen::VectorXd& price) {
  const Eigen::Index n = price.size();
  if (n < 2) throw DataError("binary_updown_target: need at least two prices");
  TargetSeries t;
  t.kind = TargetKind::binary_updown;
  t.values = Eigen::VectorXd::Constant(n, kNaN);
  t.values.head(n - 1) = (price.tail(n - 1).array() > price.head(n - 1).array()).cast<double>();
  t.defined = Mask::Constant(n, true);
  t.defined[n - 1] = false;
  return t;
}

TargetSeries extrema_targets(const Eigen::VectorXd& price, int w) {
  const Eigen::Index n = price.size();
  if (w < 1) throw ConfigError("extrema_targets: window must be >= 1");
  if (n < 2 * w + 1) {
    throw DataError("extrema_targets: series shorter than 2w+1 (" + std::to_string(n) + " < " +
                    std::to_string(2 * w + 1) + ")");
  }
  const Eigen::VectorXd lo = sliding_extreme(price, w, std::less<double>{});
  const Eigen::VectorXd hi = sliding_extreme(price, w, std::greater<double>{});

  TargetSeries t;
  t.kind = TargetKind::extrema_pair;
  t.window = w;
  t.is_min = Eigen::VectorXd::Zero(n);
  t.is_max = Eigen::VectorXd::Zero(n);
  t.defined = Mask::Constant(n, false);
  for (Eigen::Index i = w; i < n - w; ++i) {
    // lo[i-1] covers [i-w, i-1]; lo[i+w] covers [i+1, i+w].
    const double left_min = lo[i - 1], right_min = lo[i + w];
    const double left_max = hi[i - 1], right_max = hi[i + w];
    t.defined[i] = true;
    t.is_min[i] = price[i] < left_min && price[i] < right_min;
    t.is_max[i] = price[i] > left_max && price[i] > right_max;
  }
  return t;
}

TargetSeries make_target(TargetKind kind, const Eigen::VectorXd& price, int window) {
  switch (kind) {
    case TargetKind::continuous_return: return continuous_return_target(price);
    case TargetKind::binary_updown: return binary_updown_target(price);
    case TargetKind::extrema_pair: return extrema_targets(price, window);
  }
  throw ConfigError("unknown target kind");
}

ClassWeights class_weights(const Eigen::VectorXd& labels) {
  double n = 0, pos = 0;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (std::isnan(labels[i])) continue;
    n += 1;
    pos += labels[i] > 0.5;
  }
  const double neg = n - pos;
  if (pos == 0 || neg == 0) throw DataError("class_weights: labels contain a single class");
  return {n / (2.0 * pos), n / (2.0 * neg)};
}

void write_targets(const TargetSeries& t, const std::vector<data::Date>& dates,
                   const std::filesystem::path& path) {
  if (std::size_t(t.size()) != dates.size()) throw DataError("write_targets: date count mismatch");
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  const auto kind = to_string(t.kind);
  if (t.kind == TargetKind::extrema_pair) {
    out << "date,kind,is_min,is_max,defined\n";
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      out << data::format_date(dates[std::size_t(i)]) << ',' << kind << "_w" << t.window << ','
          << int(t.is_min[i]) << ',' << int(t.is_max[i]) << ',' << int(t.defined[i]) << '\n';
    }
  } else {
    out << "date,kind,value\n";
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      out << data::format_date(dates[std::size_t(i)]) << ',' << kind << ','
          << (t.defined[i] ? data::format_double(t.values[i]) : std::string()) << '\n';
    }
  }
}

}  // namespace exbt::targets
