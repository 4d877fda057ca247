#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>
#include <unistd.h>

#include "exbt/data/csv.hpp"
#include "exbt/data/panel.hpp"
#include "exbt/harness/cv.hpp"

namespace exbt::testing {

inline std::map<std::string, Eigen::VectorXd> read_columns(const std::filesystem::path& path) {
  std::ifstream in(path);
  data::CsvReader r(in);
  std::vector<std::string> header, row;
  r.next(header);
  std::vector<std::vector<double>> cols(header.size());
  while (r.next(row)) {
    for (std::size_t i = 0; i < row.size(); ++i) cols[i].push_back(*data::parse_cell(row[i]));
  }
  std::map<std::string, Eigen::VectorXd> out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    out[header[i]] = Eigen::Map<Eigen::VectorXd>(cols[i].data(), Eigen::Index(cols[i].size()));
  }
  return out;
}

inline std::map<std::string, Eigen::VectorXd> oracle_series() {
  return read_columns(std::filesystem::path(EXBT_TEST_DATA) / "series.csv");
}

inline Eigen::VectorXd normal_noise(std::mt19937_64& rng, Eigen::Index n, double sd = 1.0) {
  std::normal_distribution<double> d(0.0, sd);
  Eigen::VectorXd v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

inline Eigen::VectorXd cumsum(const Eigen::VectorXd& v) {
  Eigen::VectorXd out(v.size());
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = s += v[i];
  return out;
}

/// Geometric random walk started at 100.
inline Eigen::VectorXd random_prices(std::mt19937_64& rng, Eigen::Index n, double vol = 0.02) {
  return (cumsum(normal_noise(rng, n, vol)).array().exp() * 100.0).matrix();
}

inline std::vector<data::Date> daily_dates(Eigen::Index n, const char* start = "2019-01-01") {
  std::vector<data::Date> d;
  for (Eigen::Index i = 0; i < n; ++i) d.push_back(*data::parse_date(start) + std::chrono::days(i));
  return d;
}

/// Geometric walk whose feature `signal` carries the sign of the next move
/// with magnitude in [0.5, 1.5), plus an unrelated `volume` column. The move
/// after the first day of every test block of a k-fold plan is up.
inline data::Panel planted_panel(std::uint64_t seed, Eigen::Index n, int k = 7) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u;
  Eigen::VectorXd r = normal_noise(rng, n, 0.02);
  for (auto& x : r) {
    if (std::abs(x) < 1e-4) x = 1e-4;
  }
  const auto cuts = harness::make_cv_splits(n, k).block_boundaries;
  for (std::size_t b = 1; b + 1 < cuts.size(); ++b) {
    if (cuts[b] + 1 < n) r[cuts[b] + 1] = std::abs(r[cuts[b] + 1]);
  }
  r[0] = 0.0;
  const Eigen::VectorXd price = (cumsum(r).array().exp() * 100.0).matrix();
  Eigen::VectorXd signal(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const double dir = t + 1 < n ? (r[t + 1] > 0 ? 1.0 : -1.0) : 1.0;
    signal[t] = dir * (0.5 + u(rng));
  }
  const Eigen::VectorXd volume = normal_noise(rng, n);
  return data::Panel(daily_dates(n), {{"price", data::Role::price, price},
                                      {"signal", data::Role::feature, signal},
                                      {"volume", data::Role::feature, volume}});
}

/// Geometric martingale p[t+1] = p[t] (1 + 0.02 e) with independent noise
/// features, one of them a score column.
inline data::Panel noise_panel(std::uint64_t seed, Eigen::Index n) {
  std::mt19937_64 rng(seed);
  const Eigen::VectorXd e = normal_noise(rng, n);
  Eigen::VectorXd price(n);
  price[0] = 100.0;
  for (Eigen::Index t = 1; t < n; ++t) price[t] = price[t - 1] * (1.0 + 0.02 * e[t]);
  return data::Panel(daily_dates(n), {{"price", data::Role::price, price},
                                      {"f1", data::Role::feature, normal_noise(rng, n)},
                                      {"f2", data::Role::feature, cumsum(normal_noise(rng, n))},
                                      {"news_score", data::Role::nlp_score, normal_noise(rng, n)}});
}

inline std::filesystem::path temp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("exbt_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream(p) << s;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace exbt::testing
