#include "exbt/harness/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#define TOML_HEADER_ONLY 1
#include <tomlplusplus/toml.hpp>

#include "exbt/error.hpp"

namespace exbt::harness {

namespace {

/// Typed access to one table that remembers which keys were consumed.
class Section {
 public:
  Section(const toml::table* t, std::string name) : table_(t), name_(std::move(name)) {}

  bool has(std::string_view key) const { return table_ && table_->contains(key); }

  template <typename T>
  void read(std::string_view key, T& out) {
    const toml::node* n = find(key);
    if (!n) return;
    out = scalar<T>(*n, key);
  }

  template <typename T>
  void read_list(std::string_view key, std::vector<T>& out) {
    const toml::node* n = find(key);
    if (!n) return;
    const toml::array* a = n->as_array();
    if (!a) fail(key, "expected an array");
    out.clear();
    for (const auto& item : *a) out.push_back(scalar<T>(item, key));
  }

  template <typename T>
  void read_range(std::string_view key, Range<T>& out) {
    std::vector<T> v;
    read_list(key, v);
    if (!has(key)) return;
    if (v.size() != 2 || v[0] > v[1]) fail(key, "expected [lo, hi] with lo <= hi");
    out = {v[0], v[1]};
  }

  void reject_unknown() const {
    if (!table_) return;
    for (const auto& [k, v] : *table_) {
      if (!used_.count(std::string(k.str()))) {
        throw ConfigError("unknown key '" + std::string(k.str()) + "' in [" + name_ + "]");
      }
    }
  }

 private:
  const toml::node* find(std::string_view key) {
    if (!table_) return nullptr;
    used_.insert(std::string(key));
    return table_->get(key);
  }

  [[noreturn]] void fail(std::string_view key, std::string_view what) const {
    throw ConfigError("[" + name_ + "] " + std::string(key) + ": " + std::string(what));
  }

  template <typename T>
  T scalar(const toml::node& n, std::string_view key) const {
    if constexpr (std::is_same_v<T, bool>) {
      if (auto v = n.value_exact<bool>()) return *v;
      fail(key, "expected a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (auto v = n.value_exact<std::string>()) return *v;
      fail(key, "expected a string");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!n.is_number()) fail(key, "expected a number");
      return *n.value<double>();
    } else {
      auto v = n.value_exact<std::int64_t>();
      if (!v) fail(key, "expected an integer");
      if (*v < 0 && std::is_unsigned_v<T>) fail(key, "expected a nonnegative integer");
      return T(*v);
    }
  }

  const toml::table* table_;
  std::string name_;
  std::set<std::string> used_;
};

template <typename E, typename Parse>
void read_enum_list(Section& s, std::string_view key, std::vector<E>& out, Parse parse) {
  std::vector<std::string> names;
  s.read_list(key, names);
  if (!s.has(key)) return;
  out.clear();
  for (const auto& n : names) out.push_back(parse(n));
}

void read_model(Section& s, ml::ModelConfig& m) {
  std::string text;
  if (s.has("family")) {
    s.read("family", text);
    m.family = ml::parse_family(text);
  }
  if (s.has("scaling")) {
    s.read("scaling", text);
    m.scaling = ml::parse_scaling(text);
  }
  s.read("seed", m.seed);
  double lambda = m.family == ml::Family::ridge ? m.ridge_lambda : m.logistic_lambda;
  s.read("lambda", lambda);
  std::string solver = m.family == ml::Family::ridge ? m.ridge_solver : m.logistic_solver;
  s.read("solver", solver);
  if (m.family == ml::Family::ridge) {
    m.ridge_lambda = lambda;
    m.ridge_solver = solver;
  } else {
    m.logistic_lambda = lambda;
    m.logistic_solver = solver;
  }
  s.read_list("layer_sizes", m.mlp.layer_sizes);
  if (s.has("activation")) {
    s.read("activation", text);
    m.mlp.activation = ml::parse_activation(text);
  }
  if (s.has("optimiser")) {
    s.read("optimiser", text);
    m.mlp.optimiser = ml::parse_optimiser(text);
  }
  s.read("l2", m.mlp.l2);
  s.read("learning_rate", m.mlp.learning_rate);
  s.read("epochs", m.mlp.epochs);
  s.read("batch_size", m.mlp.batch_size);
  m.mlp.seed = m.seed;
}

toml::table parse_toml(std::string_view text) {
  try {
    return toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "config line " << e.source().begin.line << ": " << e.description();
    throw ConfigError(os.str());
  }
}

void check_log_range(const char* what, const Range<double>& r, double lo, double hi) {
  if (!(r.lo > 0.0 && r.lo >= lo && r.hi <= hi && r.lo <= r.hi)) {
    throw ConfigError(std::string("search range for ") + what + " must lie within [" + std::to_string(lo) +
                      ", " + std::to_string(hi) + "]");
  }
}

void check_int_range(const char* what, const Range<int>& r, int lo, int hi) {
  if (!(r.lo >= lo && r.hi <= hi && r.lo <= r.hi)) {
    throw ConfigError(std::string("search range for ") + what + " must lie within [" + std::to_string(lo) +
                      ", " + std::to_string(hi) + "]");
  }
}

}  // namespace

std::string_view to_string(FeatureSet f) { return f == FeatureSet::all ? "all" : "without_nlp"; }

FeatureSet parse_feature_set(std::string_view s) {
  if (s == "all") return FeatureSet::all;
  if (s == "without_nlp" || s == "no_nlp") return FeatureSet::without_nlp;
  throw ConfigError("unknown feature_set '" + std::string(s) + "'");
}

void SearchSpace::validate() const {
  check_log_range("ridge lambda", ridge_lambda, 0.001, 100.0);
  check_log_range("logistic lambda", logistic_lambda, 0.0005, 1000.0);
  check_int_range("layers", layers, 1, 4);
  check_int_range("layer_size", layer_size, 10, 200);
  check_log_range("l2", l2, 1e-4, 0.1);
  check_log_range("learning_rate", learning_rate, 1e-3, 0.1);
  check_int_range("epochs", epochs, 10, 1000);
  if (ridge_solvers.empty() || logistic_solvers.empty() || activations.empty() || optimisers.empty() ||
      batch_sizes.empty()) {
    throw ConfigError("search menus must not be empty");
  }
  for (int b : batch_sizes) {
    if (b != 16 && b != 32 && b != 64 && b != 128) throw ConfigError("batch sizes must be 16, 32, 64 or 128");
  }
  if (iterations < 1) throw ConfigError("search iterations must be at least 1");
  if (time_budget_seconds && !(*time_budget_seconds > 0.0)) throw ConfigError("time budget must be positive");
}

void ExperimentSpec::validate() const {
  if (folds < 1) throw ConfigError("folds must be at least 1");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  if (!(cost >= 0.0 && cost < 1.0)) throw ConfigError("cost must be in [0, 1)");
  if (target.kind == targets::TargetKind::extrema_pair && target.window < 1) {
    throw ConfigError("extrema window must be at least 1");
  }
  if (!(preprocess.alpha > 0.0 && preprocess.alpha < 1.0) || !(selection.alpha > 0.0 && selection.alpha < 1.0)) {
    throw ConfigError("alpha must be in (0, 1)");
  }
  if (selection.max_lag < 1 || selection.own_lags < 0) throw ConfigError("invalid selection lags");
  const bool regression = target.kind == targets::TargetKind::continuous_return;
  if (regression && model.family == ml::Family::logistic) {
    throw ConfigError("logistic models need a classification target");
  }
  if (!regression && model.family == ml::Family::ridge) {
    throw ConfigError("ridge models need the continuous_return target");
  }
  model.validate();
  search.validate();
}

ExperimentSpec parse_experiment(std::string_view text, const std::filesystem::path& base_dir) {
  const toml::table root = parse_toml(text);
  static const std::set<std::string> sections{"data", "target", "preprocess", "selection", "model",
                                              "search", "experiment", "backtest"};
  for (const auto& [k, v] : root) {
    if (!sections.count(std::string(k.str())) || !v.is_table()) {
      throw ConfigError("unknown top-level entry '" + std::string(k.str()) + "'");
    }
  }
  auto table = [&](const char* name) { return root[name].as_table(); };

  ExperimentSpec e;
  std::string text_value;

  Section data(table("data"), "data");
  std::string panel;
  data.read("panel", panel);
  if (panel.empty()) throw ConfigError("[data] panel is required");
  e.data.panel = base_dir / panel;
  data.read("price_column", e.data.price_column);
  if (data.has("exclusions")) {
    std::string ex;
    data.read("exclusions", ex);
    e.data.exclusions = base_dir / ex;
  }
  if (data.has("feature_set")) {
    data.read("feature_set", text_value);
    e.data.feature_set = parse_feature_set(text_value);
  }
  data.read_list("drop", e.data.drop);
  data.reject_unknown();

  Section target(table("target"), "target");
  if (target.has("kind")) {
    target.read("kind", text_value);
    e.target.kind = targets::parse_target_kind(text_value);
  }
  target.read("window", e.target.window);
  target.reject_unknown();

  Section prep(table("preprocess"), "preprocess");
  prep.read("alpha", e.preprocess.alpha);
  prep.read("max_diff", e.preprocess.max_diff);
  prep.read("min_observations", e.preprocess.min_observations);
  prep.reject_unknown();

  Section sel(table("selection"), "selection");
  if (sel.has("mode")) {
    sel.read("mode", text_value);
    e.selection.mode = granger::parse_mode(text_value);
  }
  sel.read("alpha", e.selection.alpha);
  sel.read("max_lag", e.selection.max_lag);
  sel.read("own_lags", e.selection.own_lags);
  sel.reject_unknown();

  Section exp(table("experiment"), "experiment");
  exp.read("folds", e.folds);
  exp.read("seed", e.seed);
  exp.read("jobs", e.jobs);
  exp.read("audit", e.audit);
  exp.reject_unknown();

  Section model(table("model"), "model");
  e.model.seed = e.seed;
  read_model(model, e.model);
  model.reject_unknown();

  Section search(table("search"), "search");
  search.read("iterations", e.search.iterations);
  if (search.has("time_budget_seconds")) {
    double t = 0.0;
    search.read("time_budget_seconds", t);
    e.search.time_budget_seconds = t;
  }
  search.read_range("ridge_lambda", e.search.ridge_lambda);
  search.read_list("ridge_solvers", e.search.ridge_solvers);
  search.read_range("logistic_lambda", e.search.logistic_lambda);
  search.read_list("logistic_solvers", e.search.logistic_solvers);
  search.read_range("layers", e.search.layers);
  search.read_range("layer_size", e.search.layer_size);
  read_enum_list(search, "activations", e.search.activations, ml::parse_activation);
  read_enum_list(search, "optimisers", e.search.optimisers, ml::parse_optimiser);
  search.read_range("l2", e.search.l2);
  search.read_range("learning_rate", e.search.learning_rate);
  search.read_range("epochs", e.search.epochs);
  search.read_list("batch_sizes", e.search.batch_sizes);
  read_enum_list(search, "scalings", e.search.scalings, ml::parse_scaling);
  search.reject_unknown();

  Section bt(table("backtest"), "backtest");
  bt.read("cost", e.cost);
  bt.reject_unknown();

  e.validate();
  return e;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment(buf.str(), path.parent_path());
}

ml::ModelConfig parse_model_config(std::string_view text) {
  const toml::table root = parse_toml(text);
  Section s(&root, "model");
  ml::ModelConfig m;
  read_model(s, m);
  s.reject_unknown();
  return m;
}

}  // namespace exbt::harness
