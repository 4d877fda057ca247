#include "exbt/harness/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include "exbt/error.hpp"

namespace exbt::harness {

namespace {

double log_uniform(std::mt19937_64& rng, const Range<double>& r) {
  if (r.lo == r.hi) return r.lo;
  std::uniform_real_distribution<double> u(std::log(r.lo), std::log(r.hi));
  return std::exp(u(rng));
}

int uniform_int(std::mt19937_64& rng, const Range<int>& r) {
  return std::uniform_int_distribution<int>(r.lo, r.hi)(rng);
}

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& menu) {
  return menu[std::uniform_int_distribution<std::size_t>(0, menu.size() - 1)(rng)];
}

std::vector<ml::Scaling> scaling_menu(const SearchSpace& s, const ml::ModelConfig& base) {
  if (!s.scalings.empty()) return s.scalings;
  if (base.family == ml::Family::mlp) return {ml::Scaling::none, ml::Scaling::standardise, ml::Scaling::minmax};
  return {base.scaling};
}

std::string flatten(const ml::ModelConfig& c) {
  std::string text = c.to_text(), out;
  for (char ch : text) {
    if (ch == '\n') {
      out += ';';
    } else if (ch != ' ' && ch != '"') {
      out += ch;
    }
  }
  if (!out.empty() && out.back() == ';') out.pop_back();
  return out;
}

}  // namespace

CandidateSampler::CandidateSampler(const SearchSpace& space, const ml::ModelConfig& base, std::uint64_t seed)
    : space_(space), base_(base), rng_(seed) {}

ml::ModelConfig CandidateSampler::next() {
  ml::ModelConfig c = base_;
  c.scaling = pick(rng_, scaling_menu(space_, base_));
  switch (c.family) {
    case ml::Family::ridge:
      c.ridge_lambda = log_uniform(rng_, space_.ridge_lambda);
      c.ridge_solver = pick(rng_, space_.ridge_solvers);
      break;
    case ml::Family::logistic:
      c.logistic_lambda = log_uniform(rng_, space_.logistic_lambda);
      c.logistic_solver = pick(rng_, space_.logistic_solvers);
      break;
    case ml::Family::mlp: {
      const int layers = uniform_int(rng_, space_.layers);
      c.mlp.layer_sizes.clear();
      for (int l = 0; l < layers; ++l) c.mlp.layer_sizes.push_back(uniform_int(rng_, space_.layer_size));
      c.mlp.activation = pick(rng_, space_.activations);
      c.mlp.optimiser = pick(rng_, space_.optimisers);
      c.mlp.l2 = log_uniform(rng_, space_.l2);
      c.mlp.learning_rate = log_uniform(rng_, space_.learning_rate);
      c.mlp.epochs = uniform_int(rng_, space_.epochs);
      c.mlp.batch_size = pick(rng_, space_.batch_sizes);
      break;
    }
  }
  return c;
}

bool CandidateSampler::single_point() const {
  const SearchSpace& s = space_;
  if (scaling_menu(s, base_).size() != 1) return false;
  switch (base_.family) {
    case ml::Family::ridge:
      return s.ridge_lambda.lo == s.ridge_lambda.hi && s.ridge_solvers.size() == 1;
    case ml::Family::logistic:
      return s.logistic_lambda.lo == s.logistic_lambda.hi && s.logistic_solvers.size() == 1;
    case ml::Family::mlp:
      return s.layers.lo == s.layers.hi && s.layer_size.lo == s.layer_size.hi && s.activations.size() == 1 &&
             s.optimisers.size() == 1 && s.l2.lo == s.l2.hi && s.learning_rate.lo == s.learning_rate.hi &&
             s.epochs.lo == s.epochs.hi && s.batch_sizes.size() == 1;
  }
  return false;
}

TuneResult tune(const data::Panel& panel, const ExperimentSpec& spec, int jobs, const LearnerFactory& factory) {
  spec.search.validate();
  CandidateSampler sampler(spec.search, spec.model, spec.seed);
  const int total = sampler.single_point() ? 1 : spec.search.iterations;
  const auto start = std::chrono::steady_clock::now();
  auto out_of_time = [&] {
    if (!spec.search.time_budget_seconds) return false;
    const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - start;
    return spent.count() >= *spec.search.time_budget_seconds;
  };

  TuneResult result;
  bool have_best = false;
  const int batch = std::max(1, jobs);
  for (int it = 0; it < total && !out_of_time();) {
    const int n = std::min(batch, total - it);
    std::vector<TraceEntry> entries(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      entries[std::size_t(j)].iteration = it + j + 1;
      entries[std::size_t(j)].config = sampler.next();
    }
    auto evaluate = [&](TraceEntry& e) {
      try {
        e.config.validate();
        const CvReport r = run_cv(panel, spec, e.config, 1, nullptr, factory);
        e.folds_ok = r.aggregate.folds_ok;
        e.ok = r.aggregate.folds_ok > 0;
        e.mean_profit = r.aggregate.profit;
        if (!e.ok) e.message = "all folds failed";
      } catch (const Error& ex) {
        e.message = ex.what();
      }
    };
    if (n == 1) {
      evaluate(entries[0]);
    } else {
      std::vector<std::jthread> pool;
      for (auto& e : entries) pool.emplace_back([&evaluate, &e] { evaluate(e); });
    }
    for (auto& e : entries) {
      if (e.ok && (!have_best || e.mean_profit > result.best_profit)) {
        result.best = e.config;
        result.best_profit = e.mean_profit;
        have_best = true;
      }
      result.trace.push_back(std::move(e));
    }
    it += n;
  }
  if (!have_best) {
    throw NumericalError("tune: no candidate completed a fold");
  }
  return result;
}

void write_trace(const TuneResult& r, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "iteration,status,mean_profit,folds_ok,config,message\n";
  for (const auto& e : r.trace) {
    out << e.iteration << ',' << (e.ok ? "ok" : "failed") << ',' << (e.ok ? data::format_double(e.mean_profit) : "")
        << ',' << e.folds_ok << ',' << data::csv_escape(flatten(e.config)) << ',' << data::csv_escape(e.message)
        << '\n';
  }
}

}  // namespace exbt::harness
