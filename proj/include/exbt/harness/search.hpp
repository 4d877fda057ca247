#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "exbt/harness/config.hpp"
#include "exbt/harness/pipeline.hpp"

namespace exbt::harness {

/// Draws candidate configs for `base.family` from the space. Scale
/// parameters are log-uniform.
class CandidateSampler {
 public:
  CandidateSampler(const SearchSpace& space, const ml::ModelConfig& base, std::uint64_t seed);
  ml::ModelConfig next();
  /// True when every draw yields the same config.
  bool single_point() const;

 private:
  const SearchSpace& space_;
  ml::ModelConfig base_;
  std::mt19937_64 rng_;
};

struct TraceEntry {
  int iteration = 0;
  ml::ModelConfig config;
  bool ok = false;
  double mean_profit = 0.0;
  int folds_ok = 0;
  std::string message;
};

struct TuneResult {
  ml::ModelConfig best;
  double best_profit = 0.0;
  std::vector<TraceEntry> trace;
};

/// Random search maximising mean cross-fold profit. Candidates are drawn
/// sequentially from the seed and evaluated `jobs` at a time, so the
/// winner does not depend on `jobs`. Ties keep the earlier candidate.
/// Stops after space.iterations candidates, after one candidate when the
/// space is a single point, or when the time budget is spent. Throws
/// NumericalError when no candidate completed a fold.
TuneResult tune(const data::Panel& panel, const ExperimentSpec& spec, int jobs = 1,
                const LearnerFactory& factory = ml::make_learner);

/// `iteration,status,mean_profit,folds_ok,config,message` with the config
/// as `key=value` pairs separated by `;`.
void write_trace(const TuneResult& r, const std::filesystem::path& path);

}  // namespace exbt::harness
