#pragma once

#include <functional>

#include "mdcd/report_json.hpp"
#include "mdcd/synth.hpp"

namespace mdcd {

enum class BenchMode { bivariate, multivariate };

struct BenchmarkOptions {
  BenchMode mode = BenchMode::bivariate;
  /// Total trial count. With tune_c set, round(trials * train_fraction)
  /// trials form a disjoint training batch for threshold selection and the
  /// rest are the reported test batch; otherwise every trial is a test trial.
  int trials = 100;
  int n_per_domain = 1000;
  std::uint64_t seed = 0;
  bool tune_c = false;
  double train_fraction = 0.5;
  double c = 0.05;
  ScoreConfig score;
  SynthOptions synth;
};

/// Generates seeded instances, runs discovery on each, and aggregates
/// metrics. Pure function of its options: rerunning with the same options
/// produces byte-identical JSON. The optional interrupted() poll lets a
/// caller flush partial results early.
ordered_json run_benchmark(const BenchmarkOptions& opts,
                           const std::function<bool()>& interrupted = {});

}  // namespace mdcd
