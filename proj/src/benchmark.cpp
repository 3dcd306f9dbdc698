#include "mdcd/benchmark.hpp"

#include <algorithm>
#include <cmath>

#include "mdcd/parallel.hpp"
#include "mdcd/rng.hpp"

namespace mdcd {

namespace {

const double kCGrid[] = {0.003, 0.005, 0.01, 0.02, 0.03, 0.05, 0.08,
                         0.1,   0.15,  0.2,  0.3,  0.4,  0.5};

struct TrialRecord {
  bool completed = false;
  std::uint64_t seed = 0;

  // Bivariate.
  std::string truth_cause;
  DirectionLabel label = DirectionLabel::inconclusive;
  double l_forward = 0.0;
  double l_reverse = 0.0;
  bool uninformative = false;

  // Multivariate.
  std::vector<std::string> truth_parents;
  std::vector<std::string> candidates;
  std::vector<SubsetScore> table;
  int true_k = 0;
};

TrialRecord run_bivariate_trial(const BenchmarkOptions& opts, std::uint64_t trial_seed) {
  TrialRecord rec;
  rec.seed = trial_seed;
  const SynthInstance inst =
      gen_bivariate(trial_seed, static_cast<std::size_t>(opts.n_per_domain), opts.synth);
  ScoreConfig cfg = opts.score;
  cfg.seed = derive_seed(trial_seed, "score");
  const DirectionResult res = decide_direction(inst.dataset, "X", "Y", cfg);
  rec.truth_cause = inst.truth.cause;
  rec.label = res.label;
  rec.l_forward = res.forward.L;
  rec.l_reverse = res.reverse.L;
  rec.uninformative = res.uninformative;
  rec.completed = true;
  return rec;
}

TrialRecord run_multivariate_trial(const BenchmarkOptions& opts, std::uint64_t trial_seed) {
  TrialRecord rec;
  rec.seed = trial_seed;
  const SynthInstance inst =
      gen_multivariate(trial_seed, static_cast<std::size_t>(opts.n_per_domain), opts.synth);

  std::vector<std::string> candidates;
  for (const Column& col : inst.dataset.columns()) {
    if (col.name != inst.truth.target) candidates.push_back(col.name);
  }

  ScoreConfig cfg = opts.score;
  cfg.seed = derive_seed(trial_seed, "score");
  // The scored table is threshold-free; H1 unions and the H2 argmax are both
  // derived from it afterwards, so one enumeration serves every c and k.
  const DiscoveryReport report =
      h1_parent_set(inst.dataset, inst.truth.target, candidates, 0.5, cfg);

  rec.truth_parents = inst.truth.parents;
  rec.candidates = report.candidates;
  rec.table = report.subsets;
  rec.true_k = static_cast<int>(inst.truth.parents.size());
  rec.completed = true;
  return rec;
}

bool direction_correct(const TrialRecord& rec) {
  if (rec.label == DirectionLabel::inconclusive) return false;
  const bool truth_forward = rec.truth_cause == "X";
  return truth_forward == (rec.label == DirectionLabel::x_causes_y);
}

double tune_c_bivariate(const std::vector<const TrialRecord*>& train) {
  double best_c = 0.05;
  int best_hits = -1;
  for (double c : kCGrid) {
    int hits = 0;
    for (const TrialRecord* rec : train) {
      const double l_true = rec->truth_cause == "X" ? rec->l_forward : rec->l_reverse;
      const double l_wrong = rec->truth_cause == "X" ? rec->l_reverse : rec->l_forward;
      if (l_true > c && l_wrong <= c) ++hits;
    }
    if (hits > best_hits) {
      best_hits = hits;
      best_c = c;
    }
  }
  return best_c;
}

double tune_c_multivariate(const std::vector<const TrialRecord*>& train) {
  double best_c = 0.05;
  double best_f1 = -1.0;
  for (double c : kCGrid) {
    std::vector<std::vector<std::string>> chosen;
    std::vector<std::vector<std::string>> truths;
    for (const TrialRecord* rec : train) {
      chosen.push_back(h1_union(rec->table, c, rec->candidates));
      truths.push_back(rec->truth_parents);
    }
    const Metrics m = evaluate_metrics(chosen, truths);
    if (m.f1 > best_f1) {
      best_f1 = m.f1;
      best_c = c;
    }
  }
  return best_c;
}

ordered_json metrics_to_json(const Metrics& m) {
  ordered_json j;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  j["accuracy"] = m.accuracy;
  if (!m.precision_defined) j["precision_undefined"] = true;
  if (!m.recall_defined) j["recall_undefined"] = true;
  return j;
}

}  // namespace

ordered_json run_benchmark(const BenchmarkOptions& opts,
                           const std::function<bool()>& interrupted) {
  if (opts.trials < 1) throw Error("benchmark needs at least one trial");
  if (opts.tune_c && !(opts.train_fraction > 0.0 && opts.train_fraction < 1.0)) {
    throw Error("train fraction must lie strictly between 0 and 1");
  }

  const int total = opts.trials;
  const int train_count =
      opts.tune_c ? std::max(1, static_cast<int>(std::lround(total * opts.train_fraction)))
                  : 0;
  if (train_count >= total) throw Error("tuning would leave no test trials");

  std::vector<TrialRecord> records(static_cast<std::size_t>(total));
  parallel_for(static_cast<std::size_t>(total), [&](std::size_t i) {
    if (interrupted && interrupted()) return;
    const std::uint64_t trial_seed = derive_seed(opts.seed, "trial", i);
    records[i] = opts.mode == BenchMode::bivariate
                     ? run_bivariate_trial(opts, trial_seed)
                     : run_multivariate_trial(opts, trial_seed);
  });

  std::vector<const TrialRecord*> train;
  std::vector<const TrialRecord*> test;
  bool any_skipped = false;
  for (int i = 0; i < total; ++i) {
    const TrialRecord& rec = records[static_cast<std::size_t>(i)];
    if (!rec.completed) {
      any_skipped = true;
      continue;
    }
    (i < train_count ? train : test).push_back(&rec);
  }

  double c_used = opts.c;
  if (opts.tune_c && !train.empty()) {
    c_used = opts.mode == BenchMode::bivariate ? tune_c_bivariate(train)
                                               : tune_c_multivariate(train);
  }

  ordered_json out;
  out["mode"] = opts.mode == BenchMode::bivariate ? "bivariate" : "multivariate";
  out["trials"] = total;
  out["train_trials"] = train_count;
  out["test_trials"] = total - train_count;
  out["n_per_domain"] = opts.n_per_domain;
  out["seed"] = opts.seed;
  out["settings"] = settings_to_json(opts.score);
  out["threshold_c"] = c_used;
  out["tuned"] = opts.tune_c;

  ordered_json log = ordered_json::array();
  if (opts.mode == BenchMode::bivariate) {
    int correct = 0;
    int decided = 0;
    for (const TrialRecord* rec : test) {
      if (direction_correct(*rec)) ++correct;
      if (rec->label != DirectionLabel::inconclusive) ++decided;
    }
    ordered_json metrics;
    metrics["accuracy"] =
        test.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test.size());
    metrics["decided"] = decided;
    metrics["evaluated"] = test.size();
    out["metrics"] = std::move(metrics);

    for (int i = 0; i < total; ++i) {
      const TrialRecord& rec = records[static_cast<std::size_t>(i)];
      if (!rec.completed) continue;
      ordered_json entry;
      entry["trial"] = i;
      entry["phase"] = i < train_count ? "train" : "test";
      entry["seed"] = rec.seed;
      entry["truth_cause"] = rec.truth_cause;
      entry["decision"] = direction_label_name(rec.label);
      entry["L_forward"] = rec.l_forward;
      entry["L_reverse"] = rec.l_reverse;
      entry["correct"] = direction_correct(rec);
      if (rec.uninformative) entry["uninformative"] = true;
      log.push_back(std::move(entry));
    }
  } else {
    std::vector<std::vector<std::string>> h1_chosen;
    std::vector<std::vector<std::string>> h2_chosen;
    std::vector<std::vector<std::string>> truths;
    for (const TrialRecord* rec : test) {
      h1_chosen.push_back(h1_union(rec->table, c_used, rec->candidates));
      const SubsetScore* best = h2_choose(rec->table, rec->true_k, rec->candidates);
      h2_chosen.push_back(best != nullptr ? best->subset : std::vector<std::string>{});
      truths.push_back(rec->truth_parents);
    }
    ordered_json metrics;
    metrics["h1"] = metrics_to_json(evaluate_metrics(h1_chosen, truths));
    metrics["h2"] = metrics_to_json(evaluate_metrics(h2_chosen, truths));
    out["metrics"] = std::move(metrics);

    std::size_t t = 0;
    for (int i = 0; i < total; ++i) {
      const TrialRecord& rec = records[static_cast<std::size_t>(i)];
      if (!rec.completed) continue;
      ordered_json entry;
      entry["trial"] = i;
      entry["phase"] = i < train_count ? "train" : "test";
      entry["seed"] = rec.seed;
      entry["truth_parents"] = rec.truth_parents;
      entry["k"] = rec.true_k;
      if (i >= train_count) {
        entry["h1_chosen"] = h1_chosen[t];
        entry["h2_chosen"] = h2_chosen[t];
        ++t;
      } else {
        entry["h1_chosen"] = h1_union(rec.table, c_used, rec.candidates);
        const SubsetScore* best = h2_choose(rec.table, rec.true_k, rec.candidates);
        entry["h2_chosen"] = best != nullptr ? best->subset : std::vector<std::string>{};
      }
      ordered_json scores = ordered_json::array();
      for (const SubsetScore& s : rec.table) scores.push_back(subset_score_to_json(s));
      entry["subsets"] = std::move(scores);
      log.push_back(std::move(entry));
    }
  }
  out["trial_log"] = std::move(log);
  if (any_skipped) out["interrupted"] = true;
  return out;
}

}  // namespace mdcd
