#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mdcd/dataset.hpp"
#include "mdcd/density.hpp"

namespace mdcd {

struct ScoreConfig {
  int permutations = 499;
  std::uint64_t seed = 0;
  BandwidthMethod bandwidth_method = BandwidthMethod::normal_reference;
  double bandwidth_scale = 1.0;
  /// Per-domain cap on independence-test points. Density models are always
  /// fitted on the full block; when a block exceeds the cap, a seeded
  /// subsample of rows feeds the test. 0 disables the cap.
  int max_test_points = 1000;
  bool standardize = true;
  /// Diagnostic mode: fit each domain's model on the first half of its block
  /// and test on the second half, instead of the in-sample default.
  bool split = false;
  double smoothing_lambda = 0.5;
  double discrete_leak = 0.05;
  /// Hard cap on |candidates| for the exhaustive 2^|A| enumeration.
  int max_candidates = 12;
  /// Significance level echoed in reports; the scores themselves are raw
  /// p-values and never thresholded here.
  double alpha = 0.05;

  FitOptions fit_options() const {
    FitOptions f;
    f.bandwidth_method = bandwidth_method;
    f.bandwidth_scale = bandwidth_scale;
    f.smoothing_lambda = smoothing_lambda;
    f.discrete_leak = discrete_leak;
    return f;
  }
};

/// Per-domain p-values of testing the target's density profile against the
/// conditioning subset, plus their minimum L. A small L rejects the subset as
/// the parent set; the empty subset is vacuous by construction and scores 1.
struct SubsetScore {
  std::vector<std::string> subset;
  std::vector<double> per_domain_pvalues;
  double L = 1.0;
  bool vacuous = false;
  bool uninformative = false;
  /// Audit trail of the underlying tests: raw statistics and statistics
  /// standardized against each test's permutation null. max_z summarizes the
  /// strongest dependence across domains (the continuous counterpart of L).
  std::vector<double> per_domain_statistics;
  std::vector<double> per_domain_z;
  double max_z = 0.0;
};

enum class DirectionLabel { x_causes_y, y_causes_x, inconclusive };

struct DirectionResult {
  DirectionLabel label = DirectionLabel::inconclusive;
  SubsetScore forward;  // tests x -> y
  SubsetScore reverse;  // tests y -> x
  bool uninformative = false;
};

struct DiscoveryReport {
  std::string target;
  std::vector<std::string> candidates;
  std::string method;  // "h1" or "h2"
  double threshold_c = 0.0;
  int k = -1;
  std::vector<SubsetScore> subsets;  // ordered by size, then lexicographically
  std::vector<std::string> chosen;
  std::uint64_t seed = 0;
  ScoreConfig settings;
  bool uninformative = false;
};

/// Fits per-domain conditional models of target given subset, computes the
/// profile samples and runs the permutation independence test between the
/// profiles and the subset's values separately within each domain block.
SubsetScore score_subset(const MultiDomainDataset& ds, const std::string& target,
                         const std::vector<std::string>& subset, const ScoreConfig& cfg);

/// Union of every subset whose score exceeds c. Scores all 2^|A| subsets.
DiscoveryReport h1_parent_set(const MultiDomainDataset& ds, const std::string& target,
                              const std::vector<std::string>& candidates, double c,
                              const ScoreConfig& cfg);

/// Argmax of L among size-k subsets; ties broken by larger median per-domain
/// p-value, then by lexicographic column order.
DiscoveryReport h2_parent_set(const MultiDomainDataset& ds, const std::string& target,
                              const std::vector<std::string>& candidates, int k,
                              const ScoreConfig& cfg);

/// Compares L of target=y|{x} against target=x|{y}. When the two L values
/// tie within 1e-9 (typical once both tests saturate the permutation-p
/// floor), the direction with the weaker standardized dependence (smaller
/// max_z) wins; only a tie in both comparisons is inconclusive.
DirectionResult decide_direction(const MultiDomainDataset& ds, const std::string& x,
                                 const std::string& y, const ScoreConfig& cfg);

/// Re-derives the H1 union from an already-scored table; threshold sweeps
/// reuse one table instead of re-running the tests. column_order fixes the
/// output ordering (dataset column order).
std::vector<std::string> h1_union(const std::vector<SubsetScore>& subsets, double c,
                                  const std::vector<std::string>& column_order);

/// H2 winner among the size-k entries of an already-scored table, with the
/// same tie-breaking as h2_parent_set. Null when no entry has size k.
const SubsetScore* h2_choose(const std::vector<SubsetScore>& subsets, int k,
                             const std::vector<std::string>& column_order);

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;  // exact-set match rate; direction accuracy for direction reports
  bool precision_defined = true;
  bool recall_defined = true;
};

/// Micro-averaged edge metrics over aligned (report, truth) pairs. An edge
/// prediction is "candidate in chosen set"; undefined ratios are reported as
/// 0 with the matching defined-flag cleared.
Metrics evaluate_metrics(const std::vector<std::vector<std::string>>& chosen,
                         const std::vector<std::vector<std::string>>& truths);

}  // namespace mdcd
