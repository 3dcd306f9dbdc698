#include "mdcd/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "mdcd/hsic.hpp"
#include "mdcd/profile.hpp"
#include "mdcd/rng.hpp"

namespace mdcd {

namespace {

constexpr double kConstantProfileTol = 1e-12;
constexpr double kDirectionTol = 1e-9;

/// Subset names normalized to dataset column order; validates existence.
std::vector<std::string> normalize_subset(const MultiDomainDataset& ds,
                                          const std::string& target,
                                          const std::vector<std::string>& subset) {
  std::vector<std::size_t> idx;
  idx.reserve(subset.size());
  for (const std::string& name : subset) {
    if (name == target) throw Error("target '" + target + "' cannot appear in the subset");
    idx.push_back(ds.column_index(name));
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  std::vector<std::string> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(ds.column(i).name);
  return out;
}

std::vector<std::size_t> test_rows(std::size_t begin, std::size_t end, int cap,
                                   std::uint64_t seed) {
  std::vector<std::size_t> idx(end - begin);
  std::iota(idx.begin(), idx.end(), begin);
  if (cap > 0 && idx.size() > static_cast<std::size_t>(cap)) {
    Rng rng(seed);
    rng.shuffle(idx);
    idx.resize(static_cast<std::size_t>(cap));
    std::sort(idx.begin(), idx.end());
  }
  return idx;
}

/// First halves of every block, for --split fits.
MultiDomainDataset first_halves(const MultiDomainDataset& data) {
  std::vector<DomainBlock> blocks;
  blocks.reserve(data.m());
  for (std::size_t e = 0; e < data.m(); ++e) {
    const DomainBlock& src = data.block(e);
    if (src.n_rows < 4) {
      throw InsufficientData("split fitting needs at least 4 rows per domain");
    }
    DomainBlock half;
    half.n_rows = src.n_rows / 2;
    half.columns.reserve(src.columns.size());
    for (const std::vector<double>& col : src.columns) {
      half.columns.emplace_back(col.begin(), col.begin() + half.n_rows);
    }
    blocks.push_back(std::move(half));
  }
  std::vector<Column> cols = data.columns();
  std::vector<long long> labels = data.domain_labels();
  return MultiDomainDataset(std::move(cols), std::move(blocks), std::move(labels));
}

SubsetScore score_prepared(const MultiDomainDataset& data, const std::string& target,
                           const std::vector<std::string>& subset, const ScoreConfig& cfg) {
  const std::size_t m = data.m();

  SubsetScore out;
  out.subset = subset;
  if (subset.empty()) {
    // Nothing to test against; vacuous by definition (minimum over zero tests).
    out.per_domain_pvalues.assign(m, 1.0);
    out.L = 1.0;
    out.vacuous = true;
    out.uninformative = m == 1;
    return out;
  }

  std::optional<MultiDomainDataset> split_storage;
  const MultiDomainDataset& fit_data =
      cfg.split ? split_storage.emplace(first_halves(data)) : data;

  std::vector<ConditionalDensityModel> models;
  models.reserve(m);
  for (std::size_t e = 0; e < m; ++e) {
    models.push_back(
        ConditionalDensityModel::fit(fit_data, e, target, subset, cfg.fit_options()));
  }

  const std::size_t target_idx = data.column_index(target);
  std::vector<std::size_t> cond_idx;
  for (const std::string& name : subset) cond_idx.push_back(data.column_index(name));

  std::vector<double> coord_min(m, std::numeric_limits<double>::infinity());
  std::vector<double> coord_max(m, -std::numeric_limits<double>::infinity());

  out.per_domain_pvalues.resize(m);
  out.per_domain_statistics.resize(m);
  out.per_domain_z.resize(m);
  std::vector<double> x(cond_idx.size());
  for (std::size_t e = 0; e < m; ++e) {
    const DomainBlock& block = data.block(e);
    const std::size_t eval_begin = cfg.split ? fit_data.block(e).n_rows : 0;
    const std::vector<std::size_t> rows =
        test_rows(eval_begin, block.n_rows, cfg.max_test_points,
                  derive_seed(cfg.seed, "test-points", e));

    std::vector<std::vector<double>> profile_pts;
    std::vector<std::vector<double>> cond_pts;
    profile_pts.reserve(rows.size());
    cond_pts.reserve(rows.size());
    for (std::size_t r : rows) {
      for (std::size_t k = 0; k < cond_idx.size(); ++k) x[k] = block.columns[cond_idx[k]][r];
      const SimplexVector profile = density_profile(models, block.columns[target_idx][r], x);
      for (std::size_t i = 0; i < m; ++i) {
        coord_min[i] = std::min(coord_min[i], profile[i]);
        coord_max[i] = std::max(coord_max[i], profile[i]);
      }
      // The last simplex coordinate is redundant; drop it from the kernel.
      profile_pts.emplace_back(profile.entries.begin(), profile.entries.end() - 1);
      cond_pts.push_back(x);
    }

    const TestResult res = permutation_pvalue(profile_pts, cond_pts, cfg.permutations,
                                              derive_seed(cfg.seed, "hsic", e));
    out.per_domain_pvalues[e] = res.p_value;
    out.per_domain_statistics[e] = res.statistic;
    out.per_domain_z[e] = res.z;
  }

  out.L = *std::min_element(out.per_domain_pvalues.begin(), out.per_domain_pvalues.end());
  out.max_z = *std::max_element(out.per_domain_z.begin(), out.per_domain_z.end());

  bool constant = true;
  for (std::size_t i = 0; i < m; ++i) {
    if (coord_max[i] - coord_min[i] > kConstantProfileTol) constant = false;
  }
  out.uninformative = m == 1 || constant;
  return out;
}

const MultiDomainDataset& prepare(const MultiDomainDataset& ds,
                                  const std::vector<std::string>& needed, bool standardize_on,
                                  std::optional<StandardizeResult>& storage) {
  if (!standardize_on) return ds;
  storage = standardize(ds, needed);
  return storage->dataset;
}

void enumerate_subsets_rec(const std::vector<std::string>& candidates, std::size_t size,
                           std::size_t start, std::vector<std::string>& current,
                           std::vector<std::vector<std::string>>& out) {
  if (current.size() == size) {
    out.push_back(current);
    return;
  }
  for (std::size_t i = start; i < candidates.size(); ++i) {
    current.push_back(candidates[i]);
    enumerate_subsets_rec(candidates, size, i + 1, current, out);
    current.pop_back();
  }
}

/// All subsets of a given size in lexicographic column order.
std::vector<std::vector<std::string>> subsets_of_size(const std::vector<std::string>& candidates,
                                                      std::size_t size) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> current;
  enumerate_subsets_rec(candidates, size, 0, current, out);
  return out;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::size_t order_index(const std::vector<std::string>& column_order, const std::string& name) {
  for (std::size_t i = 0; i < column_order.size(); ++i) {
    if (column_order[i] == name) return i;
  }
  throw UnknownColumn(name);
}

bool h2_better(const SubsetScore& a, const SubsetScore& b,
               const std::vector<std::string>& column_order) {
  if (a.L != b.L) return a.L > b.L;
  const double ma = median_of(a.per_domain_pvalues);
  const double mb = median_of(b.per_domain_pvalues);
  if (ma != mb) return ma > mb;
  // Lexicographic column order as the final deterministic tie-break.
  std::vector<std::size_t> ia, ib;
  for (const auto& n : a.subset) ia.push_back(order_index(column_order, n));
  for (const auto& n : b.subset) ib.push_back(order_index(column_order, n));
  return ia < ib;
}

std::vector<std::string> column_names(const MultiDomainDataset& ds) {
  std::vector<std::string> out;
  out.reserve(ds.column_count());
  for (const Column& c : ds.columns()) out.push_back(c.name);
  return out;
}

bool report_uninformative(const std::vector<SubsetScore>& subsets, std::size_t m) {
  bool any = false;
  for (const SubsetScore& s : subsets) {
    if (s.vacuous) continue;
    any = true;
    if (!s.uninformative) return false;
  }
  return any ? true : m == 1;
}

}  // namespace

SubsetScore score_subset(const MultiDomainDataset& ds, const std::string& target,
                         const std::vector<std::string>& subset, const ScoreConfig& cfg) {
  ds.column_index(target);
  const std::vector<std::string> names = normalize_subset(ds, target, subset);

  std::vector<std::string> needed = names;
  needed.push_back(target);
  std::optional<StandardizeResult> storage;
  const MultiDomainDataset& data = prepare(ds, needed, cfg.standardize, storage);
  return score_prepared(data, target, names, cfg);
}

DiscoveryReport h1_parent_set(const MultiDomainDataset& ds, const std::string& target,
                              const std::vector<std::string>& candidates, double c,
                              const ScoreConfig& cfg) {
  if (!(c > 0.0 && c < 1.0)) throw Error("threshold c must lie strictly between 0 and 1");
  const std::vector<std::string> cand = normalize_subset(ds, target, candidates);
  if (cand.size() > static_cast<std::size_t>(cfg.max_candidates)) {
    throw TooManyCandidates(std::to_string(cand.size()) + " candidates exceed the cap of " +
                            std::to_string(cfg.max_candidates));
  }

  std::vector<std::string> needed = cand;
  needed.push_back(target);
  std::optional<StandardizeResult> storage;
  const MultiDomainDataset& data = prepare(ds, needed, cfg.standardize, storage);

  DiscoveryReport report;
  report.target = target;
  report.candidates = cand;
  report.method = "h1";
  report.threshold_c = c;
  report.seed = cfg.seed;
  report.settings = cfg;

  for (std::size_t size = 0; size <= cand.size(); ++size) {
    for (const auto& subset : subsets_of_size(cand, size)) {
      report.subsets.push_back(score_prepared(data, target, subset, cfg));
    }
  }

  report.chosen = h1_union(report.subsets, c, column_names(ds));
  report.uninformative = report_uninformative(report.subsets, ds.m());
  return report;
}

std::vector<std::string> h1_union(const std::vector<SubsetScore>& subsets, double c,
                                  const std::vector<std::string>& column_order) {
  std::vector<std::size_t> chosen_idx;
  for (const SubsetScore& s : subsets) {
    if (s.L > c) {
      for (const std::string& name : s.subset) {
        chosen_idx.push_back(order_index(column_order, name));
      }
    }
  }
  std::sort(chosen_idx.begin(), chosen_idx.end());
  chosen_idx.erase(std::unique(chosen_idx.begin(), chosen_idx.end()), chosen_idx.end());
  std::vector<std::string> out;
  for (std::size_t i : chosen_idx) out.push_back(column_order[i]);
  return out;
}

const SubsetScore* h2_choose(const std::vector<SubsetScore>& subsets, int k,
                             const std::vector<std::string>& column_order) {
  const SubsetScore* best = nullptr;
  for (const SubsetScore& s : subsets) {
    if (s.subset.size() != static_cast<std::size_t>(k)) continue;
    if (best == nullptr || h2_better(s, *best, column_order)) best = &s;
  }
  return best;
}

DiscoveryReport h2_parent_set(const MultiDomainDataset& ds, const std::string& target,
                              const std::vector<std::string>& candidates, int k,
                              const ScoreConfig& cfg) {
  const std::vector<std::string> cand = normalize_subset(ds, target, candidates);
  if (k < 0 || static_cast<std::size_t>(k) > cand.size()) {
    throw Error("k must lie in [0, |candidates|]");
  }

  DiscoveryReport report;
  report.target = target;
  report.candidates = cand;
  report.method = "h2";
  report.k = k;
  report.seed = cfg.seed;
  report.settings = cfg;

  if (k == 0) {
    SubsetScore empty;
    empty.per_domain_pvalues.assign(ds.m(), 1.0);
    empty.L = 1.0;
    empty.vacuous = true;
    empty.uninformative = ds.m() == 1;
    report.subsets.push_back(std::move(empty));
    report.uninformative = ds.m() == 1;
    return report;
  }

  std::vector<std::string> needed = cand;
  needed.push_back(target);
  std::optional<StandardizeResult> storage;
  const MultiDomainDataset& data = prepare(ds, needed, cfg.standardize, storage);

  for (const auto& subset : subsets_of_size(cand, static_cast<std::size_t>(k))) {
    report.subsets.push_back(score_prepared(data, target, subset, cfg));
  }
  const SubsetScore* best = h2_choose(report.subsets, k, column_names(ds));
  if (best != nullptr) report.chosen = best->subset;
  report.uninformative = report_uninformative(report.subsets, ds.m());
  return report;
}

DirectionResult decide_direction(const MultiDomainDataset& ds, const std::string& x,
                                 const std::string& y, const ScoreConfig& cfg) {
  if (x == y) throw Error("direction needs two distinct columns");
  DirectionResult res;
  res.forward = score_subset(ds, y, {x}, cfg);
  res.reverse = score_subset(ds, x, {y}, cfg);
  if (std::abs(res.forward.L - res.reverse.L) >= kDirectionTol) {
    res.label = res.forward.L > res.reverse.L ? DirectionLabel::x_causes_y
                                              : DirectionLabel::y_causes_x;
  } else if (std::abs(res.forward.max_z - res.reverse.max_z) >= kDirectionTol) {
    // Both tests saturated (or both passed) at the same p-value; the
    // standardized statistics still order the two dependence strengths.
    res.label = res.forward.max_z < res.reverse.max_z ? DirectionLabel::x_causes_y
                                                      : DirectionLabel::y_causes_x;
  } else {
    res.label = DirectionLabel::inconclusive;
  }
  res.uninformative = res.forward.uninformative && res.reverse.uninformative;
  return res;
}

Metrics evaluate_metrics(const std::vector<std::vector<std::string>>& chosen,
                         const std::vector<std::vector<std::string>>& truths) {
  if (chosen.size() != truths.size()) {
    throw LengthMismatch("chosen and truth lists differ in length");
  }

  std::size_t tp = 0, fp = 0, fn = 0, exact = 0;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    std::vector<std::string> c = chosen[i];
    std::vector<std::string> t = truths[i];
    std::sort(c.begin(), c.end());
    std::sort(t.begin(), t.end());
    if (c == t) ++exact;
    for (const std::string& name : c) {
      if (std::binary_search(t.begin(), t.end(), name)) {
        ++tp;
      } else {
        ++fp;
      }
    }
    for (const std::string& name : t) {
      if (!std::binary_search(c.begin(), c.end(), name)) ++fn;
    }
  }

  Metrics m;
  m.precision_defined = tp + fp > 0;
  m.recall_defined = tp + fn > 0;
  m.precision = m.precision_defined ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  m.recall = m.recall_defined ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  m.accuracy = chosen.empty() ? 0.0
                              : static_cast<double>(exact) / static_cast<double>(chosen.size());
  return m;
}

}  // namespace mdcd
