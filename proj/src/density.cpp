#include "mdcd/density.hpp"

#include <algorithm>
#include <cmath>

namespace mdcd {

namespace {

constexpr double kInvSqrtTwoPi = 0.39894228040143267794;
constexpr double kUnderflowGuard = 1e-300;

double sample_std(std::span<const double> values) {
  const auto n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) {
    const double d = v - mean;
    ss += d * d;
  }
  return n > 1.0 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

/// Least-squares CV over a shared multiplier on the normal-reference
/// bandwidths of the continuous dimensions: minimizes the standard
/// integrated-squared-error estimate R(f_c) - 2/n(n-1) sum_i f_c,-i(z_i)
/// for the joint Gaussian-product KDE. The per-pair scaled distance is
/// multiplier-invariant, so each grid point costs one pass.
double lscv_multiplier(const std::vector<double>& flat, std::size_t n, std::size_t d,
                       const std::vector<double>& base_h) {
  if (n < 4 || d == 0) return 1.0;

  double log_h_prod = 0.0;
  for (double h : base_h) log_h_prod += std::log(h);

  double best_c = 1.0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int gi = 0; gi < 17; ++gi) {
    const double c = std::exp(std::log(0.25) + (std::log(4.0) - std::log(0.25)) * gi / 16.0);
    double sum_r = 0.0;   // pairwise terms of integral(f^2), convolution kernel
    double sum_cv = 0.0;  // pairwise terms of the leave-one-out sum
    for (std::size_t i = 0; i < n; ++i) {
      const double* zi = flat.data() + i * d;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double* zj = flat.data() + j * d;
        double rho = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double u = (zi[k] - zj[k]) / base_h[k];
          rho += u * u;
        }
        sum_r += std::exp(-rho / (4.0 * c * c));
        sum_cv += std::exp(-rho / (2.0 * c * c));
      }
    }
    const double dd = static_cast<double>(d);
    const double nn = static_cast<double>(n);
    const double conv_norm = std::exp(-dd * std::log(2.0 * std::sqrt(M_PI) * c) - log_h_prod);
    const double kern_norm = std::exp(dd * std::log(kInvSqrtTwoPi / c) - log_h_prod);
    const double r_term = conv_norm * (nn + 2.0 * sum_r) / (nn * nn);
    const double cv_term = 2.0 * kern_norm * (2.0 * sum_cv) / (nn * (nn - 1.0));
    const double val = r_term - cv_term;
    if (val < best_val) {
      best_val = val;
      best_c = c;
    }
  }
  return best_c;
}

}  // namespace

double normal_reference_bandwidth(std::span<const double> values, int total_dims) {
  if (values.size() < 2) throw InsufficientData("bandwidth needs at least 2 values");
  const double sd = sample_std(values);
  if (!(sd > 0.0)) throw DegenerateSample("constant sample has no bandwidth");
  const double n = static_cast<double>(values.size());
  return 1.06 * sd * std::pow(n, -1.0 / (4.0 + static_cast<double>(total_dims)));
}

ConditionalDensityModel ConditionalDensityModel::fit(const MultiDomainDataset& ds,
                                                     std::size_t domain,
                                                     const std::string& target,
                                                     const std::vector<std::string>& conditioners,
                                                     const FitOptions& opts) {
  const std::size_t target_idx = ds.column_index(target);
  std::vector<std::size_t> cond_idx;
  cond_idx.reserve(conditioners.size());
  for (const std::string& name : conditioners) {
    if (name == target) throw Error("target '" + target + "' cannot condition on itself");
    cond_idx.push_back(ds.column_index(name));
  }

  const DomainBlock& block = ds.block(domain);
  const std::size_t n = block.n_rows;
  if (n < 2) throw InsufficientData("need at least 2 rows to fit a conditional density");

  const bool target_discrete = ds.column(target_idx).kind == ColumnKind::discrete;
  bool all_discrete = target_discrete;
  bool any_discrete = target_discrete;
  for (std::size_t c : cond_idx) {
    const bool disc = ds.column(c).kind == ColumnKind::discrete;
    all_discrete = all_discrete && disc;
    any_discrete = any_discrete || disc;
  }

  ConditionalDensityModel model;
  model.floor_ = opts.density_floor;
  model.leak_ = opts.discrete_leak;

  if (all_discrete) {
    model.kind_ = DensityModelKind::discrete_table;
    model.lambda_ = opts.smoothing_lambda;

    std::vector<long long> levels;
    for (std::size_t r = 0; r < n; ++r) {
      levels.push_back(std::llround(block.columns[target_idx][r]));
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    model.target_levels_ = std::move(levels);

    for (std::size_t r = 0; r < n; ++r) {
      std::vector<long long> key(cond_idx.size());
      for (std::size_t k = 0; k < cond_idx.size(); ++k) {
        key[k] = std::llround(block.columns[cond_idx[k]][r]);
      }
      auto& entry = model.table_[key];
      if (entry.second.empty()) entry.second.assign(model.target_levels_.size(), 0.0);
      const long long y = std::llround(block.columns[target_idx][r]);
      const auto it = std::lower_bound(model.target_levels_.begin(),
                                       model.target_levels_.end(), y);
      entry.first += 1.0;
      entry.second[static_cast<std::size_t>(it - model.target_levels_.begin())] += 1.0;
    }
    // dims_ records arity for the DimensionMismatch check.
    model.dims_.assign(cond_idx.size(), DimKernel{false, 0.0});
    return model;
  }

  model.kind_ = any_discrete ? DensityModelKind::mixed : DensityModelKind::continuous_kernel;
  model.n_train_ = n;
  model.target_discrete_ = target_discrete;

  const std::size_t d = cond_idx.size();
  model.train_cond_.resize(n * d);
  model.train_target_.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < d; ++k) {
      model.train_cond_[r * d + k] = block.columns[cond_idx[k]][r];
    }
    model.train_target_[r] = block.columns[target_idx][r];
  }

  int cont_cond_dims = 0;
  for (std::size_t c : cond_idx) {
    if (ds.column(c).kind == ColumnKind::continuous) ++cont_cond_dims;
  }

  model.dims_.resize(d);
  model.bandwidths_.conditioner.assign(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    if (ds.column(cond_idx[k]).kind == ColumnKind::discrete) {
      model.dims_[k] = DimKernel{false, 0.0};
    } else {
      const double h = opts.bandwidth_scale *
                       normal_reference_bandwidth(block.columns[cond_idx[k]], cont_cond_dims);
      model.dims_[k] = DimKernel{true, 1.0 / (2.0 * h * h)};
      model.bandwidths_.conditioner[k] = h;
    }
  }
  double b = 0.0;
  if (!target_discrete) {
    b = opts.bandwidth_scale * normal_reference_bandwidth(block.columns[target_idx], 1);
  }

  if (opts.bandwidth_method == BandwidthMethod::lscv) {
    // Joint KDE over the continuous dimensions selects one shared multiplier.
    std::vector<double> base_h;
    std::vector<std::size_t> cont_cols;
    for (std::size_t k = 0; k < d; ++k) {
      if (model.dims_[k].gaussian) {
        base_h.push_back(model.bandwidths_.conditioner[k]);
        cont_cols.push_back(cond_idx[k]);
      }
    }
    if (!target_discrete) {
      base_h.push_back(b);
      cont_cols.push_back(target_idx);
    }
    std::vector<double> flat(n * cont_cols.size());
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t k = 0; k < cont_cols.size(); ++k) {
        flat[r * cont_cols.size() + k] = block.columns[cont_cols[k]][r];
      }
    }
    const double mult = lscv_multiplier(flat, n, cont_cols.size(), base_h);
    for (std::size_t k = 0; k < d; ++k) {
      if (model.dims_[k].gaussian) {
        const double h = model.bandwidths_.conditioner[k] * mult;
        model.dims_[k].inv_two_h2 = 1.0 / (2.0 * h * h);
        model.bandwidths_.conditioner[k] = h;
      }
    }
    if (!target_discrete) b *= mult;
  }

  if (!target_discrete) {
    model.bandwidths_.target = b;
    model.target_inv_two_b2_ = 1.0 / (2.0 * b * b);
    model.target_norm_ = kInvSqrtTwoPi / b;
  }
  return model;
}

double ConditionalDensityModel::eval(double y, std::span<const double> x) const {
  if (x.size() != dims_.size()) {
    throw DimensionMismatch("expected " + std::to_string(dims_.size()) +
                            " conditioner values, got " + std::to_string(x.size()));
  }
  const double v = kind_ == DensityModelKind::discrete_table ? eval_table(y, x)
                                                             : eval_kernel(y, x);
  return v > floor_ ? v : floor_;
}

double ConditionalDensityModel::eval_table(double y, std::span<const double> x) const {
  std::vector<long long> key(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) key[k] = std::llround(x[k]);

  double n_x = 0.0;
  double count = 0.0;
  const auto it = table_.find(key);
  if (it != table_.end()) {
    n_x = it->second.first;
    const long long level = std::llround(y);
    const auto pos = std::lower_bound(target_levels_.begin(), target_levels_.end(), level);
    if (pos != target_levels_.end() && *pos == level) {
      count = it->second.second[static_cast<std::size_t>(pos - target_levels_.begin())];
    }
  }
  const double levels = static_cast<double>(target_levels_.size());
  return (count + lambda_) / (n_x + lambda_ * levels);
}

double ConditionalDensityModel::eval_kernel(double y, std::span<const double> x) const {
  const std::size_t d = dims_.size();
  const double* tp = train_cond_.data();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t l = 0; l < n_train_; ++l, tp += d) {
    double s = 0.0;
    double match = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      if (dims_[k].gaussian) {
        const double u = x[k] - tp[k];
        s += dims_[k].inv_two_h2 * u * u;
      } else if (x[k] != tp[k]) {
        match *= leak_;
      }
    }
    const double wx = match * std::exp(-s);
    den += wx;
    if (target_discrete_) {
      num += wx * (y == train_target_[l] ? 1.0 : leak_);
    } else {
      const double dy = y - train_target_[l];
      num += wx * std::exp(-target_inv_two_b2_ * dy * dy);
    }
  }
  if (den < kUnderflowGuard) return floor_;
  const double scale = target_discrete_ ? 1.0 : target_norm_;
  return scale * num / den;
}

}  // namespace mdcd
