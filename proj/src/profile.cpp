#include "mdcd/profile.hpp"

#include <cmath>

namespace mdcd {

namespace {

// Neumaier compensated sum.
double stable_sum(std::span<const double> values) {
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

}  // namespace

SimplexVector normalize_to_simplex(std::span<const double> weights) {
  const double total = stable_sum(weights);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw DegenerateDensity("density vector has no positive mass");
  }
  SimplexVector out;
  out.entries.resize(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    out.entries[i] = weights[i] / total;
  }
  return out;
}

SimplexVector density_profile(std::span<const ConditionalDensityModel> models, double y,
                              std::span<const double> x) {
  std::vector<double> w(models.size());
  for (std::size_t i = 0; i < models.size(); ++i) w[i] = models[i].eval(y, x);
  return normalize_to_simplex(w);
}

SimplexVector density_profile(std::span<const DensityFn> densities, double y,
                              std::span<const double> x) {
  std::vector<double> w(densities.size());
  for (std::size_t i = 0; i < densities.size(); ++i) w[i] = densities[i](y, x);
  return normalize_to_simplex(w);
}

std::vector<ProfileSample> profile_samples(std::span<const ConditionalDensityModel> models,
                                           const MultiDomainDataset& ds,
                                           const std::string& target,
                                           const std::vector<std::string>& conditioners) {
  if (models.size() != ds.m()) {
    throw DimensionMismatch("need one fitted model per domain");
  }
  const std::size_t target_idx = ds.column_index(target);
  std::vector<std::size_t> cond_idx;
  cond_idx.reserve(conditioners.size());
  for (const std::string& name : conditioners) cond_idx.push_back(ds.column_index(name));

  std::vector<ProfileSample> out;
  out.reserve(ds.total_rows());
  std::vector<double> x(cond_idx.size());
  for (std::size_t e = 0; e < ds.m(); ++e) {
    const DomainBlock& block = ds.block(e);
    for (std::size_t r = 0; r < block.n_rows; ++r) {
      for (std::size_t k = 0; k < cond_idx.size(); ++k) {
        x[k] = block.columns[cond_idx[k]][r];
      }
      ProfileSample s;
      s.profile = density_profile(models, block.columns[target_idx][r], x);
      s.conditioner_values = x;
      s.domain = static_cast<int>(e) + 1;
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace mdcd
