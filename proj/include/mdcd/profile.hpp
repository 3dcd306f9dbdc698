#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mdcd/density.hpp"

namespace mdcd {

/// A point on the m-simplex: nonnegative entries summing to 1 (within 1e-9).
struct SimplexVector {
  std::vector<double> entries;

  std::size_t size() const { return entries.size(); }
  double operator[](std::size_t i) const { return entries[i]; }
};

/// Normalizes a vector of per-domain density evaluations onto the simplex,
/// with compensated summation: the entries span many orders of magnitude.
/// Throws DegenerateDensity if the total mass is not positive (unreachable
/// when the inputs respect the density floor; guarded anyway).
SimplexVector normalize_to_simplex(std::span<const double> weights);

/// The per-row simplex value paired with the conditioning point it was
/// computed at and the 1-based domain the row came from.
struct ProfileSample {
  SimplexVector profile;
  std::vector<double> conditioner_values;
  int domain = 0;
};

/// Evaluates every domain model at the same (y, x) and projects the resulting
/// density vector onto the simplex. All models must share the fit signature.
SimplexVector density_profile(std::span<const ConditionalDensityModel> models, double y,
                              std::span<const double> x);

/// Oracle-density variant: analytic conditional densities take the place of
/// fitted models, separating identification-level behaviour from estimation
/// error in tests.
using DensityFn = std::function<double(double y, std::span<const double> x)>;
SimplexVector density_profile(std::span<const DensityFn> densities, double y,
                              std::span<const double> x);

/// One ProfileSample per dataset row, in dataset order (block 0 rows first).
std::vector<ProfileSample> profile_samples(std::span<const ConditionalDensityModel> models,
                                           const MultiDomainDataset& ds,
                                           const std::string& target,
                                           const std::vector<std::string>& conditioners);

}  // namespace mdcd
