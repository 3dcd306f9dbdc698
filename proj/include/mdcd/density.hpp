#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "mdcd/dataset.hpp"

namespace mdcd {

enum class BandwidthMethod { normal_reference, lscv };

struct FitOptions {
  BandwidthMethod bandwidth_method = BandwidthMethod::normal_reference;
  /// Multiplier applied on top of the selected bandwidths.
  double bandwidth_scale = 1.0;
  /// Add-lambda smoothing mass for discrete conditional tables.
  double smoothing_lambda = 0.5;
  /// Off-level weight of the exact-match kernel on discrete dimensions.
  double discrete_leak = 0.05;
  /// Smallest density/mass ever returned by eval().
  double density_floor = 1e-12;
};

/// Normal-reference (Silverman) rule: 1.06 * sd * n^(-1/(4 + total_dims)).
/// total_dims = 1 reproduces the classic n^(-1/5) univariate rule; conditioner
/// dimensions pass the total continuous conditioning dimensionality.
double normal_reference_bandwidth(std::span<const double> values, int total_dims = 1);

struct Bandwidths {
  std::vector<double> conditioner;  // one entry per conditioner dim (0 for discrete dims)
  double target = 0.0;              // 0 when the target is discrete
};

enum class DensityModelKind { continuous_kernel, discrete_table, mixed };

/// Per-domain estimator of p(target | conditioners), evaluable anywhere.
///
/// Continuous data uses a Nadaraya-Watson conditional density with Gaussian
/// product kernels; all-discrete data uses an add-lambda smoothed conditional
/// frequency table; mixed data uses Gaussian kernels on continuous dimensions
/// and exact-match kernels with a small leak on discrete ones. An empty
/// conditioner set collapses to the marginal estimator of the target.
/// Immutable after fit; eval is pure and reentrant.
class ConditionalDensityModel {
 public:
  static ConditionalDensityModel fit(const MultiDomainDataset& ds, std::size_t domain,
                                     const std::string& target,
                                     const std::vector<std::string>& conditioners,
                                     const FitOptions& opts = {});

  /// Density (continuous target) or smoothed mass (discrete target) at
  /// (y, x). Always finite and >= the configured floor; when the conditioner
  /// kernel mass underflows below 1e-300 the floor is returned instead of 0/0.
  double eval(double y, std::span<const double> x) const;

  DensityModelKind kind() const { return kind_; }
  std::size_t conditioner_count() const { return dims_.size(); }
  const Bandwidths& bandwidths() const { return bandwidths_; }
  double floor() const { return floor_; }

 private:
  ConditionalDensityModel() = default;

  struct DimKernel {
    bool gaussian = true;
    double inv_two_h2 = 0.0;  // 1 / (2 h^2) for Gaussian dims
  };

  double eval_kernel(double y, std::span<const double> x) const;
  double eval_table(double y, std::span<const double> x) const;

  DensityModelKind kind_ = DensityModelKind::continuous_kernel;
  double floor_ = 1e-12;

  // Kernel case.
  std::size_t n_train_ = 0;
  std::vector<double> train_cond_;  // n x d, point-major
  std::vector<double> train_target_;
  std::vector<DimKernel> dims_;
  bool target_discrete_ = false;
  double target_inv_two_b2_ = 0.0;
  double target_norm_ = 1.0;  // 1 / (b sqrt(2 pi)) for a continuous target
  double leak_ = 0.05;
  Bandwidths bandwidths_;

  // Table case.
  double lambda_ = 0.5;
  std::vector<long long> target_levels_;  // sorted distinct observed levels
  std::map<std::vector<long long>, std::pair<double, std::vector<double>>> table_;
};

}  // namespace mdcd
