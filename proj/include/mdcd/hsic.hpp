#pragma once

#include <cstdint>
#include <vector>

#include "mdcd/errors.hpp"

namespace mdcd {

/// Symmetric Gaussian Gram matrix with unit diagonal, stored row-major.
struct KernelMatrix {
  std::size_t n = 0;
  double bandwidth = 0.0;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

/// Median pairwise Euclidean distance over a subsample of min(n, 1000)
/// points (seeded when n > 1000). Falls back to the mean positive distance
/// when the median is 0; throws DegeneratePoints when all points coincide.
double median_heuristic(const std::vector<std::vector<double>>& points,
                        std::uint64_t seed = 0);

KernelMatrix gaussian_gram(const std::vector<std::vector<double>>& points,
                           double bandwidth);

/// Biased V-statistic HSIC: (1/n^2) tr(K H L H), H = I - (1/n) 11^T,
/// clamped at 0 against negative rounding.
double hsic_statistic(const KernelMatrix& K, const KernelMatrix& L);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int permutations = 0;
  std::uint64_t seed = 0;
  /// Mean and standard deviation of the permutation null, and the observed
  /// statistic standardized against them. The permutation p-value floors at
  /// 1/(B+1); the z-score keeps the ordering between two strong rejections.
  double null_mean = 0.0;
  double null_sd = 0.0;
  double z = 0.0;
};

/// Permutation-null HSIC independence test. Bandwidths come from the median
/// heuristic on the original samples; the null permutes y-rows with a seeded
/// RNG, reusing the Gram matrices through index permutation. The p-value is
/// (1 + #{permuted >= observed}) / (B + 1), so it lives in [1/(B+1), 1].
/// A constant sample on either side yields statistic 0 and p-value 1.
TestResult permutation_pvalue(const std::vector<std::vector<double>>& x_points,
                              const std::vector<std::vector<double>>& y_points,
                              int permutations, std::uint64_t seed);

}  // namespace mdcd
