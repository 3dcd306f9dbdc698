#include "mdcd/hsic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdcd/rng.hpp"

namespace mdcd {

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double u = a[k] - b[k];
    s += u * u;
  }
  return s;
}

/// K double-centered: Kc_ij = K_ij - rowmean_i - rowmean_j + grandmean.
std::vector<double> double_center(const KernelMatrix& K) {
  const std::size_t n = K.n;
  std::vector<double> row_mean(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const double* row = K.values.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) s += row[j];
    row_mean[i] = s / static_cast<double>(n);
    grand += s;
  }
  grand /= static_cast<double>(n) * static_cast<double>(n);

  std::vector<double> out(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = K.values.data() + i * n;
    double* dst = out.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      dst[j] = row[j] - row_mean[i] - row_mean[j] + grand;
    }
  }
  return out;
}

/// sum_ij A_ij * B_ij with a fixed 4-way unrolled association, so the result
/// is reproducible and the loop keeps the FP units busy without -ffast-math.
double frobenius_dot(const double* a, const double* b, std::size_t count) {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    a0 += a[i] * b[i];
    a1 += a[i + 1] * b[i + 1];
    a2 += a[i + 2] * b[i + 2];
    a3 += a[i + 3] * b[i + 3];
  }
  for (; i < count; ++i) a0 += a[i] * b[i];
  return (a0 + a1) + (a2 + a3);
}

/// sum_ij Kc_ij * Lc[p_i][p_j] for one permutation p. Valid because the
/// centering matrix commutes with permutation conjugation, so permuting the
/// centered matrix equals centering the permuted one.
double permuted_dot(const std::vector<double>& kc, const std::vector<double>& lc,
                    std::size_t n, const std::vector<std::uint32_t>& p) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* krow = kc.data() + i * n;
    const double* lrow = lc.data() + static_cast<std::size_t>(p[i]) * n;
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      a0 += krow[j] * lrow[p[j]];
      a1 += krow[j + 1] * lrow[p[j + 1]];
      a2 += krow[j + 2] * lrow[p[j + 2]];
      a3 += krow[j + 3] * lrow[p[j + 3]];
    }
    for (; j < n; ++j) a0 += krow[j] * lrow[p[j]];
    total += (a0 + a1) + (a2 + a3);
  }
  return total;
}

bool all_identical(const std::vector<std::vector<double>>& points) {
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i] != points[0]) return false;
  }
  return true;
}

}  // namespace

double median_heuristic(const std::vector<std::vector<double>>& points, std::uint64_t seed) {
  const std::size_t n = points.size();
  if (n < 2) throw DegeneratePoints("median heuristic needs at least 2 points");

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  constexpr std::size_t kCap = 1000;
  if (n > kCap) {
    Rng rng(derive_seed(seed, "median-subsample"));
    rng.shuffle(idx);
    idx.resize(kCap);
    std::sort(idx.begin(), idx.end());
  }

  std::vector<double> dist;
  dist.reserve(idx.size() * (idx.size() - 1) / 2);
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      dist.push_back(std::sqrt(squared_distance(points[idx[a]], points[idx[b]])));
    }
  }
  const std::size_t mid = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + mid, dist.end());
  double med = dist[mid];
  if (med > 0.0) return med;

  double sum = 0.0;
  std::size_t positives = 0;
  for (double v : dist) {
    if (v > 0.0) {
      sum += v;
      ++positives;
    }
  }
  if (positives == 0) throw DegeneratePoints("all points identical");
  return sum / static_cast<double>(positives);
}

KernelMatrix gaussian_gram(const std::vector<std::vector<double>>& points, double bandwidth) {
  if (!(bandwidth > 0.0)) throw Error("kernel bandwidth must be positive");
  const std::size_t n = points.size();
  KernelMatrix K;
  K.n = n;
  K.bandwidth = bandwidth;
  K.values.assign(n * n, 0.0);
  const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
  for (std::size_t i = 0; i < n; ++i) {
    K.values[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::exp(-inv * squared_distance(points[i], points[j]));
      K.values[i * n + j] = v;
      K.values[j * n + i] = v;
    }
  }
  return K;
}

double hsic_statistic(const KernelMatrix& K, const KernelMatrix& L) {
  if (K.n != L.n) throw SizeMismatch("kernel matrices differ in size");
  if (K.n < 2) throw Error("HSIC needs at least 2 points");
  // Centering both sides makes either constant input an exact zero.
  const std::vector<double> kc = double_center(K);
  const std::vector<double> lc = double_center(L);
  const double s = frobenius_dot(kc.data(), lc.data(), K.n * K.n) /
                   (static_cast<double>(K.n) * static_cast<double>(K.n));
  return s > 0.0 ? s : 0.0;
}

TestResult permutation_pvalue(const std::vector<std::vector<double>>& x_points,
                              const std::vector<std::vector<double>>& y_points,
                              int permutations, std::uint64_t seed) {
  const std::size_t n = x_points.size();
  if (n != y_points.size()) throw SizeMismatch("sample sizes differ");
  if (n < 5) throw TooFewSamples("permutation test needs at least 5 samples");
  if (permutations < 99) throw Error("permutation count must be at least 99");

  // A constant sample makes its centered Gram matrix vanish; any bandwidth
  // yields the all-ones matrix there, so 1.0 stands in for the undefined
  // median heuristic.
  double bw_x = 1.0;
  double bw_y = 1.0;
  if (!all_identical(x_points)) bw_x = median_heuristic(x_points, derive_seed(seed, "bw-x"));
  if (!all_identical(y_points)) bw_y = median_heuristic(y_points, derive_seed(seed, "bw-y"));

  const KernelMatrix K = gaussian_gram(x_points, bw_x);
  const KernelMatrix L = gaussian_gram(y_points, bw_y);
  const std::vector<double> kc = double_center(K);
  const std::vector<double> lc = double_center(L);
  const double n2 = static_cast<double>(n) * static_cast<double>(n);

  auto clamp0 = [](double v) { return v > 0.0 ? v : 0.0; };
  const double observed = clamp0(frobenius_dot(kc.data(), lc.data(), n * n) / n2);

  std::vector<std::uint32_t> perm(n);
  int exceed = 0;
  double null_sum = 0.0;
  double null_sq = 0.0;
  for (int b = 0; b < permutations; ++b) {
    Rng rng(derive_seed(seed, "replica", static_cast<std::uint64_t>(b)));
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = n; i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.next_u64() % i);
      std::swap(perm[i - 1], perm[j]);
    }
    const double s = clamp0(permuted_dot(kc, lc, n, perm) / n2);
    if (s >= observed) ++exceed;
    null_sum += s;
    null_sq += s * s;
  }

  TestResult res;
  res.statistic = observed;
  res.p_value = (1.0 + static_cast<double>(exceed)) / (static_cast<double>(permutations) + 1.0);
  res.permutations = permutations;
  res.seed = seed;
  const double bn = static_cast<double>(permutations);
  res.null_mean = null_sum / bn;
  const double var = null_sq / bn - res.null_mean * res.null_mean;
  res.null_sd = var > 0.0 ? std::sqrt(var) : 0.0;
  res.z = res.null_sd > 0.0 ? (observed - res.null_mean) / res.null_sd : 0.0;
  return res;
}

}  // namespace mdcd
