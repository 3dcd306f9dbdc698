#include <doctest.h>

#include <cmath>

#include "mdcd/density.hpp"
#include "test_util.hpp"

using namespace mdcd;

namespace {

constexpr double kInvSqrtTwoPi = 0.39894228040143267794;

double normal_pdf(double v, double mean, double sd) {
  const double z = (v - mean) / sd;
  return kInvSqrtTwoPi / sd * std::exp(-0.5 * z * z);
}

/// Two-domain dataset whose first domain carries the add-lambda example:
/// given X=0, Y=1 in 3 of 4 rows.
MultiDomainDataset table_example() {
  return testutil::make_dataset(
      {{"X", ColumnKind::discrete}, {"Y", ColumnKind::discrete}},
      {{{0, 0, 0, 0, 1, 1}, {1, 1, 1, 0, 0, 1}}});
}

}  // namespace

TEST_CASE("normal reference bandwidth follows the 1.06 rule") {
  std::vector<double> values = testutil::normal_draws(5, 100);
  // Rescale to unit sample std so the formula collapses to 1.06 * n^(-1/5).
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (values.size() - 1.0));
  for (double& v : values) v = (v - mean) / sd;

  const double bw = normal_reference_bandwidth(values, 1);
  CHECK(bw == doctest::Approx(1.06 * std::pow(100.0, -0.2)).epsilon(1e-9));
  CHECK(bw == doctest::Approx(0.422).epsilon(2e-3));
}

TEST_CASE("bandwidth edge cases") {
  CHECK_THROWS_AS(normal_reference_bandwidth(std::vector<double>{1.0, 1.0, 1.0}),
                  DegenerateSample);
  CHECK_THROWS_AS(normal_reference_bandwidth(std::vector<double>{1.0}), InsufficientData);

  // Monotone decreasing in n at fixed spread.
  double prev = 1e9;
  for (std::size_t n : {50, 200, 1000}) {
    std::vector<double> v = testutil::normal_draws(7, n);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (v.size() - 1.0));
    for (double& x : v) x = (x - mean) / sd;
    const double bw = normal_reference_bandwidth(v, 1);
    CHECK(bw < prev);
    prev = bw;
  }
}

TEST_CASE("discrete table reproduces the add-lambda arithmetic") {
  const MultiDomainDataset ds = table_example();
  const auto model = ConditionalDensityModel::fit(ds, 0, "Y", {"X"});
  CHECK(model.kind() == DensityModelKind::discrete_table);

  const double x0[1] = {0.0};
  CHECK(model.eval(1.0, x0) == doctest::Approx(0.7).epsilon(1e-12));   // (3+0.5)/(4+1)
  CHECK(model.eval(0.0, x0) == doctest::Approx(0.3).epsilon(1e-12));   // (1+0.5)/(4+1)
  CHECK(model.eval(7.0, x0) == doctest::Approx(0.1).epsilon(1e-12));   // unseen level
}

TEST_CASE("discrete table masses sum to one per conditioning level") {
  const MultiDomainDataset ds = table_example();
  const auto model = ConditionalDensityModel::fit(ds, 0, "Y", {"X"});
  for (double level : {0.0, 1.0}) {
    const double x[1] = {level};
    const double total = model.eval(0.0, x) + model.eval(1.0, x);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("discrete table approaches empirical frequencies as lambda vanishes") {
  const MultiDomainDataset ds = table_example();
  FitOptions opts;
  opts.smoothing_lambda = 1e-9;
  const auto model = ConditionalDensityModel::fit(ds, 0, "Y", {"X"}, opts);
  const double x0[1] = {0.0};
  CHECK(model.eval(1.0, x0) == doctest::Approx(0.75).epsilon(1e-6));
  const double x1[1] = {1.0};
  CHECK(model.eval(0.0, x1) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("discrete marginal table from an empty conditioner set") {
  const MultiDomainDataset ds = table_example();
  const auto model = ConditionalDensityModel::fit(ds, 0, "Y", {});
  CHECK(model.kind() == DensityModelKind::discrete_table);
  // Y column is {1,1,1,0,0,1}: p(1) = (4 + 0.5) / (6 + 1).
  CHECK(model.eval(1.0, {}) == doctest::Approx(4.5 / 7.0).epsilon(1e-12));
  CHECK(model.eval(0.0, {}) == doctest::Approx(2.5 / 7.0).epsilon(1e-12));
}

TEST_CASE("kernel estimate tracks an analytic conditional density") {
  // Y ~ N(0,1) independent of X: the true conditional is the standard normal
  // at every x; the estimator's max grid error must stay below 0.1.
  const std::size_t n = 2000;
  const MultiDomainDataset ds = testutil::make_dataset(
      {{"X", ColumnKind::continuous}, {"Y", ColumnKind::continuous}},
      {{testutil::normal_draws(11, n), testutil::normal_draws(12, n)}});
  const auto model = ConditionalDensityModel::fit(ds, 0, "Y", {"X"});
  CHECK(model.kind() == DensityModelKind::continuous_kernel);

  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double x[1] = {-2.0 + i};
      const double y = -2.0 + j;
      worst = std::max(worst, std::abs(model.eval(y, x) - normal_pdf(y, 0.0, 1.0)));
    }
  }
  CHECK(worst < 0.1);
}

TEST_CASE("empty conditioner set collapses to a plain KDE") {
  const std::size_t n = 200;
  const std::vector<double> y = testutil::normal_draws(21, n, 0.5, 1.5);
  const MultiDomainDataset ds =
      testutil::make_dataset({{"Y", ColumnKind::continuous}}, {{y}});
  const auto model = ConditionalDensityModel::fit(ds, 0, "Y", {});

  const double b = model.bandwidths().target;
  for (double probe : {-1.0, 0.2, 2.7}) {
    double kde = 0.0;
    for (double v : y) kde += normal_pdf(probe, v, b);
    kde /= static_cast<double>(n);
    CHECK(model.eval(probe, {}) == doctest::Approx(kde).epsilon(1e-9));
  }
}

TEST_CASE("eval is floored, finite, and guards far extrapolation") {
  const MultiDomainDataset ds = testutil::make_dataset(
      {{"X", ColumnKind::continuous}, {"Y", ColumnKind::continuous}},
      {{testutil::normal_draws(31, 100), testutil::normal_draws(32, 100)}});
  const auto model = ConditionalDensityModel::fit(ds, 0, "Y", {"X"});

  const double at_train[1] = {ds.block(0).columns[0][0]};
  CHECK(model.eval(ds.block(0).columns[1][0], at_train) > 0.0);

  const double far[1] = {1e6};
  const double v = model.eval(0.0, far);
  CHECK(v == doctest::Approx(1e-12));
  CHECK(std::isfinite(v));

  const double nearby[1] = {20.0};  // conditioner mass underflows, target fine
  CHECK(std::isfinite(model.eval(0.0, nearby)));
}

TEST_CASE("kernel eval integrates to about one along the target axis") {
  const std::size_t n = 400;
  const MultiDomainDataset ds = testutil::make_dataset(
      {{"X", ColumnKind::continuous}, {"Y", ColumnKind::continuous}},
      {{testutil::normal_draws(41, n), testutil::normal_draws(42, n, 1.0, 2.0)}});
  const auto model = ConditionalDensityModel::fit(ds, 0, "Y", {"X"});

  for (double xc : {-0.5, 0.0, 0.5}) {
    const double x[1] = {xc};
    double integral = 0.0;
    const double lo = -15.0, hi = 17.0, step = 0.02;
    for (double y = lo; y <= hi; y += step) integral += model.eval(y, x) * step;
    CHECK(integral == doctest::Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("fit validation") {
  const MultiDomainDataset ds = testutil::make_dataset(
      {{"X", ColumnKind::continuous}, {"Y", ColumnKind::continuous}},
      {{{1.0}, {2.0}}, {{1.0, 2.0}, {3.0, 4.0}}});
  CHECK_THROWS_AS(ConditionalDensityModel::fit(ds, 0, "Y", {"X"}), InsufficientData);
  CHECK_THROWS_AS(ConditionalDensityModel::fit(ds, 1, "Z", {"X"}), UnknownColumn);
  CHECK_THROWS(ConditionalDensityModel::fit(ds, 1, "Y", {"Y"}));

  const auto model = ConditionalDensityModel::fit(ds, 1, "Y", {"X"});
  const double xs[2] = {1.0, 2.0};
  CHECK_THROWS_AS(model.eval(0.0, xs), DimensionMismatch);
}

TEST_CASE("mixed kernels weight discrete matches above leaked levels") {
  // X discrete, Y continuous: Y|X=0 centered at 0, Y|X=1 centered at 6.
  std::vector<double> xs, ys;
  mdcd::Rng rng(51);
  for (int i = 0; i < 150; ++i) {
    xs.push_back(0);
    ys.push_back(rng.normal(0.0, 1.0));
    xs.push_back(1);
    ys.push_back(rng.normal(6.0, 1.0));
  }
  const MultiDomainDataset ds = testutil::make_dataset(
      {{"X", ColumnKind::discrete}, {"Y", ColumnKind::continuous}}, {{xs, ys}});
  const auto model = ConditionalDensityModel::fit(ds, 0, "Y", {"X"});
  CHECK(model.kind() == DensityModelKind::mixed);

  const double x0[1] = {0.0};
  const double x1[1] = {1.0};
  CHECK(model.eval(0.0, x0) > 5.0 * model.eval(0.0, x1));
  CHECK(model.eval(6.0, x1) > 5.0 * model.eval(6.0, x0));
}

TEST_CASE("lscv bandwidths stay positive and in a sane range") {
  const std::size_t n = 300;
  const MultiDomainDataset ds = testutil::make_dataset(
      {{"X", ColumnKind::continuous}, {"Y", ColumnKind::continuous}},
      {{testutil::normal_draws(61, n), testutil::normal_draws(62, n)}});
  FitOptions opts;
  opts.bandwidth_method = BandwidthMethod::lscv;
  const auto model = ConditionalDensityModel::fit(ds, 0, "Y", {"X"}, opts);
  const auto reference = ConditionalDensityModel::fit(ds, 0, "Y", {"X"});

  CHECK(model.bandwidths().target > 0.0);
  CHECK(model.bandwidths().conditioner[0] > 0.0);
  CHECK(model.bandwidths().target >= 0.25 * reference.bandwidths().target);
  CHECK(model.bandwidths().target <= 4.0 * reference.bandwidths().target);
}
