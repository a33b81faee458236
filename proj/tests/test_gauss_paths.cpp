#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ctgof/gauss_paths.hpp"
#include "oracles.hpp"

using namespace ctgof;

namespace {

// Values of many independent paths at the given grid indices.
std::vector<std::vector<double>> sample_at(std::size_t m, const Grid& grid, const std::vector<std::size_t>& idx,
                                           std::uint64_t seed, SampledPath (*sim)(const Grid&, const RngStream&)) {
  std::vector<std::vector<double>> out(idx.size(), std::vector<double>(m));
  for (std::size_t r = 0; r < m; ++r) {
    const SampledPath p = sim(grid, RngStream(seed, r));
    for (std::size_t k = 0; k < idx.size(); ++k) out[k][r] = p.values[idx[k]];
  }
  return out;
}

}  // namespace

TEST(Grid, RejectsDegenerateGrids) {
  EXPECT_THROW(Grid(1), std::invalid_argument);
  EXPECT_THROW(Grid(10, 0.0), std::invalid_argument);
  EXPECT_THROW(Grid(10, -1.0), std::invalid_argument);
  const Grid g(8, 2.0);
  EXPECT_EQ(g.size(), 9u);
  EXPECT_DOUBLE_EQ(g.step(), 0.25);
  EXPECT_DOUBLE_EQ(g.time(8), 2.0);
}

TEST(SimulateWiener, StartsAtZero) {
  for (const std::size_t n : {2UL, 7UL, 64UL, 1000UL}) {
    EXPECT_EQ(simulate_wiener(Grid(n), RngStream(1, n)).values[0], 0.0);
  }
}

TEST(SimulateWiener, TerminalVarianceAndCovariance) {
  const Grid grid(16);
  const auto v = sample_at(100000, grid, {8, 16}, 77, simulate_wiener);
  std::vector<double> sq(v[1].size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = v[1][i] * v[1][i];
  EXPECT_NEAR(oracle::mean(sq), 1.0, 3.0 * oracle::standard_error(sq));
  std::vector<double> prod(v[0].size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = v[0][i] * v[1][i];
  EXPECT_NEAR(oracle::mean(prod), 0.5, 3.0 * oracle::standard_error(prod));
}

TEST(SimulateWiener, NonDyadicGridHasUnitTerminalVariance) {
  const Grid grid(10);
  const auto v = sample_at(50000, grid, {10}, 78, simulate_wiener);
  std::vector<double> sq(v[0].size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = v[0][i] * v[0][i];
  EXPECT_NEAR(oracle::mean(sq), 1.0, 3.0 * oracle::standard_error(sq));
}

TEST(SimulateWiener, ReproducibleForFixedStream) {
  const Grid grid(4096);
  EXPECT_EQ(simulate_wiener(grid, RngStream(3, 9)).values, simulate_wiener(grid, RngStream(3, 9)).values);
  EXPECT_NE(simulate_wiener(grid, RngStream(3, 9)).values, simulate_wiener(grid, RngStream(3, 10)).values);
}

TEST(SimulateWiener, RefinementKeepsSharedGridPoints) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const SampledPath coarse = simulate_wiener(Grid(1024), RngStream(12, s));
    const SampledPath fine = simulate_wiener(Grid(2048), RngStream(12, s));
    for (std::size_t i = 0; i < coarse.values.size(); ++i) ASSERT_EQ(coarse.values[i], fine.values[2 * i]);
  }
}

TEST(SimulateWiener, HorizonScalesVariance) {
  const Grid grid(8, 4.0);
  const auto v = sample_at(50000, grid, {8}, 79, simulate_wiener);
  std::vector<double> sq(v[0].size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = v[0][i] * v[0][i];
  EXPECT_NEAR(oracle::mean(sq), 4.0, 3.0 * oracle::standard_error(sq));
}

TEST(SimulateDriftedWiener, ZeroDriftIsTheWienerPath) {
  const Grid grid(256);
  EXPECT_EQ(simulate_drifted_wiener(grid, 0.0, RngStream(4, 4)).values, simulate_wiener(grid, RngStream(4, 4)).values);
}

TEST(SimulateDriftedWiener, ZeroNoiseGivesTheDrift) {
  const Grid grid(100);
  const SampledPath p = simulate_drifted_wiener(grid, 1.0, RngStream::zero_noise());
  for (std::size_t i = 0; i < p.values.size(); ++i) EXPECT_DOUBLE_EQ(p.values[i], grid.time(i));
}

TEST(SimulateDriftedWiener, TerminalMeanIsRho) {
  const Grid grid(16);
  std::vector<double> end(100000);
  for (std::size_t r = 0; r < end.size(); ++r) end[r] = simulate_drifted_wiener(grid, 2.0, RngStream(5, r)).values.back();
  EXPECT_NEAR(oracle::mean(end), 2.0, 3.0 * oracle::standard_error(end));
}

TEST(SimulateBrownianBridge, PinnedEndpointsAndCovariance) {
  const Grid grid(16);
  const SampledPath one = simulate_brownian_bridge(grid, RngStream(6, 0));
  EXPECT_EQ(one.values.front(), 0.0);
  EXPECT_NEAR(one.values.back(), 0.0, 1e-15);
  const auto v = sample_at(100000, grid, {4, 8, 12}, 80, simulate_brownian_bridge);
  std::vector<double> sq(v[1].size()), prod(v[0].size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    sq[i] = v[1][i] * v[1][i];
    prod[i] = v[0][i] * v[2][i];
  }
  EXPECT_NEAR(oracle::mean(sq), 0.25, 3.0 * oracle::standard_error(sq));
  EXPECT_NEAR(oracle::mean(prod), 0.0625, 3.0 * oracle::standard_error(prod));
}

TEST(SimulateBrownianBridge, RejectsNonUnitHorizon) {
  EXPECT_THROW(simulate_brownian_bridge(Grid(16, 2.0), RngStream(1, 1)), std::invalid_argument);
}

TEST(CvmFunctional, ClosedForms) {
  const Grid grid(1000);
  EXPECT_DOUBLE_EQ(cvm_functional(SampledPath(grid, std::vector<double>(grid.size(), 3.0))), 9.0);
  EXPECT_EQ(cvm_functional(SampledPath(grid)), 0.0);
  std::vector<double> ramp(grid.size());
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = grid.time(i);
  // trapezoid error for s^2 is step^2 / 6
  EXPECT_NEAR(cvm_functional(SampledPath(grid, ramp)), 1.0 / 3.0, grid.step() * grid.step() / 6.0 + 1e-14);
}

TEST(CvmFunctional, NormalizesByHorizon) {
  const Grid grid(50, 5.0);
  EXPECT_DOUBLE_EQ(cvm_functional(SampledPath(grid, std::vector<double>(grid.size(), -2.0))), 4.0);
}

TEST(KsFunctional, ClosedForms) {
  const Grid grid(1000);
  std::vector<double> ramp(grid.size());
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = grid.time(i);
  EXPECT_DOUBLE_EQ(ks_functional(SampledPath(grid, ramp)), 1.0);
  EXPECT_DOUBLE_EQ(ks_functional(SampledPath(grid, std::vector<double>(grid.size(), -3.0))), 3.0);
  EXPECT_EQ(ks_functional(SampledPath(grid)), 0.0);
}

TEST(PathFunctionals, InvariantUnderSignFlip) {
  const Grid grid(512);
  for (std::uint64_t s = 0; s < 20; ++s) {
    SampledPath p = simulate_wiener(grid, RngStream(30, s));
    const double c = cvm_functional(p), k = ks_functional(p);
    for (auto& v : p.values) v = -v;
    EXPECT_EQ(cvm_functional(p), c);
    EXPECT_EQ(ks_functional(p), k);
    EXPECT_GE(c, 0.0);
    EXPECT_GE(k, 0.0);
  }
}

TEST(KlSeries, ZeroNoiseIsZero) { EXPECT_EQ(kl_series_sample(100, RngStream::zero_noise()), 0.0); }

TEST(KlSeries, MeanMatchesEigenvalueSum) {
  const std::size_t terms = 1000;
  std::vector<double> v(100000);
  for (std::size_t r = 0; r < v.size(); ++r) v[r] = kl_series_sample(terms, RngStream(31, r));
  double expected = 0.0;
  for (std::size_t k = 1; k <= terms; ++k) {
    const double lam = (static_cast<double>(k) - 0.5) * M_PI;
    expected += 1.0 / (lam * lam);
  }
  EXPECT_NEAR(expected, 0.5, 1e-3);
  EXPECT_NEAR(oracle::mean(v), expected, 3.0 * oracle::standard_error(v));
}

TEST(KlSeries, MatchesPathFunctionalDistribution) {
  const std::size_t m = 100000;
  const Grid grid(4096);
  std::vector<double> path(m), series(m);
  for (std::size_t r = 0; r < m; ++r) {
    path[r] = cvm_functional(simulate_wiener(grid, RngStream(32, r)));
    series[r] = kl_series_sample(10000, RngStream(33, r));
  }
  EXPECT_LE(oracle::two_sample_ks(path, series), 0.01);
}

TEST(SupAbsWienerCdf, LimitsAndErrors) {
  EXPECT_NEAR(sup_abs_wiener_cdf(100.0), 1.0, 1e-10);
  EXPECT_LT(sup_abs_wiener_cdf(0.01), 1e-6);
  EXPECT_THROW(sup_abs_wiener_cdf(0.0), std::invalid_argument);
  EXPECT_THROW(sup_abs_wiener_cdf(-1.0), std::invalid_argument);
}

TEST(SupAbsWienerCdf, AgreesWithImageSeriesAndIsMonotone) {
  double prev = 0.0;
  for (double x = 0.2; x < 5.0; x += 0.1) {
    const double f = sup_abs_wiener_cdf(x);
    EXPECT_NEAR(f, oracle::sup_abs_wiener_cdf_images(x), 1e-10) << "x=" << x;
    EXPECT_GT(f, prev);
    EXPECT_LT(f, 1.0);
    prev = f;
  }
}

TEST(SupAbsWienerQuantile, InvertsTheCdf) {
  const double d = sup_abs_wiener_quantile(0.95);
  EXPECT_NEAR(sup_abs_wiener_cdf(d), 0.95, 1e-12);
  EXPECT_NEAR(d, 2.2414, 1e-4);
}

TEST(KsFunctionalContinuous, ShiftedGridMaximumMatchesAnalyticQuantile) {
  const std::size_t m = 40000;
  const Grid grid(256);
  std::vector<double> v(m);
  for (std::size_t r = 0; r < m; ++r) {
    v[r] = ks_functional_continuous(simulate_wiener(grid, RngStream(34, r)).values, grid.step());
  }
  // fraction above the analytic 0.95 point
  const double d = sup_abs_wiener_quantile(0.95);
  std::size_t above = 0;
  for (const double x : v) above += x > d;
  const double rate = static_cast<double>(above) / static_cast<double>(m);
  EXPECT_NEAR(rate, 0.05, 3.0 * std::sqrt(0.05 * 0.95 / static_cast<double>(m)));
}
