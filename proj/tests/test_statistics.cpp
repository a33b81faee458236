#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ctgof/statistics.hpp"
#include "oracles.hpp"

using namespace ctgof;

namespace {

SampledPath plus(const SampledPath& base, const SampledPath& w, double scale) {
  SampledPath out = base;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += scale * w.values[i];
  return out;
}

std::vector<double> wiener_cvm_samples(std::size_t m, std::size_t n_steps, std::uint64_t seed) {
  std::vector<double> v(m);
  const Grid grid(n_steps);
  for (std::size_t r = 0; r < m; ++r) v[r] = cvm_functional(simulate_wiener(grid, RngStream(seed, r)));
  return v;
}

std::vector<double> drifted_cvm_samples(std::size_t m, std::size_t n_steps, double rho, std::uint64_t seed) {
  std::vector<double> v(m);
  const Grid grid(n_steps);
  for (std::size_t r = 0; r < m; ++r) v[r] = cvm_functional(simulate_drifted_wiener(grid, rho, RngStream(seed, r)));
  return v;
}

DensityTable ou_table(double lo = -8.0, double hi = 8.0, std::size_t n = 4001) {
  return invariant_density(ScalarModel::ornstein_uhlenbeck(1.0), ScalarModel::constant(1.0), linspace(lo, hi, n));
}

EventRecord periodic_record(const std::vector<std::vector<double>>& phases, double period) {
  std::vector<double> ev;
  for (std::size_t j = 0; j < phases.size(); ++j) {
    for (const double p : phases[j]) ev.push_back(static_cast<double>(j) * period + p);
  }
  std::sort(ev.begin(), ev.end());
  return make_record(ev, ObservationWindow::periods(period, phases.size()));
}

}  // namespace

TEST(StatKind, NamesRoundTrip) {
  for (const StatKind k : all_stat_kinds()) EXPECT_EQ(stat_kind_from_string(to_string(k)), k);
  EXPECT_EQ(all_stat_kinds().size(), 12u);
  EXPECT_THROW(stat_kind_from_string("CVM_SOMETHING"), std::invalid_argument);
}

TEST(StatSmallNoise, VanishesOnTheLimitPath) {
  const Grid grid(200);
  const ScalarModel drift = ScalarModel::polynomial({1.0, 0.0, 1.0});
  const SampledPath xstar = solve_limit_ode(drift, 0.0, grid).path;
  const StatPair st = stat_small_noise(xstar, xstar, drift, 0.01);
  EXPECT_EQ(st.cvm.value, 0.0);
  EXPECT_EQ(st.ks.value, 0.0);
  EXPECT_EQ(stat_small_noise_sigma(xstar, xstar, drift, ScalarModel::constant(3.0), 0.01).value, 0.0);
}

TEST(StatSmallNoise, ConstantDriftReducesToWienerFunctionals) {
  const Grid grid(512);
  const ScalarModel drift = ScalarModel::constant(1.0);
  const SampledPath xstar = solve_limit_ode(drift, 0.0, grid).path;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const SampledPath w = simulate_wiener(grid, RngStream(70, s));
    const StatPair st = stat_small_noise(plus(xstar, w, 0.01), xstar, drift, 0.01);
    EXPECT_NEAR(st.cvm.value, cvm_functional(w), 1e-9 * (1.0 + cvm_functional(w)));
    EXPECT_NEAR(st.ks.value, ks_functional(w), 1e-9);
  }
}

TEST(StatSmallNoise, ConstantDriftDistributionMatchesLimit) {
  const std::size_t m = 10000;
  const Grid grid(256);
  const ScalarModel drift = ScalarModel::constant(1.0);
  const SmallNoiseSpec spec{drift, std::nullopt, std::nullopt, 0.01, 0.0, 1.0};
  const SampledPath xstar = solve_limit_ode(drift, 0.0, grid).path;
  std::vector<double> cvm(m), ks(m), ref_ks(m);
  for (std::size_t r = 0; r < m; ++r) {
    const StatPair st = stat_small_noise(simulate_small_noise(spec, grid, RngStream(71, r)), xstar, drift, 0.01);
    cvm[r] = st.cvm.value;
    ks[r] = st.ks.value;
    ref_ks[r] = ks_functional(simulate_wiener(grid, RngStream(72, r)));
  }
  const auto ref = wiener_cvm_samples(m, 256, 72);
  EXPECT_LT(oracle::two_sample_ks(cvm, ref), oracle::ks_critical(m, m));
  EXPECT_LT(oracle::two_sample_ks(ks, ref_ks), oracle::ks_critical(m, m));
}

TEST(StatSmallNoise, RejectsNonPositiveDriftAndGridMismatch) {
  const Grid grid(100);
  const SampledPath zero(grid);
  EXPECT_THROW(stat_small_noise(zero, zero, ScalarModel::constant(0.0), 0.1), std::domain_error);
  EXPECT_THROW(stat_small_noise(zero, SampledPath(Grid(50)), ScalarModel::constant(1.0), 0.1), std::invalid_argument);
}

TEST(StatSmallNoiseSigma, UnitSigmaEqualsBaseStatistic) {
  const Grid grid(300);
  const ScalarModel drift = ScalarModel::polynomial({1.0, 0.5, 0.2});
  const SampledPath xstar = solve_limit_ode(drift, 0.3, grid).path;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const SampledPath x = plus(xstar, simulate_wiener(grid, RngStream(73, s)), 0.05);
    EXPECT_DOUBLE_EQ(stat_small_noise_sigma(x, xstar, drift, ScalarModel::constant(1.0), 0.05).value,
                     stat_small_noise(x, xstar, drift, 0.05).cvm.value);
  }
}

TEST(StatSmallNoiseSigma, ConstantSigmaDistributionMatchesLimit) {
  const std::size_t m = 10000;
  const Grid grid(256);
  const ScalarModel drift = ScalarModel::constant(1.0);
  const SampledPath xstar = solve_limit_ode(drift, 0.0, grid).path;
  std::vector<double> v(m);
  for (std::size_t r = 0; r < m; ++r) {
    const SampledPath x = plus(xstar, simulate_wiener(grid, RngStream(74, r)), 2.0 * 0.01);
    v[r] = stat_small_noise_sigma(x, xstar, drift, ScalarModel::constant(2.0), 0.01).value;
  }
  EXPECT_LT(oracle::two_sample_ks(v, wiener_cvm_samples(m, 256, 75)), oracle::ks_critical(m, m));
}

TEST(EmpiricalDf, BoundsAndStepShape) {
  const Grid grid(10, 2.0);
  const SampledPath c(grid, std::vector<double>(grid.size(), 1.5));
  const std::vector<double> xs{-1.0, 1.5, 1.6, 9.0};
  const auto f = empirical_df(c, xs);
  EXPECT_EQ(f[0], 0.0);
  EXPECT_EQ(f[1], 0.0);  // strict inequality in 1{X_t < x}
  EXPECT_EQ(f[2], 1.0);
  EXPECT_EQ(f[3], 1.0);
}

TEST(EmpiricalDf, OrnsteinUhlenbeckConsistency) {
  const ErgodicSpec spec{ScalarModel::ornstein_uhlenbeck(1.0), std::nullopt, 0.0, 1000.0, 0.01};
  const SampledPath p = simulate_ergodic(spec, RngStream(76, 0));
  const DensityTable t = ou_table();
  const auto f = empirical_df(p, t.x_grid);
  double dev = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    dev = std::max(dev, std::abs(f[i] - t.cdf[i]));
    ASSERT_GE(f[i], 0.0);
    ASSERT_LE(f[i], 1.0);
    if (i > 0) {
      ASSERT_GE(f[i], f[i - 1]);
    }
  }
  EXPECT_LT(dev, 0.05);
}

TEST(LocalTimeDensity, MatchesDirectSumOnALinearPath) {
  const Grid grid(100);
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = grid.time(i);
  const SampledPath p(grid, v);
  const std::vector<double> xs{-0.5, 0.0, 0.255, 0.5, 0.999, 1.5};
  const auto f = local_time_density(p, xs);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) s += (v[i] < xs[k] ? 1.0 : 0.0) * (v[i + 1] - v[i]);
    EXPECT_NEAR(f[k], 2.0 * s, 1e-12) << xs[k];
  }
}

TEST(LocalTimeDensity, ZeroIncrementsGiveZero) {
  const Grid grid(50);
  const auto f = local_time_density(SampledPath(grid, std::vector<double>(grid.size(), 0.7)), std::vector<double>{0.0, 1.0});
  EXPECT_EQ(f[0], 0.0);
  EXPECT_EQ(f[1], 0.0);
}

TEST(LocalTimeDensity, OrnsteinUhlenbeckConsistency) {
  const ErgodicSpec spec{ScalarModel::ornstein_uhlenbeck(1.0), std::nullopt, 0.0, 1000.0, 0.01};
  const SampledPath p = simulate_ergodic(spec, RngStream(77, 0));
  const auto xs = linspace(-2.0, 2.0, 81);
  const auto f = local_time_density(p, xs);
  double mad = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) mad += std::abs(f[i] - std::exp(-xs[i] * xs[i]) / std::sqrt(M_PI));
  EXPECT_LT(mad / static_cast<double>(xs.size()), 0.05);
}

TEST(StatErgodicEdf, ZeroAndConstantOffset) {
  const DensityTable t = ou_table();
  const StatPair zero = stat_ergodic_edf(t.cdf, t, 100.0);
  EXPECT_EQ(zero.cvm.value, 0.0);
  EXPECT_EQ(zero.ks.value, 0.0);
  std::vector<double> shifted = t.cdf;
  for (std::size_t i = 1; i + 1 < shifted.size(); ++i) shifted[i] += 0.1;
  const StatPair st = stat_ergodic_edf(shifted, t, 100.0);
  // T * 0.01 * (mass of dF* over the interior); the tails carry ~e^-64
  const double oracle_value = 100.0 * 0.01 * (t.cdf[t.cdf.size() - 2] - t.cdf[1]);
  EXPECT_NEAR(st.cvm.value, oracle_value, 1e-9);
  EXPECT_NEAR(st.ks.value, 10.0 * 0.1, 1e-12);
  EXPECT_THROW(stat_ergodic_edf(std::vector<double>(5, 0.0), t, 100.0), std::invalid_argument);
}

TEST(StatErgodicDensity, ZeroAndConstantOffset) {
  const DensityTable t = ou_table();
  const StatPair zero = stat_ergodic_density(t.density, t, 50.0);
  EXPECT_EQ(zero.cvm.value, 0.0);
  EXPECT_EQ(zero.ks.value, 0.0);
  std::vector<double> shifted = t.density;
  for (std::size_t i = 1; i + 1 < shifted.size(); ++i) shifted[i] -= 0.2;
  const StatPair st = stat_ergodic_density(shifted, t, 50.0);
  EXPECT_NEAR(st.cvm.value, 50.0 * 0.04 * (t.cdf[t.cdf.size() - 2] - t.cdf[1]), 1e-9);
  EXPECT_NEAR(st.ks.value, std::sqrt(50.0) * 0.2, 1e-12);
  EXPECT_NE(st.cvm.scale_note.find("negative at"), std::string::npos);
}

TEST(StatErgodicDensity, NullLawIsStableAcrossHorizons) {
  const std::size_t m = 1000;
  const DensityTable t = ou_table(-7.0, 7.0, 1401);
  auto samples = [&](double horizon, std::uint64_t seed) {
    const ErgodicSpec spec{ScalarModel::ornstein_uhlenbeck(1.0), std::nullopt, 0.0, horizon, 0.01};
    std::vector<double> v(m);
    for (std::size_t r = 0; r < m; ++r) v[r] = stat_ergodic_density(simulate_ergodic(spec, RngStream(seed, r)), t).cvm.value;
    return v;
  };
  EXPECT_LT(oracle::two_sample_ks(samples(500.0, 96), samples(1000.0, 97)), oracle::ks_critical(m, m, 0.05));
}

TEST(StatErgodicFree, ZeroNoisePathGivesZero) {
  const ErgodicSpec spec{ScalarModel::ornstein_uhlenbeck(1.0), std::nullopt, 2.0, 50.0, 0.01};
  const SampledPath p = simulate_ergodic(spec, RngStream::zero_noise());
  EXPECT_NEAR(stat_ergodic_free(p, spec.drift).value, 0.0, 1e-20);
}

TEST(StatErgodicFree, WienerPathDistributionMatchesLimit) {
  const std::size_t m = 5000;
  const Grid grid(512, 100.0);
  std::vector<double> v(m);
  for (std::size_t r = 0; r < m; ++r) v[r] = stat_ergodic_free(simulate_wiener(grid, RngStream(80, r)), ScalarModel::constant(0.0)).value;
  EXPECT_LT(oracle::two_sample_ks(v, wiener_cvm_samples(m, 512, 81)), oracle::ks_critical(m, m));
}

TEST(StatErgodicFree, ConstantAlternativeShiftsTowardDriftedLimit) {
  const std::size_t m = 1000;
  const double horizon = 1000.0;
  const ScalarModel null_drift = ScalarModel::ornstein_uhlenbeck(1.0);
  const ErgodicSpec alt{null_drift + ScalarModel::constant(1.0 / std::sqrt(horizon)), std::nullopt, 0.0, horizon, 0.01};
  std::vector<double> v(m);
  for (std::size_t r = 0; r < m; ++r) v[r] = stat_ergodic_free(simulate_ergodic(alt, RngStream(82, r)), null_drift).value;
  const std::size_t mr = 10000;
  const auto ref = drifted_cvm_samples(mr, 1024, 1.0, 83);
  EXPECT_LT(oracle::two_sample_ks(v, ref), oracle::ks_critical(m, mr));
  EXPECT_GT(oracle::two_sample_ks(v, wiener_cvm_samples(mr, 1024, 84)), oracle::ks_critical(m, mr));
}

TEST(StatErgodicFreeSigma, UnitMomentEqualsBaseStatistic) {
  const ErgodicSpec spec{ScalarModel::ornstein_uhlenbeck(1.0), std::nullopt, 0.0, 100.0, 0.01};
  const SampledPath p = simulate_ergodic(spec, RngStream(85, 0));
  EXPECT_EQ(stat_ergodic_free_sigma(p, spec.drift, 1.0).value, stat_ergodic_free(p, spec.drift).value);
  EXPECT_THROW(stat_ergodic_free_sigma(p, spec.drift, 0.0), std::invalid_argument);
  EXPECT_THROW(stat_ergodic_free_sigma(p, spec.drift, -1.0), std::invalid_argument);
}

TEST(StatErgodicFreeSigma, ConstantSigmaScaleCancels) {
  const ErgodicSpec spec{ScalarModel::ornstein_uhlenbeck(1.0), std::nullopt, 0.0, 100.0, 0.01};
  const SampledPath base = simulate_ergodic(spec, RngStream(86, 0));
  SampledPath scaled = base;
  for (auto& v : scaled.values) v *= 2.0;  // the sigma = 2 path driven by the same noise
  const double s1 = stat_ergodic_free(base, spec.drift).value;
  EXPECT_NEAR(stat_ergodic_free_sigma(scaled, spec.drift, 4.0).value, s1, 1e-12 * s1);
  const DensityTable t = invariant_density(spec.drift, ScalarModel::constant(2.0), linspace(-20.0, 20.0, 4001));
  EXPECT_NEAR(stat_ergodic_free_sigma(scaled, spec.drift, ScalarModel::constant(2.0), t).value, s1, 1e-9 * s1);
}

TEST(LambdaHat, ElementaryShapes) {
  const StepFunction empty = lambda_hat(periodic_record({{}, {}, {}}, 1.0));
  EXPECT_EQ(empty(0.5), 0.0);
  EXPECT_EQ(empty.total(), 0.0);
  const StepFunction step = lambda_hat(periodic_record({{0.3}, {0.3}, {0.3}, {0.3}}, 1.0));
  EXPECT_NEAR(step(0.29), 0.0, 1e-15);
  EXPECT_NEAR(step(0.3 + 1e-9), 1.0, 1e-12);
  EXPECT_NEAR(step(1.0), 1.0, 1e-12);
  const StepFunction mixed = lambda_hat(periodic_record({{0.1, 0.5}, {0.7}}, 1.0));
  EXPECT_DOUBLE_EQ(mixed.total(), 1.5);
  EXPECT_DOUBLE_EQ(mixed(0.6), 1.0);
}

TEST(LambdaHat, GlivenkoCantelliForPoisson) {
  const EventRecord r = simulate_poisson(ConstantIntensity{1.0}, ObservationWindow::periods(1.0, 1000), RngStream(87, 0));
  const StepFunction lam = lambda_hat(r);
  double sup = 0.0;
  for (std::size_t k = 0; k <= 10000; ++k) sup = std::max(sup, std::abs(lam(k / 10000.0) - k / 10000.0));
  EXPECT_LT(sup, 0.1);
}

TEST(StatPoisson, EvenlySpacedEventsClosedForm) {
  for (const std::size_t m : {1UL, 4UL, 25UL}) {
    std::vector<double> phases;
    for (std::size_t k = 1; k <= m; ++k) phases.push_back((static_cast<double>(k) - 0.5) / static_cast<double>(m));
    const StatPair st = stat_poisson(periodic_record({phases}, 1.0), ScalarModel::linear(0.0, static_cast<double>(m)));
    EXPECT_NEAR(st.cvm.value, 1.0 / (12.0 * static_cast<double>(m)), 1e-12) << m;
    EXPECT_NEAR(st.ks.value, 0.5 / std::sqrt(static_cast<double>(m)), 1e-12) << m;
  }
}

TEST(StatPoisson, MatchesBruteForceRiemannEvaluation) {
  const std::size_t lattice = 1000000;
  auto seq = RngStream(88, 0).sequence();
  const ScalarModel sinusoid{"sinusoid", [](double t) { return 2.0 * t + (1.0 - std::cos(2.0 * M_PI * t)) / (2.0 * M_PI); }, {}};
  for (std::size_t rec = 0; rec < 100; ++rec) {
    const std::size_t n = 1 + rec % 4;
    std::vector<std::vector<double>> phases(n);
    std::vector<double> all;
    for (auto& p : phases) {
      const std::size_t count = static_cast<std::size_t>(seq.uniform() * 5.0);
      for (std::size_t i = 0; i < count; ++i) {
        const auto k = 1 + static_cast<std::size_t>(seq.uniform() * static_cast<double>(lattice - 2));
        p.push_back(static_cast<double>(k) / static_cast<double>(lattice));
      }
      std::sort(p.begin(), p.end());
      p.erase(std::unique(p.begin(), p.end()), p.end());
      all.insert(all.end(), p.begin(), p.end());
    }
    const ScalarModel cumulative = rec % 10 == 0 ? sinusoid : ScalarModel::linear(0.0, 2.0);
    const StatPair st = stat_poisson(periodic_record(phases, 1.0), cumulative);
    const auto [w, d] = oracle::poisson_statistics_bruteforce(all, n, 1.0, [&](double t) { return cumulative(t); }, lattice);
    ASSERT_NEAR(st.cvm.value, w, 1e-6) << rec;
    ASSERT_NEAR(st.ks.value, d, 1e-6) << rec;
    ASSERT_GE(st.cvm.value, 0.0);
  }
}

TEST(StatPoisson, InvariantUnderPeriodRelabeling) {
  const std::vector<std::vector<double>> phases{{0.1, 0.4}, {0.25}, {}, {0.6, 0.7, 0.9}};
  std::vector<std::vector<double>> permuted{phases[2], phases[0], phases[3], phases[1]};
  const ScalarModel lam = ScalarModel::linear(0.0, 1.5);
  const StatPair a = stat_poisson(periodic_record(phases, 1.0), lam);
  const StatPair b = stat_poisson(periodic_record(permuted, 1.0), lam);
  EXPECT_NEAR(a.cvm.value, b.cvm.value, 1e-15);
  EXPECT_NEAR(a.ks.value, b.ks.value, 1e-15);
}

TEST(StatPoisson, RequiresPeriodicLayout) {
  EXPECT_THROW(stat_poisson(make_record({0.5}, ObservationWindow::until(1.0)), ScalarModel::linear(0.0, 1.0)),
               std::invalid_argument);
}

TEST(StatPoisson, HundredPeriodNullMatchesLimit) {
  const std::size_t m = 100000;
  std::vector<double> v(m);
  const ScalarModel lam = ScalarModel::linear(0.0, 1.0);
  for (std::size_t r = 0; r < m; ++r) {
    v[r] = stat_poisson(simulate_poisson(ConstantIntensity{1.0}, ObservationWindow::periods(1.0, 100), RngStream(89, r)), lam).cvm.value;
  }
  EXPECT_LT(oracle::two_sample_ks(v, wiener_cvm_samples(m, 1024, 90)), 0.02);
}

TEST(StatPoisson, ContiguousAlternativeMatchesSignalLimit) {
  const std::size_t m = 10000;
  const ScalarModel h = ScalarModel::cosine(1.0, 2.0 * M_PI);
  const ContiguousPoissonIntensity alt{ScalarModel::constant(1.0), 1.0, h, 100};
  std::vector<double> v(m), ref(m);
  const Grid grid(1024);
  for (std::size_t r = 0; r < m; ++r) {
    v[r] = stat_poisson(simulate_poisson(alt, ObservationWindow::periods(1.0, 100), RngStream(91, r)), ScalarModel::linear(0.0, 1.0)).cvm.value;
    SampledPath w = simulate_wiener(grid, RngStream(92, r));
    for (std::size_t i = 0; i < grid.size(); ++i) w.values[i] += std::sin(2.0 * M_PI * grid.time(i)) / (2.0 * M_PI);
    ref[r] = cvm_functional(w);
  }
  EXPECT_LT(oracle::two_sample_ks(v, ref), oracle::ks_critical(m, m));
}

TEST(StatLaump, StandardizedCount) {
  EXPECT_EQ(stat_laump(make_record({0.5, 1.0, 1.5, 2.0}, ObservationWindow::until(2.0)), 2.0).value, 0.0);
  EXPECT_DOUBLE_EQ(stat_laump(make_record({1.0}, ObservationWindow::until(4.0)), 1.0).value, -1.5);
  EXPECT_THROW(stat_laump(make_record({}, ObservationWindow::until(1.0)), 0.0), std::invalid_argument);
}

TEST(StatLaump, PoissonNullIsStandardNormal) {
  const std::size_t m = 10000;
  std::vector<double> v(m);
  for (std::size_t r = 0; r < m; ++r) {
    v[r] = stat_laump(simulate_poisson(ConstantIntensity{1.0}, ObservationWindow::until(1e4), RngStream(93, r)), 1.0).value;
  }
  EXPECT_NEAR(oracle::mean(v), 0.0, 3.0 * oracle::standard_error(v));
  EXPECT_NEAR(oracle::variance(v), 1.0, 0.05);
}

TEST(StatLanDelta, HandEvaluations) {
  const ScalarModel h = ScalarModel::box(1.0, 1.0);
  EXPECT_EQ(stat_lan_delta(make_record({}, ObservationWindow::periods(10.0, 1)), h, 1.0, 10.0, 1).value, 0.0);
  EXPECT_NEAR(stat_lan_delta(make_record({3.0}, ObservationWindow::periods(10.0, 1)), h, 1.0, 10.0, 1).value,
              -1.0 / std::sqrt(10.0), 1e-12);
  // pair term H(1.5-) = 1; compensator 1 + 1
  EXPECT_NEAR(stat_lan_delta(make_record({1.0, 1.5}, ObservationWindow::periods(10.0, 1)), h, 1.0, 10.0, 1).value,
              (1.0 - 2.0) / std::sqrt(10.0), 1e-12);
  // the window of an event near the horizon is truncated
  EXPECT_NEAR(stat_lan_delta(make_record({9.5}, ObservationWindow::periods(10.0, 1)), h, 1.0, 10.0, 1).value,
              -0.5 / std::sqrt(10.0), 1e-12);
  // S* = 2 scales the pair term by 1 / S*
  EXPECT_NEAR(stat_lan_delta(make_record({1.0, 1.5}, ObservationWindow::periods(10.0, 1)), h, 2.0, 10.0, 1).value,
              (1.0 / 2.0 - 2.0) / std::sqrt(10.0), 1e-12);
  EXPECT_THROW(stat_lan_delta(make_record({}, ObservationWindow::until(1.0)), ScalarModel::constant(1.0), 1.0, 1.0, 1),
               std::invalid_argument);
}

TEST(StatLanDelta, NullMeanZeroAndFisherVariance) {
  const std::size_t m = 4000;
  const ScalarModel h = ScalarModel::box(1.0, 1.0);
  std::vector<double> v(m);
  for (std::size_t r = 0; r < m; ++r) {
    const EventRecord rec = simulate_poisson(ConstantIntensity{1.0}, ObservationWindow::periods(100.0, 100), RngStream(94, r));
    v[r] = stat_lan_delta(rec, h, 1.0, 100.0, 100).value;
  }
  EXPECT_NEAR(oracle::mean(v), 0.0, 3.0 * oracle::standard_error(v));
  EXPECT_NEAR(oracle::variance(v), 2.0, 3.0 * oracle::variance_standard_error(v));
}

TEST(FisherInfo, ClosedForms) {
  EXPECT_NEAR(fisher_info(ScalarModel::box(0.0, 1.0), 1.0), 0.0, 1e-15);
  EXPECT_NEAR(fisher_info(ScalarModel::box(1.0, 1.0), 1.0), 2.0, 1e-9);
  EXPECT_NEAR(fisher_info(ScalarModel::box(1.0, 2.0), 0.5), 4.0, 1e-9);
}

TEST(RhoH, ContextRules) {
  EXPECT_NEAR(rho_h({ScalarModel::box(1.0, 1.0), HawkesContext{4.0}}), 2.0, 1e-9);
  const DensityTable t = ou_table();
  EXPECT_NEAR(rho_h({ScalarModel::linear(0.0, 1.0), ErgodicContext{t, std::nullopt}}), 0.0, 1e-6);
  EXPECT_NEAR(rho_h({ScalarModel::polynomial({0.0, 0.0, 1.0}), ErgodicContext{t, std::nullopt}}), 0.5, 1e-4);
  EXPECT_NEAR(rho_h({ScalarModel::constant(1.0), ErgodicContext{t, ScalarModel::constant(2.0)}}), 0.5, 1e-6);
  EXPECT_THROW(rho_h({ScalarModel::constant(1.0), SmallNoiseContext{}}), std::invalid_argument);
  EXPECT_THROW(rho_h({ScalarModel::constant(1.0), PoissonPeriodicContext{}}), std::invalid_argument);
}

TEST(HStarTransform, ZeroDirection) {
  const Grid grid(100);
  const SampledPath xstar = solve_limit_ode(ScalarModel::constant(1.0), 0.0, grid).path;
  const HStar hs = hstar_transform(ScalarModel::constant(0.0), xstar, ScalarModel::constant(1.0), Grid(64));
  for (const double v : hs.values) EXPECT_EQ(v, 0.0);
}

TEST(HStarTransform, IdentityTimeChangeForUnitDrift) {
  const Grid grid(1000);
  const ScalarModel h = ScalarModel::cosine(1.0, 3.0);
  const SampledPath xstar = solve_limit_ode(ScalarModel::constant(1.0), 0.0, grid).path;
  const Grid limit(128);
  const HStar hs = hstar_transform(h, xstar, ScalarModel::constant(1.0), limit);
  EXPECT_NEAR(hs.u_T, 1.0, 1e-12);
  for (std::size_t i = 0; i < limit.size(); ++i) EXPECT_NEAR(hs.values[i], h(limit.time(i)), 1e-9);
}

TEST(HStarTransform, ConstantDriftTwo) {
  const Grid grid(1000);
  const ScalarModel h = ScalarModel::polynomial({0.5, 1.0, -0.3});
  const SampledPath xstar = solve_limit_ode(ScalarModel::constant(2.0), 0.0, grid).path;
  const Grid limit(128);
  const HStar hs = hstar_transform(h, xstar, ScalarModel::constant(2.0), limit);
  EXPECT_NEAR(hs.u_T, 0.25, 1e-12);
  // x*(t) = 2 t and t(s) = s, so h*(s) = h(2 s) / 2
  for (std::size_t i = 0; i < limit.size(); ++i) EXPECT_NEAR(hs.values[i], 0.5 * h(2.0 * limit.time(i)), 1e-9);
}

TEST(L2Norm, ConstantFunction) {
  const Grid grid(10);
  EXPECT_NEAR(l2_norm(std::vector<double>(grid.size(), -3.0), grid), 3.0, 1e-14);
}

TEST(CvmStatistics, NonNegativeOnRandomInputs) {
  const Grid grid(200);
  const ScalarModel drift = ScalarModel::constant(1.0);
  const SampledPath xstar = solve_limit_ode(drift, 0.0, grid).path;
  const DensityTable t = ou_table(-6.0, 6.0, 601);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const SampledPath w = simulate_wiener(grid, RngStream(95, s));
    EXPECT_GE(stat_small_noise(plus(xstar, w, 0.1), xstar, drift, 0.1).cvm.value, 0.0);
    EXPECT_GE(stat_ergodic_free(w, ScalarModel::ornstein_uhlenbeck(1.0)).value, 0.0);
    EXPECT_GE(stat_ergodic_edf(w, t).cvm.value, 0.0);
    EXPECT_GE(stat_ergodic_density(w, t).cvm.value, 0.0);
  }
}

TEST(StatErgodicEdf, PowerGrowsWithTheAlternativeShift) {
  const std::size_t m = 400;
  const double horizon = 100.0;
  const ScalarModel null_drift = ScalarModel::ornstein_uhlenbeck(1.0);
  const DensityTable t = ou_table(-7.0, 7.0, 1401);
  auto samples = [&](double shift, StatKind kind) {
    const ErgodicSpec spec{null_drift + ScalarModel::constant(shift / std::sqrt(horizon)), std::nullopt, 0.0, horizon, 0.01};
    std::vector<double> v(m);
    for (std::size_t r = 0; r < m; ++r) {
      const SampledPath p = simulate_ergodic(spec, RngStream(98, r));
      v[r] = kind == StatKind::CVM_ERGODIC_EDF ? stat_ergodic_edf(p, t).cvm.value : stat_ergodic_density(p, t).cvm.value;
    }
    return v;
  };
  for (const StatKind kind : {StatKind::CVM_ERGODIC_EDF, StatKind::CVM_ERGODIC_DENSITY}) {
    auto null = samples(0.0, kind);
    std::sort(null.begin(), null.end());
    const double c = null[static_cast<std::size_t>(0.95 * m)];
    double prev = 0.0;
    for (const double shift : {0.0, 2.0, 4.0}) {
      const auto alt = samples(shift, kind);
      const double beta =
          static_cast<double>(std::count_if(alt.begin(), alt.end(), [c](double v) { return v > c; })) / static_cast<double>(m);
      EXPECT_GE(beta, prev) << to_string(kind) << " shift=" << shift;
      prev = beta;
    }
    EXPECT_GT(prev, 0.5) << to_string(kind);
  }
}
