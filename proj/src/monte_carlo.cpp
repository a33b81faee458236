#include "ctgof/monte_carlo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>

#include <boost/math/distributions/normal.hpp>
#include <omp.h>

namespace ctgof {

namespace {

bool same_alpha(double a, double b) { return std::abs(a - b) <= 1e-12; }

std::size_t order_index(double p, std::size_t m) {
  // 1-based ceil(p M), clamped; the epsilon absorbs binary representation of p.
  const double raw = std::ceil(p * static_cast<double>(m) - 1e-9);
  const double clamped = std::clamp(raw, 1.0, static_cast<double>(m));
  return static_cast<std::size_t>(clamped) - 1;
}

void check_alphas(const std::vector<double>& alphas) {
  if (alphas.empty()) throw std::invalid_argument("alpha list is empty");
  for (const double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  }
}

}  // namespace

const CalibrationEntry* CalibrationTable::find(std::string_view kind, double alpha, std::string_view horizon) const {
  for (const auto& e : entries) {
    if (e.kind == kind && e.horizon == horizon && same_alpha(e.alpha, alpha)) return &e;
  }
  return nullptr;
}

const CalibrationEntry& CalibrationTable::require(std::string_view kind, double alpha, std::string_view horizon) const {
  if (const auto* e = find(kind, alpha, horizon)) return *e;
  throw MissingCalibration("no calibrated threshold for " + std::string(kind) + " at alpha=" + std::to_string(alpha) +
                           ", horizon " + std::string(horizon));
}

void CalibrationTable::append(const CalibrationTable& other) {
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

std::string horizon_label(double horizon) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, horizon);
  return "T=" + std::string(buf, res.ptr);
}

std::uint64_t fnv1a(std::string_view text) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

QuantileEstimate empirical_quantile(std::span<const double> sorted, double alpha) {
  const std::size_t m = sorted.size();
  if (m == 0) throw std::invalid_argument("empirical_quantile: no samples");
  const double p = 1.0 - alpha;
  const double delta = 1.0 / std::sqrt(static_cast<double>(m));
  const double lo = sorted[order_index(std::max(p - delta, 0.0), m)];
  const double hi = sorted[order_index(std::min(p + delta, 1.0), m)];
  return {sorted[order_index(p, m)], 0.5 * (hi - lo) * std::sqrt(p * (1.0 - p))};
}

RejectionEstimate rejection_frequency(std::span<const double> samples, double threshold) {
  if (samples.empty()) throw std::invalid_argument("rejection_frequency: no samples");
  const auto hits = std::count_if(samples.begin(), samples.end(), [threshold](double v) { return v > threshold; });
  const double m = static_cast<double>(samples.size());
  const double rate = static_cast<double>(hits) / m;
  return {rate, std::sqrt(rate * (1.0 - rate) / m)};
}

void set_thread_count(int n_threads) {
  if (n_threads < 1) throw std::invalid_argument("thread count must be at least 1");
  omp_set_num_threads(n_threads);
}

int thread_count() { return omp_get_max_threads(); }

void parallel_replicates(std::size_t n_replicates, const std::function<void(std::size_t)>& body) {
  std::mutex guard;
  std::exception_ptr first_error;
  std::size_t first_index = std::numeric_limits<std::size_t>::max();
  const auto m = static_cast<std::int64_t>(n_replicates);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < m; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(guard);
      if (static_cast<std::size_t>(i) < first_index) {
        first_index = static_cast<std::size_t>(i);
        first_error = std::current_exception();
      }
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

LimitSamples limit_samples(std::size_t n_replicates, const Grid& grid, std::uint64_t master_seed,
                           std::string_view purpose) {
  const std::uint64_t seed = derive_seed(master_seed, purpose);
  LimitSamples out{std::vector<double>(n_replicates), std::vector<double>(n_replicates)};
  parallel_replicates(n_replicates, [&](std::size_t i) {
    const SampledPath w = simulate_wiener(grid, RngStream(seed, i));
    out.cvm[i] = cvm_functional(w);
    out.ks[i] = ks_functional_continuous(w.values, grid.step() / grid.horizon()) / std::sqrt(grid.horizon());
  });
  return out;
}

std::vector<double> kl_samples(std::size_t n_replicates, std::size_t n_terms, std::uint64_t master_seed) {
  const std::uint64_t seed = derive_seed(master_seed, "kl_series");
  std::vector<double> out(n_replicates);
  parallel_replicates(n_replicates, [&](std::size_t i) { out[i] = kl_series_sample(n_terms, RngStream(seed, i)); });
  return out;
}

void add_quantiles(CalibrationTable& table, std::string_view kind, std::string_view horizon,
                   std::string_view resolution, std::vector<double>& samples, const std::vector<double>& alphas) {
  std::sort(samples.begin(), samples.end());
  for (const double a : alphas) {
    const QuantileEstimate q = empirical_quantile(samples, a);
    table.entries.push_back({std::string(kind), a, std::string(horizon), q.value, q.standard_error, samples.size(),
                             std::string(resolution)});
  }
}

CalibrationTable calibrate_limit(const std::vector<double>& alphas, std::size_t n_replicates, const Grid& grid,
                                 std::uint64_t master_seed) {
  check_alphas(alphas);
  if (n_replicates < 1000) throw std::invalid_argument("calibrate_limit: need at least 1000 replicates");
  LimitSamples s = limit_samples(n_replicates, grid, master_seed);
  CalibrationTable table;
  table.master_seed = master_seed;
  const std::string res = "n_steps=" + std::to_string(grid.n_steps());
  add_quantiles(table, "CVM", "limit", res, s.cvm, alphas);
  add_quantiles(table, "KS", "limit", res, s.ks, alphas);
  return table;
}

CalibrationTable calibrate_finite_poisson(const std::vector<double>& alphas, const std::vector<std::size_t>& period_counts,
                                          std::size_t n_replicates, std::uint64_t master_seed) {
  check_alphas(alphas);
  if (n_replicates < 1000) throw std::invalid_argument("calibrate_finite_poisson: need at least 1000 replicates");
  CalibrationTable table;
  table.master_seed = master_seed;
  const ScalarModel identity = ScalarModel::linear(0.0, 1.0);
  for (const std::size_t n : period_counts) {
    if (n == 0) throw std::invalid_argument("calibrate_finite_poisson: period counts must be positive");
    const std::uint64_t seed = derive_seed(master_seed, "calibrate_finite_poisson/n=" + std::to_string(n));
    const ObservationWindow window = ObservationWindow::periods(1.0, n);
    std::vector<double> cvm(n_replicates), ks(n_replicates);
    parallel_replicates(n_replicates, [&](std::size_t i) {
      const EventRecord rec = simulate_poisson(ConstantIntensity{1.0}, window, RngStream(seed, i));
      const StatPair st = stat_poisson(rec, identity);
      cvm[i] = st.cvm.value;
      ks[i] = st.ks.value;
    });
    const std::string horizon = horizon_label(static_cast<double>(n));
    const std::string res = "n=" + std::to_string(n);
    add_quantiles(table, "CVM_POISSON", horizon, res, cvm, alphas);
    add_quantiles(table, "KS_POISSON", horizon, res, ks, alphas);
  }
  return table;
}

ErgodicNullModel make_ergodic_null(ErgodicSpec spec, std::string description,
                                   std::optional<std::pair<double, double>> range, std::size_t n_points) {
  std::vector<double> grid;
  if (range) {
    if (!(range->second > range->first)) throw std::invalid_argument("make_ergodic_null: empty density range");
    grid = linspace(range->first, range->second, n_points);
  } else {
    // a short horizon underestimates the spread; the pilot runs at least 1000 time units
    ErgodicSpec pilot_spec = spec;
    pilot_spec.horizon = std::max(spec.horizon, spec.dt * std::ceil(1000.0 / spec.dt));
    const SampledPath pilot = simulate_ergodic(pilot_spec, RngStream(derive_seed(0, "density_pilot"), 0));
    grid = default_density_grid(pilot, n_points);
  }
  const ScalarModel sigma = spec.diffusion ? *spec.diffusion : ScalarModel::constant(1.0);
  DensityTable table = invariant_density(spec.drift, sigma, std::move(grid));
  return {std::move(spec), std::move(table), std::move(description)};
}

StatResult model_statistic(StatKind kind, const SampledPath& path, const ErgodicNullModel& model) {
  switch (kind) {
    case StatKind::CVM_ERGODIC_EDF:
      return stat_ergodic_edf(path, model.table).cvm;
    case StatKind::KS_ERGODIC_EDF:
      return stat_ergodic_edf(path, model.table).ks;
    case StatKind::CVM_ERGODIC_DENSITY:
      return stat_ergodic_density(path, model.table).cvm;
    case StatKind::KS_ERGODIC_DENSITY:
      return stat_ergodic_density(path, model.table).ks;
    case StatKind::CVM_ERGODIC_FREE:
      return stat_ergodic_free(path, model.spec.drift);
    case StatKind::CVM_ERGODIC_FREE_SIGMA: {
      const ScalarModel sigma = model.spec.diffusion ? *model.spec.diffusion : ScalarModel::constant(1.0);
      return stat_ergodic_free_sigma(path, model.spec.drift, sigma, model.table);
    }
    default:
      throw std::invalid_argument("model_statistic: " + std::string(to_string(kind)) +
                                  " is not an ergodic-diffusion statistic");
  }
}

CalibrationTable calibrate_model_null(StatKind kind, const ErgodicNullModel& model, const std::vector<double>& alphas,
                                      std::size_t n_replicates, std::uint64_t master_seed) {
  check_alphas(alphas);
  if (n_replicates == 0) throw std::invalid_argument("calibrate_model_null: need replicates");
  const std::uint64_t seed = derive_seed(master_seed, "calibrate_model_null/" + std::string(to_string(kind)));
  std::vector<double> values(n_replicates, std::numeric_limits<double>::quiet_NaN());
  parallel_replicates(n_replicates, [&](std::size_t i) {
    try {
      const SampledPath path = simulate_ergodic(model.spec, RngStream(seed, i));
      values[i] = model_statistic(kind, path, model).value;
    } catch (const DivergenceError&) {
      // left as NaN and counted below
    }
  });
  std::vector<double> kept;
  kept.reserve(n_replicates);
  for (const double v : values) {
    if (!std::isnan(v)) kept.push_back(v);
  }
  const std::size_t aborted = n_replicates - kept.size();
  if (static_cast<double>(aborted) > 1e-4 * static_cast<double>(n_replicates)) {
    throw CalibrationFailure("calibrate_model_null: " + std::to_string(aborted) + " of " +
                             std::to_string(n_replicates) + " replicates diverged (limit 0.01%)");
  }
  if (kept.empty()) throw CalibrationFailure("calibrate_model_null: no replicates completed");

  char hash[17];
  const auto res = std::to_chars(hash, hash + 16, fnv1a(model.description), 16);
  CalibrationTable table;
  table.master_seed = master_seed;
  add_quantiles(table, to_string(kind), horizon_label(model.spec.horizon), "model=" + std::string(hash, res.ptr), kept,
                alphas);
  return table;
}

double upper_normal_quantile(double alpha) {
  return boost::math::quantile(boost::math::complement(boost::math::normal(), alpha));
}

double laump_power(double rho, double alpha) {
  return boost::math::cdf(boost::math::normal(), rho - upper_normal_quantile(alpha));
}

namespace {

double limit_threshold(const CalibrationTable& table, std::string_view kind, double alpha) {
  return table.require(kind, alpha, "limit").threshold;
}

PowerCurve analytic_laump(const std::vector<double>& rhos, double alpha) {
  PowerCurve c{"LAUMP", alpha, "analytic", {}};
  for (const double r : rhos) c.points.push_back({r, laump_power(r, alpha), 0.0});
  return c;
}

}  // namespace

std::vector<PowerCurve> limit_power_curves(const std::vector<double>& rhos, double alpha, std::size_t n_replicates,
                                           const Grid& grid, std::uint64_t master_seed, const CalibrationTable& table) {
  if (n_replicates == 0) throw std::invalid_argument("limit_power: need replicates");
  const double c = limit_threshold(table, "CVM", alpha);
  const double d = limit_threshold(table, "KS", alpha);
  const std::uint64_t seed = derive_seed(master_seed, "limit_power");
  const std::size_t k = rhos.size();
  std::vector<unsigned char> cvm_reject(n_replicates * k), ks_reject(n_replicates * k);
  const double shift = kDiscreteMonitoringShift * std::sqrt(grid.step());
  parallel_replicates(n_replicates, [&](std::size_t i) {
    const SampledPath w = simulate_wiener(grid, RngStream(seed, i));
    std::vector<double> y(w.values.size());
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t j = 0; j < y.size(); ++j) y[j] = w.values[j] + rhos[r] * grid.time(j);
      cvm_reject[i * k + r] = cvm_functional(y, grid.step(), grid.horizon()) > c;
      ks_reject[i * k + r] = ks_functional(y) + shift > d;
    }
  });
  PowerCurve cvm{"CVM", alpha, "limit-simulation", {}}, ks{"KS", alpha, "limit-simulation", {}};
  const double m = static_cast<double>(n_replicates);
  for (std::size_t r = 0; r < k; ++r) {
    double hc = 0.0, hk = 0.0;
    for (std::size_t i = 0; i < n_replicates; ++i) {
      hc += cvm_reject[i * k + r];
      hk += ks_reject[i * k + r];
    }
    const double bc = hc / m, bk = hk / m;
    cvm.points.push_back({rhos[r], bc, std::sqrt(bc * (1.0 - bc) / m)});
    ks.points.push_back({rhos[r], bk, std::sqrt(bk * (1.0 - bk) / m)});
  }
  return {cvm, ks, analytic_laump(rhos, alpha)};
}

PowerCurve limit_power(std::string_view kind, const std::vector<double>& rhos, double alpha, std::size_t n_replicates,
                       const Grid& grid, std::uint64_t master_seed, const CalibrationTable& table) {
  if (kind == "LAUMP") return analytic_laump(rhos, alpha);
  if (kind != "CVM" && kind != "KS") throw std::invalid_argument("limit_power: kind must be CVM, KS or LAUMP");
  for (auto& curve : limit_power_curves(rhos, alpha, n_replicates, grid, master_seed, table)) {
    if (curve.kind == kind) return curve;
  }
  throw std::logic_error("limit_power: curve not produced");
}

PowerPoint limit_power_signal(std::span<const double> hstar, std::string_view kind, double alpha,
                              std::size_t n_replicates, const Grid& grid, std::uint64_t master_seed,
                              const CalibrationTable& table) {
  if (hstar.size() != grid.size()) throw std::invalid_argument("limit_power_signal: h* must be sampled on the grid");
  if (kind != "CVM" && kind != "KS") throw std::invalid_argument("limit_power_signal: kind must be CVM or KS");
  const double threshold = limit_threshold(table, kind, alpha);
  std::vector<double> drift(grid.size(), 0.0);
  for (std::size_t j = 1; j < drift.size(); ++j) drift[j] = drift[j - 1] + 0.5 * grid.step() * (hstar[j - 1] + hstar[j]);
  const std::uint64_t seed = derive_seed(master_seed, "limit_power_signal");
  const bool cvm = kind == "CVM";
  const double shift = kDiscreteMonitoringShift * std::sqrt(grid.step());
  std::vector<double> stat(n_replicates);
  parallel_replicates(n_replicates, [&](std::size_t i) {
    SampledPath w = simulate_wiener(grid, RngStream(seed, i));
    for (std::size_t j = 0; j < drift.size(); ++j) w.values[j] += drift[j];
    stat[i] = cvm ? cvm_functional(w) : ks_functional(w) + shift;
  });
  const RejectionEstimate r = rejection_frequency(stat, threshold);
  return {l2_norm(hstar, grid), r.rate, r.standard_error};
}

std::vector<double> finite_sample_statistics(const FiniteModel& model, std::string_view kind,
                                             std::size_t n_replicates, std::uint64_t master_seed) {
  const std::uint64_t seed = derive_seed(master_seed, "finite_sample_power");
  std::vector<double> stat(n_replicates);
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, HawkesAlternativeModel>) {
          if (kind != "CVM" && kind != "KS" && kind != "LAUMP") {
            throw std::invalid_argument("finite_sample_power: Hawkes model supports CVM, KS and LAUMP");
          }
          const ScalarModel null_cumulative = ScalarModel::linear(0.0, m.base_rate);
          parallel_replicates(n_replicates, [&](std::size_t i) {
            const EventRecord rec = simulate_hawkes_alternative(m.h, m.base_rate, m.n_periods, m.period, RngStream(seed, i));
            if (kind == "LAUMP") {
              stat[i] = stat_laump(rec, m.base_rate).value;
            } else {
              const StatPair st = stat_poisson(rec, null_cumulative);
              stat[i] = kind == "CVM" ? st.cvm.value : st.ks.value;
            }
          });
        } else if constexpr (std::is_same_v<M, ErgodicFreeAlternative>) {
          if (kind != "CVM") throw std::invalid_argument("finite_sample_power: ergodic-free model supports CVM only");
          ErgodicSpec alt = m.null_spec;
          const double scale = 1.0 / std::sqrt(alt.horizon);
          alt.drift = m.null_spec.drift + m.h.scaled(scale);
          parallel_replicates(n_replicates, [&](std::size_t i) {
            const SampledPath path = simulate_ergodic(alt, RngStream(seed, i));
            stat[i] = stat_ergodic_free_sigma(path, m.null_spec.drift, m.sigma2_moment).value;
          });
        } else {
          if (kind != "CVM" && kind != "KS") throw std::invalid_argument("finite_sample_power: small-noise model supports CVM and KS");
          const SampledPath xstar = solve_limit_ode(m.spec.drift, m.spec.x0, m.grid).path;
          parallel_replicates(n_replicates, [&](std::size_t i) {
            const SampledPath path = simulate_small_noise(m.spec, m.grid, RngStream(seed, i));
            const StatPair st = stat_small_noise(path, xstar, m.spec.drift, m.spec.epsilon);
            stat[i] = kind == "CVM" ? st.cvm.value : st.ks.value;
          });
        }
      },
      model);
  return stat;
}

PowerPoint finite_sample_power(const FiniteModel& model, std::string_view kind, double rho, double alpha,
                               std::size_t n_replicates, std::uint64_t master_seed, const CalibrationTable& table) {
  const double threshold =
      kind == "LAUMP" ? upper_normal_quantile(alpha) : limit_threshold(table, kind, alpha);
  const auto stat = finite_sample_statistics(model, kind, n_replicates, master_seed);
  const RejectionEstimate r = rejection_frequency(stat, threshold);
  return {rho, r.rate, r.standard_error};
}

}  // namespace ctgof
