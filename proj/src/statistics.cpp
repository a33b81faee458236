#include "ctgof/statistics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ctgof {

namespace {

constexpr std::array<std::string_view, 12> kKindNames = {
    "CVM_SMALL_NOISE",     "KS_SMALL_NOISE",     "CVM_ERGODIC_EDF",  "KS_ERGODIC_EDF",
    "CVM_ERGODIC_DENSITY", "KS_ERGODIC_DENSITY", "CVM_ERGODIC_FREE", "CVM_ERGODIC_FREE_SIGMA",
    "CVM_POISSON",         "KS_POISSON",         "LAUMP",            "LAN_DELTA",
};

void require_same_grid(const SampledPath& x, const SampledPath& xstar, const char* who) {
  if (!(x.grid == xstar.grid)) throw std::invalid_argument(std::string(who) + ": X and x* must share a grid");
}

// Trapezoid weights for a uniform grid.
double trapezoid_uniform(const std::vector<double>& y, double step) {
  if (y.size() < 2) return 0.0;
  double acc = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) acc += y[i];
  return acc * step;
}

StatPair discrepancy(std::span<const double> estimate, const std::vector<double>& null_values,
                     const DensityTable& table, double horizon, StatKind cvm_kind, StatKind ks_kind,
                     const char* what) {
  const auto& xg = table.x_grid;
  if (estimate.size() != xg.size()) {
    throw std::invalid_argument(std::string(what) + ": estimate must be evaluated on the table grid");
  }
  if (!(horizon > 0.0)) throw std::invalid_argument(std::string(what) + ": horizon must be positive");
  double integral = 0.0, sup = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < xg.size(); ++i) {
    const double d = estimate[i] - null_values[i];
    const double cur = d * d * table.density[i];
    if (i > 0) integral += 0.5 * (xg[i] - xg[i - 1]) * (cur + prev);
    prev = cur;
    sup = std::max(sup, std::abs(d));
  }
  StatPair out{{cvm_kind, horizon * integral, "T * int (est - null)^2 dF*", {}},
               {ks_kind, std::sqrt(horizon) * sup, "T^1/2 * sup |est - null| (rejection scale)", {}}};
  return out;
}

}  // namespace

std::string_view to_string(StatKind kind) noexcept { return kKindNames[static_cast<std::size_t>(kind)]; }

StatKind stat_kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<StatKind>(i);
  }
  throw std::invalid_argument("unknown statistic kind '" + std::string(name) + "'");
}

const std::vector<StatKind>& all_stat_kinds() {
  static const std::vector<StatKind> kinds = [] {
    std::vector<StatKind> v;
    for (std::size_t i = 0; i < kKindNames.size(); ++i) v.push_back(static_cast<StatKind>(i));
    return v;
  }();
  return kinds;
}

StatPair stat_small_noise(const SampledPath& x, const SampledPath& xstar, const ScalarModel& drift, double epsilon) {
  require_same_grid(x, xstar, "stat_small_noise");
  if (!(epsilon > 0.0)) throw std::invalid_argument("stat_small_noise: epsilon must be positive");
  const std::size_t m = x.values.size();
  std::vector<double> inv2(m), sq(m);
  double sup = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double s = drift(xstar.values[i]);
    if (!(s > 0.0)) throw std::domain_error("stat_small_noise: S*(x*) must be positive along the limit path");
    const double r = (x.values[i] - xstar.values[i]) / s;
    inv2[i] = 1.0 / (s * s);
    const double q = r / (epsilon * s);
    sq[i] = q * q;
    sup = std::max(sup, std::abs(r));
  }
  const double step = x.grid.step();
  const double u = trapezoid_uniform(inv2, step);
  return {{StatKind::CVM_SMALL_NOISE, trapezoid_uniform(sq, step) / (u * u), "u_T^-2 scale", {}},
          {StatKind::KS_SMALL_NOISE, sup / (std::sqrt(u) * epsilon), "eps^-1 * D_eps (rejection scale)", {}}};
}

StatResult stat_small_noise_sigma(const SampledPath& x, const SampledPath& xstar, const ScalarModel& drift,
                                  const ScalarModel& sigma, double epsilon) {
  require_same_grid(x, xstar, "stat_small_noise_sigma");
  if (!(epsilon > 0.0)) throw std::invalid_argument("stat_small_noise_sigma: epsilon must be positive");
  const std::size_t m = x.values.size();
  std::vector<double> weight(m), sq(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double s = drift(xstar.values[i]);
    if (!(s > 0.0)) throw std::domain_error("stat_small_noise_sigma: S*(x*) must be positive along the limit path");
    const double sg = sigma(xstar.values[i]);
    if (!std::isfinite(sg)) throw std::domain_error("stat_small_noise_sigma: sigma(x*) is not finite");
    weight[i] = (sg / s) * (sg / s);
    const double q = (x.values[i] - xstar.values[i]) * sg / (epsilon * s * s);
    sq[i] = q * q;
  }
  const double step = x.grid.step();
  const double u = trapezoid_uniform(weight, step);
  return {StatKind::CVM_SMALL_NOISE, trapezoid_uniform(sq, step) / (u * u),
          "U^-2 scale, U = int (sigma/S*)^2 dt; integrand weighted by sigma(x*)", {}};
}

std::vector<double> empirical_df(const SampledPath& x, std::span<const double> x_grid) {
  const std::size_t n = x.grid.n_steps();
  std::vector<double> sorted(x.values.begin(), x.values.begin() + static_cast<std::ptrdiff_t>(n));
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out(x_grid.size());
  for (std::size_t k = 0; k < x_grid.size(); ++k) {
    const auto below = std::lower_bound(sorted.begin(), sorted.end(), x_grid[k]) - sorted.begin();
    out[k] = static_cast<double>(below) / static_cast<double>(n);
  }
  return out;
}

std::vector<double> local_time_density(const SampledPath& x, std::span<const double> x_grid) {
  const std::size_t n = x.grid.n_steps();
  std::vector<std::pair<double, double>> level_increment(n);
  for (std::size_t i = 0; i < n; ++i) level_increment[i] = {x.values[i], x.values[i + 1] - x.values[i]};
  std::sort(level_increment.begin(), level_increment.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<double> levels(n), prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    levels[i] = level_increment[i].first;
    prefix[i + 1] = prefix[i] + level_increment[i].second;
  }
  const double scale = 2.0 / x.horizon();
  std::vector<double> out(x_grid.size());
  for (std::size_t k = 0; k < x_grid.size(); ++k) {
    const auto below = static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), x_grid[k]) - levels.begin());
    out[k] = scale * prefix[below];
  }
  return out;
}

StatPair stat_ergodic_edf(std::span<const double> edf, const DensityTable& null_table, double horizon) {
  return discrepancy(edf, null_table.cdf, null_table, horizon, StatKind::CVM_ERGODIC_EDF, StatKind::KS_ERGODIC_EDF,
                     "stat_ergodic_edf");
}

StatPair stat_ergodic_edf(const SampledPath& x, const DensityTable& null_table) {
  const auto edf = empirical_df(x, null_table.x_grid);
  return stat_ergodic_edf(edf, null_table, x.horizon());
}

StatPair stat_ergodic_density(std::span<const double> density, const DensityTable& null_table, double horizon) {
  StatPair out = discrepancy(density, null_table.density, null_table, horizon, StatKind::CVM_ERGODIC_DENSITY,
                             StatKind::KS_ERGODIC_DENSITY, "stat_ergodic_density");
  const auto negative = std::count_if(density.begin(), density.end(), [](double v) { return v < 0.0; });
  const std::string note = "; local-time estimate negative at " + std::to_string(negative) + " grid points (not clipped)";
  out.cvm.scale_note += note;
  out.ks.scale_note += note;
  return out;
}

StatPair stat_ergodic_density(const SampledPath& x, const DensityTable& null_table) {
  const auto fhat = local_time_density(x, null_table.x_grid);
  return stat_ergodic_density(fhat, null_table, x.horizon());
}

StatResult stat_ergodic_free(const SampledPath& x, const ScalarModel& drift) {
  const std::size_t m = x.values.size();
  const double step = x.grid.step();
  std::vector<double> residual(m);
  double drift_integral = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    residual[i] = x.values[i] - x.values[0] - drift_integral;
    drift_integral += drift(x.values[i]) * step;
  }
  const double horizon = x.horizon();
  return {StatKind::CVM_ERGODIC_FREE, cvm_functional(residual, step, horizon) / horizon, "T^-2 scale", {}};
}

StatResult stat_ergodic_free_sigma(const SampledPath& x, const ScalarModel& drift, double sigma2_moment) {
  if (!(sigma2_moment > 0.0)) throw std::invalid_argument("stat_ergodic_free_sigma: E sigma^2 must be positive");
  StatResult r = stat_ergodic_free(x, drift);
  r.kind = StatKind::CVM_ERGODIC_FREE_SIGMA;
  r.value /= sigma2_moment;
  r.scale_note = "T^-2 / E sigma(xi)^2 scale";
  return r;
}

StatResult stat_ergodic_free_sigma(const SampledPath& x, const ScalarModel& drift, const ScalarModel& sigma,
                                   const DensityTable& null_table) {
  const ScalarModel sigma2{"sigma^2", [&sigma](double v) { return sigma(v) * sigma(v); }, std::nullopt};
  return stat_ergodic_free_sigma(x, drift, expect_under_invariant(sigma2, null_table));
}

double StepFunction::operator()(double t) const {
  const auto n = std::upper_bound(jumps.begin(), jumps.end(), t) - jumps.begin();
  return jump_size * static_cast<double>(n);
}

StepFunction lambda_hat(const EventRecord& record) {
  const PeriodFold fold = fold_periods(record);
  StepFunction out;
  out.period = fold.period;
  out.jump_size = 1.0 / static_cast<double>(fold.n_periods());
  out.jumps.reserve(fold.total());
  for (const auto& p : fold.phases) out.jumps.insert(out.jumps.end(), p.begin(), p.end());
  std::sort(out.jumps.begin(), out.jumps.end());
  return out;
}

ScalarModel cumulative_intensity(const ScalarModel& rate, double period) {
  if (!(period > 0.0)) throw std::invalid_argument("cumulative_intensity: period must be positive");
  auto ys = cumulative_trapezoid(rate, 0.0, period, kLambdaTablePoints);
  std::vector<double> xs(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = period * static_cast<double>(i) / static_cast<double>(kLambdaTablePoints);
  }
  return ScalarModel::tabulated(std::move(xs), std::move(ys), "cumulative(" + rate.label + ")");
}

StatPair stat_poisson(const EventRecord& record, const ScalarModel& cumulative) {
  const StepFunction lam = lambda_hat(record);
  const double tau = lam.period;
  const double total = cumulative(tau);
  if (!(total > 0.0)) throw std::domain_error("stat_poisson: Lambda*(tau) must be positive");
  const double n = static_cast<double>(record.layout->n_periods);

  double integral = 0.0, sup = 0.0, level = 0.0;
  double left = 0.0, y_left = cumulative(0.0);
  auto segment = [&](double right) {
    const double y_right = cumulative(right);
    const double a = y_left - level, b = y_right - level;
    integral += (b * b * b - a * a * a) / 3.0;
    sup = std::max({sup, std::abs(a), std::abs(b)});
    left = right;
    y_left = y_right;
  };
  for (const double p : lam.jumps) {
    if (p > left) segment(p);
    level += lam.jump_size;
  }
  segment(tau);
  return {{StatKind::CVM_POISSON, n * integral / (total * total), "n * Lambda*(tau)^-2 scale, exact between jumps", {}},
          {StatKind::KS_POISSON, std::sqrt(n) * sup / std::sqrt(total), "sqrt(n) * D_n (rejection scale)", {}}};
}

StatResult stat_laump(const EventRecord& record, double base_rate) {
  if (!(base_rate > 0.0)) throw std::invalid_argument("stat_laump: S* must be positive");
  const double mean = base_rate * record.horizon;
  return {StatKind::LAUMP, (static_cast<double>(record.count()) - mean) / std::sqrt(mean),
          "(N - S* T) / sqrt(S* T)", {}};
}

namespace {

double support_of(const ScalarModel& h, const char* who) {
  if (!h.support_end || !(*h.support_end > 0.0)) {
    throw std::invalid_argument(std::string(who) + ": h must declare a compact support");
  }
  return *h.support_end;
}

}  // namespace

StatResult stat_lan_delta(const EventRecord& record, const ScalarModel& h, double base_rate, double period,
                          std::size_t n_periods) {
  if (!(base_rate > 0.0)) throw std::invalid_argument("stat_lan_delta: S* must be positive");
  const double support = support_of(h, "stat_lan_delta");
  const double horizon = period * static_cast<double>(n_periods);
  const auto cum = cumulative_trapezoid(h, 0.0, support, kKernelQuadraturePoints);
  const double cell = support / static_cast<double>(kKernelQuadraturePoints);
  auto h_mass_until = [&](double x) {
    if (x >= support) return cum.back();
    if (x <= 0.0) return 0.0;
    const double pos = x / cell;
    const auto i = std::min(static_cast<std::size_t>(pos), kKernelQuadraturePoints - 1);
    return cum[i] + (pos - static_cast<double>(i)) * (cum[i + 1] - cum[i]);
  };

  const auto& t = record.events;
  double pairs = 0.0, compensator = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = i; j-- > 0;) {
      const double lag = t[i] - t[j];
      if (lag > support) break;
      pairs += h(lag);
    }
    compensator += h_mass_until(horizon - t[i]);
  }
  return {StatKind::LAN_DELTA, (pairs - base_rate * compensator) / (base_rate * std::sqrt(horizon)),
          "(S* sqrt(tau n))^-1 scale", {}};
}

double fisher_info(const ScalarModel& h, double base_rate) {
  const double support = support_of(h, "fisher_info");
  const ScalarModel h2{"h^2", [&h](double v) { return h(v) * h(v); }, support};
  const double mass = trapezoid_integral(h, 0.0, support, kKernelQuadraturePoints);
  return trapezoid_integral(h2, 0.0, support, kKernelQuadraturePoints) + base_rate * mass * mass;
}

double rho_h(const AltDescriptor& alt) {
  return std::visit(
      [&](const auto& ctx) -> double {
        using C = std::decay_t<decltype(ctx)>;
        if constexpr (std::is_same_v<C, HawkesContext>) {
          const double support = support_of(alt.h, "rho_h");
          return std::sqrt(ctx.base_rate) * trapezoid_integral(alt.h, 0.0, support, kKernelQuadraturePoints);
        } else if constexpr (std::is_same_v<C, ErgodicContext>) {
          double sigma2 = 1.0;
          if (ctx.sigma) {
            const auto& s = *ctx.sigma;
            sigma2 = expect_under_invariant({"sigma^2", [&s](double v) { return s(v) * s(v); }, std::nullopt},
                                            ctx.null_table);
          }
          return expect_under_invariant(alt.h, ctx.null_table) / std::sqrt(sigma2);
        } else {
          throw std::invalid_argument("rho_h: no scalar drift for this model context");
        }
      },
      alt.context);
}

HStar hstar_transform(const ScalarModel& h, const SampledPath& xstar, const ScalarModel& drift,
                      const Grid& limit_grid) {
  const auto& xs = xstar.values;
  const double step = xstar.grid.step();
  std::vector<double> u(xs.size(), 0.0);
  double prev = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double s = drift(xs[i]);
    if (!(s > 0.0)) throw std::domain_error("hstar_transform: S*(x*) must be positive along the limit path");
    const double cur = 1.0 / (s * s);
    if (i > 0) u[i] = u[i - 1] + 0.5 * step * (prev + cur);
    prev = cur;
  }
  HStar out;
  out.u_T = u.back();
  const double root_u = std::sqrt(out.u_T);
  out.values.resize(limit_grid.size());
  for (std::size_t j = 0; j < limit_grid.size(); ++j) {
    const double target = out.u_T * limit_grid.time(j) / limit_grid.horizon();
    auto it = std::upper_bound(u.begin(), u.end(), target);
    double x_at;
    if (it == u.end()) {
      x_at = xs.back();
    } else {
      const auto hi = static_cast<std::size_t>(it - u.begin());
      const std::size_t lo = hi == 0 ? 0 : hi - 1;
      const double w = hi == lo ? 0.0 : (target - u[lo]) / (u[hi] - u[lo]);
      x_at = xs[lo] + w * (xs[hi] - xs[lo]);
    }
    out.values[j] = root_u * h(x_at);
  }
  return out;
}

double l2_norm(std::span<const double> values, const Grid& grid) {
  if (values.size() != grid.size()) throw std::invalid_argument("l2_norm: values must match the grid");
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = values[i] * values[i];
  return std::sqrt(trapezoid_uniform(sq, grid.step()) / grid.horizon());
}

}  // namespace ctgof
