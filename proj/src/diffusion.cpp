#include "ctgof/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ctgof {

namespace {

void guard(double x, std::size_t step) {
  if (!(std::abs(x) <= kDivergenceBound)) {
    throw DivergenceError("trajectory left |x| <= 1e8 at step " + std::to_string(step));
  }
}

double inverse_square(double s) {
  return s == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / (s * s);
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double acc = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return acc;
}

// Composite Simpson on [a, b] with an even number of panels.
double simpson(const std::function<double(double)>& f, double a, double b, std::size_t panels) {
  if (a == b) return 0.0;
  panels += panels % 2;
  const double h = (b - a) / static_cast<double>(panels);
  double acc = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) {
    acc += (i % 2 ? 4.0 : 2.0) * f(a + static_cast<double>(i) * h);
  }
  return acc * h / 3.0;
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  const auto hi = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
  const std::size_t lo = hi - 1;
  const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + w * (ys[hi] - ys[lo]);
}

}  // namespace

std::vector<double> linspace(double a, double b, std::size_t n) {
  if (n < 2) throw std::invalid_argument("linspace: need at least two points");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

LimitOdeSolution solve_limit_ode(const ScalarModel& drift, double x0, const Grid& grid) {
  const std::size_t n = grid.n_steps();
  const double h = grid.step();
  std::vector<double> x(n + 1), u(n + 1);
  x[0] = x0;
  u[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double k1 = drift(x[i]);
    const double k2 = drift(x[i] + 0.5 * h * k1);
    const double k3 = drift(x[i] + 0.5 * h * k2);
    const double k4 = drift(x[i] + h * k3);
    x[i + 1] = x[i] + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    guard(x[i + 1], i + 1);
    u[i + 1] = u[i] + h * (inverse_square(k1) + 2.0 * inverse_square(k2) + 2.0 * inverse_square(k3) +
                           inverse_square(k4)) / 6.0;
  }
  return {SampledPath(grid, std::move(x)), std::move(u)};
}

SampledPath simulate_small_noise(const SmallNoiseSpec& spec, const Grid& grid, const RngStream& rng) {
  if (!(spec.epsilon > 0.0)) throw std::invalid_argument("simulate_small_noise: epsilon must be positive");
  if (grid.horizon() != spec.horizon) {
    throw std::invalid_argument("simulate_small_noise: grid horizon differs from spec horizon");
  }
  const std::size_t n = grid.n_steps();
  const double dt = grid.step();
  const double noise_scale = spec.epsilon * std::sqrt(dt);
  std::vector<double> z(n);
  rng.fill_gaussian(z);

  std::vector<double> x(n + 1);
  x[0] = spec.x0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = spec.drift(x[i]);
    double mean = s;
    if (spec.alternative) {
      if (!(s > 0.0)) {
        throw std::domain_error("simulate_small_noise: null drift must stay positive under an alternative");
      }
      mean += spec.epsilon * (*spec.alternative)(x[i]) / s;
    }
    const double sigma = spec.diffusion ? (*spec.diffusion)(x[i]) : 1.0;
    x[i + 1] = x[i] + mean * dt + noise_scale * sigma * z[i];
    guard(x[i + 1], i + 1);
  }
  return SampledPath(grid, std::move(x));
}

std::size_t ErgodicSpec::n_steps() const {
  if (!(dt > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("ErgodicSpec: dt and horizon must be positive");
  if (dt > horizon) throw std::invalid_argument("ErgodicSpec: dt must not exceed the horizon");
  const double ratio = horizon / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * ratio) {
    throw std::invalid_argument("ErgodicSpec: horizon must be a multiple of dt");
  }
  return static_cast<std::size_t>(rounded);
}

SampledPath simulate_ergodic(const ErgodicSpec& spec, const RngStream& rng) {
  const std::size_t n = spec.n_steps();
  const Grid grid(n, spec.horizon);
  const double dt = grid.step();
  const double sqrt_dt = std::sqrt(dt);
  std::vector<double> z(n);
  rng.fill_gaussian(z);

  std::vector<double> x(n + 1);
  x[0] = spec.x0;
  if (spec.diffusion) {
    const auto& sigma = *spec.diffusion;
    for (std::size_t i = 0; i < n; ++i) {
      x[i + 1] = x[i] + spec.drift(x[i]) * dt + sigma(x[i]) * sqrt_dt * z[i];
      guard(x[i + 1], i + 1);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      x[i + 1] = x[i] + spec.drift(x[i]) * dt + sqrt_dt * z[i];
      guard(x[i + 1], i + 1);
    }
  }
  return SampledPath(grid, std::move(x));
}

double DensityTable::density_at(double x) const {
  if (x <= x_grid.front() || x >= x_grid.back()) return 0.0;
  return interpolate(x_grid, density, x);
}

double DensityTable::cdf_at(double x) const {
  if (x <= x_grid.front()) return 0.0;
  if (x >= x_grid.back()) return 1.0;
  return interpolate(x_grid, cdf, x);
}

DensityTable invariant_density(const ScalarModel& drift, const ScalarModel& diffusion,
                               std::vector<double> x_grid, double edge_tolerance) {
  if (x_grid.size() < 3) throw std::invalid_argument("invariant_density: grid needs at least three points");
  for (std::size_t i = 1; i < x_grid.size(); ++i) {
    if (!(x_grid[i] > x_grid[i - 1])) {
      throw std::invalid_argument("invariant_density: grid must be strictly increasing");
    }
  }
  const std::function<double(double)> integrand = [&](double y) {
    const double s = diffusion(y);
    return 2.0 * drift(y) / (s * s);
  };

  // Exponent 2 int_0^x S / sigma^2, accumulated panel by panel from the left
  // edge and re-referenced to 0.
  const std::size_t m = x_grid.size();
  std::vector<double> log_f(m);
  double phi = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (i > 0) phi += simpson(integrand, x_grid[i - 1], x_grid[i], 2);
    const double s = diffusion(x_grid[i]);
    if (!(s > 0.0)) throw std::domain_error("invariant_density: diffusion coefficient must be positive");
    log_f[i] = phi - 2.0 * std::log(s);
  }
  const double phi_at_zero = simpson(integrand, x_grid.front(), 0.0, 2000);
  for (auto& v : log_f) v -= phi_at_zero;

  const double peak = *std::max_element(log_f.begin(), log_f.end());
  if (!std::isfinite(peak)) throw std::domain_error("invariant_density: exponent is not finite");
  std::vector<double> f(m);
  for (std::size_t i = 0; i < m; ++i) f[i] = std::exp(log_f[i] - peak);
  if (f.front() > edge_tolerance || f.back() > edge_tolerance) {
    throw std::domain_error("invariant_density: density is not integrable over the grid "
                            "(edge mass relative to the mode exceeds the tolerance)");
  }

  const double mass = trapezoid(x_grid, f);
  DensityTable table;
  table.density.resize(m);
  table.cdf.resize(m);
  for (std::size_t i = 0; i < m; ++i) table.density[i] = f[i] / mass;
  table.cdf[0] = 0.0;
  for (std::size_t i = 1; i < m; ++i) {
    table.cdf[i] = table.cdf[i - 1] + 0.5 * (x_grid[i] - x_grid[i - 1]) * (table.density[i] + table.density[i - 1]);
  }
  // rounding can push the running sum past 1; rescale so cdf ends at exactly 1
  const double total = table.cdf.back();
  for (auto& c : table.cdf) c = std::min(c / total, 1.0);
  table.log_normalizer = std::log(mass) + peak;
  table.x_grid = std::move(x_grid);
  return table;
}

double expect_under_invariant(const ScalarModel& g, const DensityTable& table) {
  std::vector<double> gf(table.x_grid.size());
  for (std::size_t i = 0; i < gf.size(); ++i) gf[i] = g(table.x_grid[i]) * table.density[i];
  return trapezoid(table.x_grid, gf);
}

std::vector<double> default_density_grid(const SampledPath& pilot, std::size_t n_points, double half_width_sd) {
  const auto& v = pilot.values;
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (const double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / n);
  if (!(sd > 0.0)) throw std::invalid_argument("default_density_grid: pilot path is constant");
  return linspace(mean - half_width_sd * sd, mean + half_width_sd * sd, n_points);
}

}  // namespace ctgof
