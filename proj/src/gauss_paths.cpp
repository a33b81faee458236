#include "ctgof/gauss_paths.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

namespace ctgof {

Grid::Grid(std::size_t n_steps, double horizon) : n_steps_(n_steps), horizon_(horizon) {
  if (n_steps < 2) throw std::invalid_argument("Grid: n_steps must be at least 2");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("Grid: horizon must be positive and finite");
  }
}

SampledPath::SampledPath(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw std::invalid_argument("SampledPath: values must have n_steps + 1 entries");
  }
  if (!std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); })) {
    throw std::invalid_argument("SampledPath: values must be finite");
  }
}

SampledPath simulate_wiener(const Grid& grid, const RngStream& rng) {
  const std::size_t n = grid.n_steps();
  const double step = grid.step();
  std::vector<double> z(n);
  rng.fill_gaussian(z);
  std::vector<double> w(n + 1, 0.0);

  if (std::has_single_bit(n)) {
    w[n] = std::sqrt(grid.horizon()) * z[0];
    std::size_t node = 1;
    for (std::size_t span = n; span >= 2; span /= 2) {
      const std::size_t half = span / 2;
      const double sd = std::sqrt(static_cast<double>(span) * step / 4.0);
      for (std::size_t left = 0; left < n; left += span, ++node) {
        w[left + half] = 0.5 * (w[left] + w[left + span]) + sd * z[node];
      }
    }
  } else {
    const double sd = std::sqrt(step);
    for (std::size_t i = 0; i < n; ++i) w[i + 1] = w[i] + sd * z[i];
  }
  return SampledPath(grid, std::move(w));
}

SampledPath simulate_drifted_wiener(const Grid& grid, double rho, const RngStream& rng) {
  if (!std::isfinite(rho)) throw std::invalid_argument("simulate_drifted_wiener: rho must be finite");
  SampledPath path = simulate_wiener(grid, rng);
  for (std::size_t i = 0; i < path.values.size(); ++i) path.values[i] += rho * grid.time(i);
  return path;
}

SampledPath simulate_brownian_bridge(const Grid& grid, const RngStream& rng) {
  if (grid.horizon() != 1.0) {
    throw std::invalid_argument("simulate_brownian_bridge: horizon must be 1");
  }
  SampledPath path = simulate_wiener(grid, rng);
  const double end = path.values.back();
  for (std::size_t i = 0; i < path.values.size(); ++i) path.values[i] -= grid.time(i) * end;
  path.values.back() = 0.0;
  return path;
}

double cvm_functional(std::span<const double> values, double step, double horizon) {
  if (values.size() < 2) return 0.0;
  double acc = 0.5 * (values.front() * values.front() + values.back() * values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) acc += values[i] * values[i];
  return acc * step / horizon;
}

double cvm_functional(const SampledPath& path) {
  return cvm_functional(path.values, path.grid.step(), path.grid.horizon());
}

double ks_functional(std::span<const double> values) {
  double m = 0.0;
  for (const double v : values) m = std::max(m, std::abs(v));
  return m;
}

double ks_functional(const SampledPath& path) { return ks_functional(path.values); }

double ks_functional_continuous(std::span<const double> values, double step) {
  return ks_functional(values) + kDiscreteMonitoringShift * std::sqrt(step);
}

double kl_series_sample(std::size_t n_terms, const RngStream& rng) {
  if (n_terms == 0) throw std::invalid_argument("kl_series_sample: n_terms must be positive");
  if (rng.is_zero_noise()) return 0.0;
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  double acc = 0.0;
  std::size_t k = 0;
  for (std::uint64_t block = 0; k < n_terms; ++block) {
    const auto z = rng.gaussian_block(block);
    for (int j = 0; j < 4 && k < n_terms; ++j, ++k) {
      const double half_k = static_cast<double>(k) + 0.5;
      acc += z[j] * z[j] / (half_k * half_k * pi2);
    }
  }
  return acc;
}

double sup_abs_wiener_cdf(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("sup_abs_wiener_cdf: x must be positive");
  constexpr double pi = std::numbers::pi;
  const double scale = pi * pi / (8.0 * x * x);
  double sum = 0.0;
  for (int k = 0;; ++k) {
    const double odd = 2.0 * k + 1.0;
    const double term = (4.0 / pi) / odd * std::exp(-odd * odd * scale);
    sum += (k % 2 == 0) ? term : -term;
    if (term < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double sup_abs_wiener_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("sup_abs_wiener_quantile: p must lie in (0, 1)");
  auto f = [p](double x) { return sup_abs_wiener_cdf(x) - p; };
  double lo = 0.05, hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  std::uintmax_t max_iter = 200;
  const auto root = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(50), max_iter);
  return 0.5 * (root.first + root.second);
}

}  // namespace ctgof
