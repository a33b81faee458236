#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ctgof/rng.hpp"

namespace ctgof {

// Uniform grid t_i = i * horizon / n_steps, i = 0..n_steps.
class Grid {
 public:
  Grid(std::size_t n_steps, double horizon = 1.0);

  std::size_t n_steps() const noexcept { return n_steps_; }
  std::size_t size() const noexcept { return n_steps_ + 1; }
  double horizon() const noexcept { return horizon_; }
  double step() const noexcept { return horizon_ / static_cast<double>(n_steps_); }
  double time(std::size_t i) const noexcept {
    return horizon_ * static_cast<double>(i) / static_cast<double>(n_steps_);
  }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t n_steps_;
  double horizon_;
};

// A trajectory sampled on a grid; values.size() == grid.size().
struct SampledPath {
  Grid grid;
  std::vector<double> values;

  SampledPath(Grid g, std::vector<double> v);
  explicit SampledPath(Grid g) : grid(g), values(g.size(), 0.0) {}

  double horizon() const noexcept { return grid.horizon(); }
};

// Standard Wiener process started at 0. For power-of-two n_steps the path is
// built by dyadic midpoint refinement with Gaussian #m attached to dyadic
// node m, so paths at 2^k and 2^(k+1) steps agree exactly on shared grid
// points. Other grids use sequential increments sqrt(step) * gaussian(i).
SampledPath simulate_wiener(const Grid& grid, const RngStream& rng);

// rho * t + W(t), with W exactly the simulate_wiener path of the same stream.
SampledPath simulate_drifted_wiener(const Grid& grid, double rho, const RngStream& rng);

// W(s) - s W(1) on [0, 1]; throws std::invalid_argument for horizon != 1.
SampledPath simulate_brownian_bridge(const Grid& grid, const RngStream& rng);

// (1 / horizon) * integral of Y(t)^2 dt, trapezoid rule.
double cvm_functional(const SampledPath& path);
double cvm_functional(std::span<const double> values, double step, double horizon);

// max_i |Y(t_i)|.
double ks_functional(const SampledPath& path);
double ks_functional(std::span<const double> values);

// -zeta(1/2) / sqrt(2 pi): the mean overshoot of a continuously monitored
// Brownian maximum over its value sampled with unit step.
inline constexpr double kDiscreteMonitoringShift = 0.5825971579390106;

// Grid estimate of sup_{0<=s<=horizon} |Y(s)| for Brownian-type Y: the grid
// max shifted by kDiscreteMonitoringShift * sqrt(step). Used for limit
// (continuous-time) KS samples.
double ks_functional_continuous(std::span<const double> values, double step);

// sum_{k=1}^{n_terms} zeta_k^2 / ((k - 1/2) pi)^2: Karhunen-Loeve series for
// the integral of W(s)^2 over [0, 1].
double kl_series_sample(std::size_t n_terms, const RngStream& rng);

// P(sup_{0<=s<=1} |W(s)| <= x); throws std::invalid_argument for x <= 0.
double sup_abs_wiener_cdf(double x);

// x with sup_abs_wiener_cdf(x) = p, for p in (0, 1).
double sup_abs_wiener_quantile(double p);

}  // namespace ctgof
