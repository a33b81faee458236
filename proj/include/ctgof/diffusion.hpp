#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctgof/gauss_paths.hpp"
#include "ctgof/rng.hpp"
#include "ctgof/scalar_model.hpp"

namespace ctgof {

// Raised when a trajectory leaves the overflow guard |x| <= kDivergenceBound.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDivergenceBound = 1e8;

// Solution of dx/dt = S(x) on a grid by classical RK4, together with the
// running time change u(t) = integral_0^t S(x_v)^-2 dv integrated as an extra
// RK4 component. u is +inf from the first point where S vanishes.
struct LimitOdeSolution {
  SampledPath path;
  std::vector<double> time_change;
};

LimitOdeSolution solve_limit_ode(const ScalarModel& drift, double x0, const Grid& grid);

// dX = [S*(X) + eps h(X) / S*(X)] dt + eps sigma(X) dW on [0, horizon].
// Without an alternative h this is the null model; sigma defaults to 1.
struct SmallNoiseSpec {
  ScalarModel drift;
  std::optional<ScalarModel> alternative;
  std::optional<ScalarModel> diffusion;
  double epsilon = 0.0;
  double x0 = 0.0;
  double horizon = 1.0;
};

// Euler-Maruyama on the given grid; grid.horizon() must equal spec.horizon.
// With an alternative, S* must stay strictly positive along the path
// (std::domain_error otherwise).
SampledPath simulate_small_noise(const SmallNoiseSpec& spec, const Grid& grid, const RngStream& rng);

// dX = S(X) dt + sigma(X) dW, sigma defaults to 1. Ergodicity is the
// caller's assertion; nothing here checks it.
struct ErgodicSpec {
  ScalarModel drift;
  std::optional<ScalarModel> diffusion;
  double x0 = 0.0;
  double horizon = 1.0;
  double dt = 1e-2;

  // Number of Euler steps; throws if horizon is not a multiple of dt.
  std::size_t n_steps() const;
};

SampledPath simulate_ergodic(const ErgodicSpec& spec, const RngStream& rng);

// Invariant density f(x) = exp{2 int_0^x S/sigma^2} / (G sigma(x)^2) and its
// distribution function tabulated on a strictly increasing grid.
struct DensityTable {
  std::vector<double> x_grid;
  std::vector<double> density;
  std::vector<double> cdf;
  double log_normalizer = 0.0;  // log G(S)

  double density_at(double x) const;
  double cdf_at(double x) const;
};

// Throws std::domain_error when the unnormalized density at either grid edge
// exceeds edge_tolerance times its maximum (tails not captured by the grid).
DensityTable invariant_density(const ScalarModel& drift, const ScalarModel& diffusion,
                               std::vector<double> x_grid, double edge_tolerance = 1e-12);

// Trapezoid integral of g against the tabulated density.
double expect_under_invariant(const ScalarModel& g, const DensityTable& table);

// n_points equally spaced points on [m - half_width_sd * s, m + half_width_sd * s]
// with m, s the time-average mean and standard deviation of a pilot path.
std::vector<double> default_density_grid(const SampledPath& pilot, std::size_t n_points = 4001,
                                         double half_width_sd = 8.0);

std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace ctgof
