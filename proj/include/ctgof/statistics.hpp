#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ctgof/diffusion.hpp"
#include "ctgof/gauss_paths.hpp"
#include "ctgof/point_process.hpp"
#include "ctgof/scalar_model.hpp"

namespace ctgof {

enum class StatKind {
  CVM_SMALL_NOISE,
  KS_SMALL_NOISE,
  CVM_ERGODIC_EDF,
  KS_ERGODIC_EDF,
  CVM_ERGODIC_DENSITY,
  KS_ERGODIC_DENSITY,
  CVM_ERGODIC_FREE,
  CVM_ERGODIC_FREE_SIGMA,
  CVM_POISSON,
  KS_POISSON,
  LAUMP,
  LAN_DELTA,
};

std::string_view to_string(StatKind kind) noexcept;
// Throws std::invalid_argument for unknown names.
StatKind stat_kind_from_string(std::string_view name);
const std::vector<StatKind>& all_stat_kinds();

struct StatResult {
  StatKind kind;
  double value = 0.0;
  std::string scale_note;
  std::string label;
};

struct StatPair {
  StatResult cvm;
  StatResult ks;
};

// Small-noise diffusion. X and xstar must share a grid and S*(x*_t) > 0
// everywhere (std::domain_error otherwise).
//   W = u_T^-2 int ((X - x*) / (eps S*(x*)^2))^2 dt,  u_T = int S*(x*)^-2 dt
//   KS value = eps^-1 u_T^-1/2 sup |(X - x*) / S*(x*)|
StatPair stat_small_noise(const SampledPath& x, const SampledPath& xstar, const ScalarModel& drift, double epsilon);

// General diffusion coefficient:
//   W = U^-2 int ((X - x*) sigma(x*) / (eps S*(x*)^2))^2 dt,  U = int (sigma(x*) / S*(x*))^2 dt.
// Equals stat_small_noise's W for sigma = 1.
StatResult stat_small_noise_sigma(const SampledPath& x, const SampledPath& xstar, const ScalarModel& drift,
                                  const ScalarModel& sigma, double epsilon);

// F_T(x) = (1/T) int 1{X_t < x} dt by left-point step summation.
std::vector<double> empirical_df(const SampledPath& x, std::span<const double> x_grid);

// f_T(x) = (2/T) sum_i 1{X_i < x} (X_{i+1} - X_i), the Ito sum of the local-time estimator.
std::vector<double> local_time_density(const SampledPath& x, std::span<const double> x_grid);

// T int (F_T - F*)^2 dF* and T^1/2 sup |F_T - F*| on the table grid.
StatPair stat_ergodic_edf(const SampledPath& x, const DensityTable& null_table);
StatPair stat_ergodic_edf(std::span<const double> edf, const DensityTable& null_table, double horizon);

// T int (f_T - f*)^2 dF* and T^1/2 sup |f_T - f*|.
StatPair stat_ergodic_density(const SampledPath& x, const DensityTable& null_table);
StatPair stat_ergodic_density(std::span<const double> density, const DensityTable& null_table, double horizon);

// T^-2 int [X_t - X_0 - int_0^t S*(X_v) dv]^2 dt, inner integral by left-point sums.
StatResult stat_ergodic_free(const SampledPath& x, const ScalarModel& drift);

// stat_ergodic_free divided by E sigma(xi)^2; throws for a nonpositive moment.
StatResult stat_ergodic_free_sigma(const SampledPath& x, const ScalarModel& drift, double sigma2_moment);
StatResult stat_ergodic_free_sigma(const SampledPath& x, const ScalarModel& drift, const ScalarModel& sigma,
                                   const DensityTable& null_table);

// Lambda_n(t) = (1/n) sum_j X_j(t) on [0, tau]: right-continuous step function.
struct StepFunction {
  std::vector<double> jumps;  // sorted, with multiplicity
  double jump_size = 0.0;
  double period = 1.0;

  double operator()(double t) const;
  double total() const noexcept { return jump_size * static_cast<double>(jumps.size()); }
};

StepFunction lambda_hat(const EventRecord& record);

// Lambda*(t) = int_0^t rate over one period, tabulated on kLambdaTablePoints cells.
ScalarModel cumulative_intensity(const ScalarModel& rate, double period);

// W_n = Lambda*(tau)^-2 n int (Lambda_n - Lambda*)^2 dLambda*, integrated exactly
// between jumps; KS value = sqrt(n) Lambda*(tau)^-1/2 sup |Lambda_n - Lambda*|.
// cumulative must be continuous, nondecreasing, with cumulative(0) = 0.
StatPair stat_poisson(const EventRecord& record, const ScalarModel& cumulative);

// (N - S* T) / sqrt(S* T).
StatResult stat_laump(const EventRecord& record, double base_rate);

// (1 / (S* sqrt(tau n))) [sum_i H(t_i-) - S* int_0^{tau n} H(t) dt],
// H(t) = sum_{t_j < t} h(t - t_j). h must declare its support.
StatResult stat_lan_delta(const EventRecord& record, const ScalarModel& h, double base_rate, double period,
                          std::size_t n_periods);

// int h^2 + S* (int h)^2 over the declared support of h.
double fisher_info(const ScalarModel& h, double base_rate);

struct HawkesContext {
  double base_rate = 1.0;
};
struct ErgodicContext {
  DensityTable null_table;
  std::optional<ScalarModel> sigma;
};
struct SmallNoiseContext {};
struct PoissonPeriodicContext {};

using AltContext = std::variant<HawkesContext, ErgodicContext, SmallNoiseContext, PoissonPeriodicContext>;

struct AltDescriptor {
  ScalarModel h;
  AltContext context;
};

// sqrt(S*) int h (Hawkes) or E h(xi) / sqrt(E sigma(xi)^2) (ergodic). Other
// contexts have no scalar drift and are rejected.
double rho_h(const AltDescriptor& alt);

struct HStar {
  std::vector<double> values;  // h*(s) on the limit grid
  double u_T = 0.0;
};

// h*(s) = u_T^1/2 h(x*(t(s))) where t(s) solves int_0^t S*(x*_v)^-2 dv = u_T s.
HStar hstar_transform(const ScalarModel& h, const SampledPath& xstar, const ScalarModel& drift,
                      const Grid& limit_grid);

// (int_0^1 g^2)^1/2 by the trapezoid rule on the grid.
double l2_norm(std::span<const double> values, const Grid& grid);

}  // namespace ctgof
