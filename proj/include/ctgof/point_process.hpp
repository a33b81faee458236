#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "ctgof/rng.hpp"
#include "ctgof/scalar_model.hpp"

namespace ctgof {

// T = n_periods * period.
struct PeriodicLayout {
  double period = 1.0;
  std::size_t n_periods = 1;

  double horizon() const noexcept { return period * static_cast<double>(n_periods); }
};

// Observation window [0, horizon], optionally split into equal periods.
struct ObservationWindow {
  double horizon = 0.0;
  std::optional<PeriodicLayout> layout;

  static ObservationWindow until(double horizon) { return {horizon, std::nullopt}; }
  static ObservationWindow periods(double period, std::size_t n_periods) {
    const PeriodicLayout layout{period, n_periods};
    return {layout.horizon(), layout};
  }
};

// Ordered event times 0 < t_1 < ... < t_N <= horizon.
struct EventRecord {
  std::vector<double> events;
  double horizon = 0.0;
  std::optional<PeriodicLayout> layout;

  // Throws std::invalid_argument if ordering, range or layout invariants fail.
  void validate() const;
  std::size_t count() const noexcept { return events.size(); }
};

EventRecord make_record(std::vector<double> events, const ObservationWindow& window);

struct ConstantIntensity {
  double rate = 1.0;
};

// rate(t) for t in [0, period), extended periodically.
struct PeriodicIntensity {
  ScalarModel rate;
  double period = 1.0;
};

// Lambda(t) = Lambda*(t) + (n Lambda*(tau))^{-1/2} int_0^t h(u(v)) dLambda*(v),
// u(v) = Lambda*(v mod tau) / Lambda*(tau): intensity S*(t) [1 + h(u) / sqrt(n Lambda*(tau))].
struct ContiguousPoissonIntensity {
  ScalarModel base_rate;
  double period = 1.0;
  ScalarModel h;
  std::size_t n_periods = 1;
};

using IntensitySpec = std::variant<ConstantIntensity, PeriodicIntensity, ContiguousPoissonIntensity>;

// Resolution of the per-period cumulative intensity table used for inversion.
inline constexpr std::size_t kLambdaTablePoints = 10000;

// Inhomogeneous Poisson process by inversion: unit-rate exponential arrivals
// mapped through Lambda^{-1}. Negative intensity -> std::domain_error.
EventRecord simulate_poisson(const IntensitySpec& intensity, const ObservationWindow& window,
                             const RngStream& rng);

// Quadrature resolution for kernel integrals on [0, L].
inline constexpr std::size_t kKernelQuadraturePoints = 10000;

// Stationary self-exciting process with intensity S + sum_{t_i < t} g(t - t_i).
class HawkesSpec {
 public:
  // Throws std::invalid_argument unless the kernel declares a support, is
  // nonnegative on it and has branching ratio < 1. If kernel_bound is not
  // given it is taken as 1.01 * the sampled maximum of g.
  HawkesSpec(double base_rate, ScalarModel kernel, std::optional<double> kernel_bound = std::nullopt);

  double base_rate() const noexcept { return base_rate_; }
  const ScalarModel& kernel() const noexcept { return kernel_; }
  double support() const noexcept { return *kernel_.support_end; }
  double branching_ratio() const noexcept { return branching_ratio_; }
  double kernel_bound() const noexcept { return kernel_bound_; }
  double stationary_rate() const noexcept { return base_rate_ / (1.0 - branching_ratio_); }

 private:
  double base_rate_;
  ScalarModel kernel_;
  double branching_ratio_;
  double kernel_bound_;
};

// Ogata thinning with the bound S + sup g * #{events within the last L}.
EventRecord simulate_hawkes(const HawkesSpec& spec, const ObservationWindow& window, const RngStream& rng);

// Alternative S(t) = S* + T^{-1/2} int_0^{t-} h(t - s) dX_s on T = n tau.
EventRecord simulate_hawkes_alternative(const ScalarModel& h, double base_rate, std::size_t n_periods,
                                        double period, const RngStream& rng);

struct HawkesSummaries {
  double branching_ratio = 0.0;
  double stationary_rate = 0.0;
  std::vector<std::complex<double>> transfer;  // G(lambda)
  std::vector<double> spectral_density;         // f(lambda)
};

// rho = int g, mu = S / (1 - rho), G(lambda) = int_0^L e^{i lambda t} g(t) dt,
// f(lambda) = mu / (2 pi |1 - G(lambda)|^2).
HawkesSummaries hawkes_summaries(const HawkesSpec& spec, const std::vector<double>& lambda_grid);

// Per-period counting functions X_j(t), t in [0, tau]. Periods are half-open
// [j tau, (j+1) tau); an event exactly at T belongs to the last period.
struct PeriodFold {
  double period = 1.0;
  std::vector<std::vector<double>> phases;  // sorted offsets within each period

  std::size_t n_periods() const noexcept { return phases.size(); }
  // X_j(t) = #{phases of period j that are <= t}, j zero-based.
  std::size_t count(std::size_t j, double t) const;
  std::size_t total() const noexcept;
};

PeriodFold fold_periods(const EventRecord& record);

}  // namespace ctgof
