#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ctgof/diffusion.hpp"
#include "ctgof/gauss_paths.hpp"
#include "ctgof/point_process.hpp"
#include "ctgof/statistics.hpp"

namespace ctgof {

// No threshold for the requested (kind, alpha, horizon).
class MissingCalibration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A calibration run could not produce a trustworthy table.
class CalibrationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CalibrationEntry {
  std::string kind;     // "CVM", "KS", "CVM_POISSON", or a StatKind name for model-null tables
  double alpha = 0.0;
  std::string horizon;  // "limit" or "T=<value>"
  double threshold = 0.0;
  double standard_error = 0.0;
  std::size_t n_replicates = 0;
  std::string resolution;  // "n_steps=<n>", "n=<periods>" or "model=<hash>"
};

struct CalibrationTable {
  std::uint64_t master_seed = 0;
  std::vector<CalibrationEntry> entries;

  const CalibrationEntry* find(std::string_view kind, double alpha, std::string_view horizon) const;
  // Throws MissingCalibration.
  const CalibrationEntry& require(std::string_view kind, double alpha, std::string_view horizon) const;
  void append(const CalibrationTable& other);
};

// "T=<shortest round-trip decimal>".
std::string horizon_label(double horizon);

std::uint64_t fnv1a(std::string_view text) noexcept;

struct QuantileEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

// Order statistic at ceil((1 - alpha) M) of ascending samples. SE from the
// spacing of the order statistics at p -/+ M^-1/2:
// (x_{p+d} - x_{p-d}) sqrt(p (1 - p)) / 2.
QuantileEstimate empirical_quantile(std::span<const double> sorted, double alpha);

struct RejectionEstimate {
  double rate = 0.0;
  double standard_error = 0.0;
};

// Fraction of samples strictly above threshold, binomial SE.
RejectionEstimate rejection_frequency(std::span<const double> samples, double threshold);

void set_thread_count(int n_threads);
int thread_count();

// Runs body(i) for i in [0, M) over the OpenMP team with static scheduling.
// The first exception (lowest replicate index) is rethrown after the loop.
void parallel_replicates(std::size_t n_replicates, const std::function<void(std::size_t)>& body);

struct LimitSamples {
  std::vector<double> cvm;  // int_0^1 W^2
  std::vector<double> ks;   // sup |W| with the discrete-monitoring shift
};

// One Wiener path per replicate on stream (derive_seed(master_seed, purpose), i).
LimitSamples limit_samples(std::size_t n_replicates, const Grid& grid, std::uint64_t master_seed,
                           std::string_view purpose = "calibrate_limit");

// Karhunen-Loeve draws of int_0^1 W^2, stream (derive_seed(master_seed, "kl_series"), i).
std::vector<double> kl_samples(std::size_t n_replicates, std::size_t n_terms, std::uint64_t master_seed);

// Sorts the samples in place and adds one entry per alpha.
void add_quantiles(CalibrationTable& table, std::string_view kind, std::string_view horizon,
                   std::string_view resolution, std::vector<double>& samples, const std::vector<double>& alphas);

// CVM and KS limit thresholds; throws std::invalid_argument for M < 1000.
CalibrationTable calibrate_limit(const std::vector<double>& alphas, std::size_t n_replicates, const Grid& grid,
                                 std::uint64_t master_seed);

// W_n and sqrt(n) D_n under Poisson(1), tau = 1, for each period count n.
CalibrationTable calibrate_finite_poisson(const std::vector<double>& alphas, const std::vector<std::size_t>& period_counts,
                                          std::size_t n_replicates, std::uint64_t master_seed);

// Ergodic null model with the tabulated invariant law used by the EDF and
// density statistics.
struct ErgodicNullModel {
  ErgodicSpec spec;
  DensityTable table;
  std::string description;
};

// Density grid is [lo, hi] with n_points if a range is given, otherwise the
// default pilot-path grid; the pilot uses a fixed stream and a horizon of at
// least 1000 so calibration and testing agree on the grid.
ErgodicNullModel make_ergodic_null(ErgodicSpec spec, std::string description,
                                   std::optional<std::pair<double, double>> range = std::nullopt,
                                   std::size_t n_points = 4001);

// EDF, density and distribution-free ergodic statistics of a path under the null model.
StatResult model_statistic(StatKind kind, const SampledPath& path, const ErgodicNullModel& model);

// H0 quantiles of an ergodic statistic by direct simulation. Replicates that
// diverge are discarded; more than 0.01% of them fails the calibration.
CalibrationTable calibrate_model_null(StatKind kind, const ErgodicNullModel& model, const std::vector<double>& alphas,
                                      std::size_t n_replicates, std::uint64_t master_seed);

struct PowerPoint {
  double rho = 0.0;
  double beta = 0.0;
  double standard_error = 0.0;
};

struct PowerCurve {
  std::string kind;        // CVM, KS or LAUMP
  double alpha = 0.05;
  std::string provenance;  // limit-simulation, finite-sample or analytic
  std::vector<PowerPoint> points;
};

// P(rho + zeta > z_alpha) = Phi(rho - z_alpha).
double laump_power(double rho, double alpha);
double upper_normal_quantile(double alpha);

// CVM and KS rejection frequencies of rho s + W(s) against the limit thresholds
// (common random numbers across rho), plus the analytic LAUMP curve.
std::vector<PowerCurve> limit_power_curves(const std::vector<double>& rhos, double alpha, std::size_t n_replicates,
                                           const Grid& grid, std::uint64_t master_seed, const CalibrationTable& table);

PowerCurve limit_power(std::string_view kind, const std::vector<double>& rhos, double alpha, std::size_t n_replicates,
                       const Grid& grid, std::uint64_t master_seed, const CalibrationTable& table);

// Rejection frequency of the functional of int_0^s h* + W(s); h* sampled on grid.
PowerPoint limit_power_signal(std::span<const double> hstar, std::string_view kind, double alpha,
                              std::size_t n_replicates, const Grid& grid, std::uint64_t master_seed,
                              const CalibrationTable& table);

// Poisson null S* t tested against a self-exciting alternative with kernel h / sqrt(n tau).
struct HawkesAlternativeModel {
  ScalarModel h;
  double base_rate = 1.0;
  std::size_t n_periods = 1;
  double period = 1.0;
};

// dX = [S*(X) + h(X) / sqrt(T)] dt + sigma dW tested with the distribution-free statistic.
struct ErgodicFreeAlternative {
  ErgodicSpec null_spec;
  ScalarModel h;
  double sigma2_moment = 1.0;  // E sigma(xi)^2; 1 means the sigma = 1 statistic
};

// Small-noise model with spec.alternative set (or unset for the null).
struct SmallNoiseAlternative {
  SmallNoiseSpec spec;
  Grid grid;
};

using FiniteModel = std::variant<HawkesAlternativeModel, ErgodicFreeAlternative, SmallNoiseAlternative>;

// Rejection frequency of the model's statistic against the limit threshold of
// `kind` (CVM or KS; LAUMP for the Hawkes model). rho only labels the point.
PowerPoint finite_sample_power(const FiniteModel& model, std::string_view kind, double rho, double alpha,
                               std::size_t n_replicates, std::uint64_t master_seed, const CalibrationTable& table);

// The raw statistic samples behind finite_sample_power.
std::vector<double> finite_sample_statistics(const FiniteModel& model, std::string_view kind,
                                             std::size_t n_replicates, std::uint64_t master_seed);

}  // namespace ctgof
