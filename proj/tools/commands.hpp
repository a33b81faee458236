#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctgof::cli {

// Bad configuration (maps to exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int {
  kSuccess = 0,
  kConfigOrDataError = 2,
  kNumericFailure = 3,
  kMissingCalibration = 4,
};

struct CommonOptions {
  std::uint64_t seed = 20240601;
  std::size_t replicates = 100000;
  std::vector<double> alphas{0.01, 0.05, 0.10};
  std::filesystem::path out_dir = ".";
  int threads = 0;  // 0 keeps the OpenMP default
};

// Ergodic or small-noise null model fields shared by calibrate and test.
struct DiffusionOptions {
  std::string drift = "ou:theta=1,mean=0";
  std::string diffusion;  // empty means sigma = 1
  std::optional<double> x0;
  double horizon = 500.0;
  double dt = 0.01;
  std::optional<double> x_min;
  std::optional<double> x_max;
  std::size_t grid_points = 4001;
};

struct CalibrateOptions {
  CommonOptions common;
  std::size_t n_steps = 4096;
  bool finite_poisson = false;
  std::vector<std::size_t> period_counts{10, 100};
  std::string model_null;  // StatKind name; empty means no model-null run
  DiffusionOptions model;
};

struct TestOptions {
  CommonOptions common;
  std::filesystem::path data;
  std::string stat;
  std::vector<std::filesystem::path> calibration;
  std::string intensity = "constant:value=1";
  double base_rate = 1.0;
  std::string h;
  std::optional<double> epsilon;
  DiffusionOptions model;
};

struct PowerOptions {
  CommonOptions common;
  double alpha = 0.05;
  double rho_min = 0.0;
  double rho_max = 4.0;
  double rho_step = 0.25;
  std::size_t n_steps = 4096;
  std::filesystem::path calibration;
  std::optional<std::size_t> calibration_replicates;
  bool analytic_laump = false;
  bool finite_hawkes = false;
  std::string h = "box-h:height=1,width=1";
  double base_rate = 1.0;
  std::size_t n_periods = 100;
  double period = 100.0;
  std::size_t finite_replicates = 10000;
};

struct FiguresOptions {
  CommonOptions common;
  std::size_t n_steps = 4096;
  std::vector<std::size_t> period_counts{10, 100};
  double alpha_min = 0.01;
  double alpha_max = 0.20;
  double alpha_step = 0.01;
  double power_alpha = 0.05;
  double rho_max = 4.0;
  double rho_step = 0.25;
};

int cmd_calibrate(const CalibrateOptions& opt);
int cmd_test(const TestOptions& opt);
int cmd_power(const PowerOptions& opt);
int cmd_figures(const FiguresOptions& opt);

// Reads key=value lines ('#' comments, blank lines allowed) and returns
// "--key=value" arguments for every key not already present in `given`.
std::vector<std::string> config_arguments(const std::filesystem::path& file, const std::vector<std::string>& given);

// start, start + step, ... up to stop (inclusive within half a step), rounded
// to 12 significant digits so the grid prints cleanly.
std::vector<double> arithmetic_grid(double start, double stop, double step);

}  // namespace ctgof::cli
