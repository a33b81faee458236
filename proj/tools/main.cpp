#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "ctgof/csv_io.hpp"
#include "ctgof/diffusion.hpp"
#include "ctgof/model_vocabulary.hpp"
#include "ctgof/monte_carlo.hpp"

namespace {

using namespace ctgof::cli;

void add_common(CLI::App* sub, CommonOptions& c, bool simulation) {
  sub->add_option("--config", "file of key=value lines; command-line options win");
  sub->add_option("--alphas", c.alphas, "significance levels")->delimiter(',');
  sub->add_option("--threads", c.threads, "OpenMP threads (0 keeps the default)");
  if (!simulation) return;
  sub->add_option("--seed", c.seed, "master seed");
  sub->add_option("--M", c.replicates, "Monte Carlo replicates");
  sub->add_option("--out", c.out_dir, "output directory");
}

void add_diffusion(CLI::App* sub, DiffusionOptions& d, bool with_horizon) {
  sub->add_option("--drift", d.drift, "null drift S*");
  sub->add_option("--diffusion", d.diffusion, "diffusion coefficient sigma (default 1)");
  sub->add_option_function<double>("--x0", [&d](const double& v) { d.x0 = v; }, "initial value");
  if (with_horizon) {
    sub->add_option("--horizon", d.horizon, "observation horizon T of the null model");
    sub->add_option("--dt", d.dt, "Euler step");
  }
  sub->add_option_function<double>("--x-min", [&d](const double& v) { d.x_min = v; }, "density grid lower end");
  sub->add_option_function<double>("--x-max", [&d](const double& v) { d.x_max = v; }, "density grid upper end");
  sub->add_option("--grid-points", d.grid_points, "density grid size");
}

// Rewrites argv so config-file entries sit right after the subcommand name,
// before the user's own arguments.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string config;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
  }
  if (config.empty() || args.size() < 2) return args;
  const std::vector<std::string> given(args.begin() + 2, args.end());
  const auto extra = config_arguments(config, given);
  args.insert(args.begin() + 2, extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goodness-of-fit tests for continuous-time processes"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  app.footer("Model specs (for --drift, --diffusion, --intensity, --h):\n" + ctgof::model_vocabulary_help());

  CalibrateOptions cal;
  auto* calibrate = app.add_subcommand("calibrate", "tabulate H0 thresholds");
  add_common(calibrate, cal.common, true);
  calibrate->add_option("--n-steps", cal.n_steps, "grid steps for the limit Wiener functionals");
  calibrate->add_flag("--finite-poisson", cal.finite_poisson, "finite-n Poisson thresholds instead of the limit");
  calibrate->add_option("--T,--periods", cal.period_counts, "period counts n (tau = 1) for --finite-poisson")->delimiter(',');
  calibrate->add_option("--model-null", cal.model_null, "ergodic EDF/density statistic to calibrate by simulation");
  add_diffusion(calibrate, cal.model, true);

  TestOptions tst;
  auto* test = app.add_subcommand("test", "compute a statistic and its decision");
  add_common(test, tst.common, false);
  test->add_option("--data", tst.data, "event CSV or path CSV")->required();
  test->add_option("--stat", tst.stat, "statistic kind")->required();
  test->add_option("--calibration", tst.calibration, "calibration CSV files")->delimiter(',');
  test->add_option("--intensity", tst.intensity, "null intensity S* for the Poisson tests");
  test->add_option("--base-rate", tst.base_rate, "null Poisson rate for LAUMP and LAN_DELTA");
  test->add_option("--h", tst.h, "alternative direction h for LAN_DELTA");
  test->add_option_function<double>("--epsilon", [&tst](const double& v) { tst.epsilon = v; }, "noise level");
  add_diffusion(test, tst.model, false);

  PowerOptions pw;
  auto* power = app.add_subcommand("power", "power curves against local alternatives");
  add_common(power, pw.common, true);
  power->add_option("--alpha", pw.alpha, "significance level");
  power->add_option("--rho-min", pw.rho_min, "smallest shift rho");
  power->add_option("--rho-max", pw.rho_max, "largest shift rho");
  power->add_option("--rho-step", pw.rho_step, "rho increment");
  power->add_option("--n-steps", pw.n_steps, "grid steps for the limit Wiener functionals");
  power->add_option("--calibration", pw.calibration, "limit calibration CSV (default: calibrate internally)");
  power->add_option_function<std::size_t>(
      "--calibration-M", [&pw](const std::size_t& v) { pw.calibration_replicates = v; }, "replicates for internal calibration");
  power->add_flag("--analytic-laump", pw.analytic_laump, "add the closed-form LAUMP power column");
  power->add_flag("--finite-hawkes", pw.finite_hawkes, "also simulate the self-exciting alternative");
  power->add_option("--h", pw.h, "alternative kernel h");
  power->add_option("--base-rate", pw.base_rate, "null Poisson rate S*");
  power->add_option("--n", pw.n_periods, "number of periods");
  power->add_option("--tau", pw.period, "period length");
  power->add_option("--finite-M", pw.finite_replicates, "replicates for the finite-sample power");

  FiguresOptions fig;
  auto* figures = app.add_subcommand("figures", "regenerate the threshold and power figure data");
  add_common(figures, fig.common, true);
  figures->add_option("--n-steps", fig.n_steps, "grid steps for the limit Wiener functionals");
  figures->add_option("--T,--periods", fig.period_counts, "finite-Poisson period counts")->delimiter(',');
  figures->add_option("--alpha-min", fig.alpha_min, "smallest alpha of the threshold curve");
  figures->add_option("--alpha-max", fig.alpha_max, "largest alpha of the threshold curve");
  figures->add_option("--alpha-step", fig.alpha_step, "alpha increment");
  figures->add_option("--power-alpha", fig.power_alpha, "significance level of the power figure");
  figures->add_option("--rho-max", fig.rho_max, "largest shift rho");
  figures->add_option("--rho-step", fig.rho_step, "rho increment");

  try {
    const auto args = expand_config(argc, argv);
    std::vector<const char*> cargs;
    for (const auto& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());

    if (calibrate->parsed()) return cmd_calibrate(cal);
    if (test->parsed()) return cmd_test(tst);
    if (power->parsed()) return cmd_power(pw);
    return cmd_figures(fig);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigOrDataError;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigOrDataError;
  } catch (const ctgof::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kConfigOrDataError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigOrDataError;
  } catch (const ctgof::MissingCalibration& e) {
    std::cerr << "missing calibration: " << e.what() << '\n';
    return kMissingCalibration;
  } catch (const ctgof::DivergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericFailure;
  }
}
