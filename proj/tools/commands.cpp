#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ctgof/csv_io.hpp"
#include "ctgof/model_vocabulary.hpp"
#include "ctgof/monte_carlo.hpp"
#include "ctgof/statistics.hpp"

namespace ctgof::cli {

namespace {

void apply_threads(const CommonOptions& c) {
  if (c.threads < 0) throw ConfigError("--threads must be nonnegative");
  if (c.threads > 0) set_thread_count(c.threads);
}

void check_alpha_list(const std::vector<double>& alphas) {
  if (alphas.empty()) throw ConfigError("--alphas is empty");
  for (const double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("alpha values must lie in (0, 1)");
  }
}

void check_replicates(std::size_t m) {
  if (m < 1000) throw ConfigError("--M must be at least 1000");
}

std::filesystem::path prepare_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

// Writes and returns the content so callers can fingerprint it.
std::string write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
  std::cout << "wrote " << path.string() << '\n';
  return content;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

template <class T>
std::string join(const std::vector<T>& values, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += sep;
    if constexpr (std::is_floating_point_v<T>) {
      s += format_double(values[i]);
    } else {
      s += std::to_string(values[i]);
    }
  }
  return s;
}

ScalarModel model_or_config_error(const std::string& spec, const char* option) {
  try {
    return parse_model(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(option) + ": " + e.what());
  }
}

StatKind kind_or_config_error(const std::string& name) {
  try {
    return stat_kind_from_string(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ErgodicNullModel build_null_model(const DiffusionOptions& d, double horizon, double dt) {
  ErgodicSpec spec;
  spec.drift = model_or_config_error(d.drift, "--drift");
  if (!d.diffusion.empty()) spec.diffusion = model_or_config_error(d.diffusion, "--diffusion");
  spec.x0 = d.x0.value_or(0.0);
  spec.horizon = horizon;
  spec.dt = dt;
  try {
    (void)spec.n_steps();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (d.x_min.has_value() != d.x_max.has_value()) throw ConfigError("--x-min and --x-max must be given together");
  if (d.grid_points < 3) throw ConfigError("--grid-points must be at least 3");
  std::optional<std::pair<double, double>> range;
  if (d.x_min) range = std::make_pair(*d.x_min, *d.x_max);
  const std::string description = "drift=" + d.drift + ";diffusion=" + (d.diffusion.empty() ? "1" : d.diffusion) +
                                  ";x0=" + format_double(spec.x0) + ";T=" + format_double(horizon) +
                                  ";dt=" + format_double(dt) + ";grid=" +
                                  (range ? format_double(range->first) + ":" + format_double(range->second) : "pilot") +
                                  ":" + std::to_string(d.grid_points);
  try {
    return make_ergodic_null(std::move(spec), description, range, d.grid_points);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::string model_resolution(const ErgodicNullModel& m) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(fnv1a(m.description)));
  return std::string("model=") + buf;
}

bool is_ergodic_table_kind(StatKind k) {
  return k == StatKind::CVM_ERGODIC_EDF || k == StatKind::KS_ERGODIC_EDF || k == StatKind::CVM_ERGODIC_DENSITY ||
         k == StatKind::KS_ERGODIC_DENSITY;
}

std::string power_wide_csv(const std::vector<PowerCurve>& curves, const MetaFields& meta, bool analytic_laump) {
  std::ostringstream out;
  out << meta_line(meta) << '\n';
  out << "rho,beta_cvm,se_cvm,beta_ks,se_ks,beta_laump,se_laump";
  if (analytic_laump) out << ",laump_analytic";
  out << '\n';
  const double alpha = curves.at(0).alpha;
  const double z = upper_normal_quantile(alpha);
  for (std::size_t r = 0; r < curves[0].points.size(); ++r) {
    const double rho = curves[0].points[r].rho;
    out << format_double(rho);
    for (const auto& c : curves) {
      out << ',' << format_double(c.points[r].beta) << ',' << format_double(c.points[r].standard_error);
    }
    if (analytic_laump) out << ',' << format_double(0.5 * std::erfc(-(rho - z) / std::sqrt(2.0)));
    out << '\n';
  }
  return out.str();
}

std::string calibration_csv(const CalibrationTable& table, const MetaFields& meta) {
  std::ostringstream out;
  write_calibration_csv(out, table, meta);
  return out.str();
}

}  // namespace

std::vector<double> arithmetic_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start)) throw ConfigError("grid needs step > 0 and stop >= start");
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 0.5 + 1e-9));
  if (n > 100000) throw ConfigError("grid has too many points");
  std::vector<double> out;
  for (std::size_t i = 0; i <= n; ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", start + static_cast<double>(i) * step);
    out.push_back(std::strtod(buf, nullptr));
  }
  return out;
}

std::vector<std::string> config_arguments(const std::filesystem::path& file, const std::vector<std::string>& given) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file '" + file.string() + "'");
  auto on_command_line = [&](const std::string& key) {
    const std::string flag = "--" + key;
    for (const auto& a : given) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  std::vector<std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string body = line.substr(first, last - first + 1);
    const auto eq = body.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("config line " + std::to_string(line_no) + " is not key=value");
    }
    std::string key = body.substr(0, eq);
    key.erase(key.find_last_not_of(" \t") + 1);
    std::string value = body.substr(eq + 1);
    value.erase(0, value.find_first_not_of(" \t"));
    if (key == "config") throw ConfigError("config files cannot include other config files");
    if (!on_command_line(key)) out.push_back("--" + key + "=" + value);
  }
  return out;
}

int cmd_calibrate(const CalibrateOptions& opt) {
  apply_threads(opt.common);
  check_alpha_list(opt.common.alphas);
  check_replicates(opt.common.replicates);
  const auto dir = prepare_out_dir(opt.common.out_dir);
  const auto seed = opt.common.seed;
  const auto m = opt.common.replicates;

  if (!opt.model_null.empty()) {
    const StatKind kind = kind_or_config_error(opt.model_null);
    if (!is_ergodic_table_kind(kind)) {
      throw ConfigError("--model-null applies to the ergodic EDF and density statistics, not " + opt.model_null);
    }
    const ErgodicNullModel model = build_null_model(opt.model, opt.model.horizon, opt.model.dt);
    const CalibrationTable table = calibrate_model_null(kind, model, opt.common.alphas, m, seed);
    write_file(dir / "calibration_model.csv",
               calibration_csv(table, {{"master_seed", std::to_string(seed)},
                                       {"M", std::to_string(m)},
                                       {"stat", opt.model_null},
                                       {"model", model_resolution(model).substr(6)}}));
    return kSuccess;
  }
  if (opt.finite_poisson) {
    for (const auto n : opt.period_counts) {
      if (n == 0) throw ConfigError("--T period counts must be positive");
    }
    const CalibrationTable table = calibrate_finite_poisson(opt.common.alphas, opt.period_counts, m, seed);
    write_file(dir / "calibration_poisson.csv",
               calibration_csv(table, {{"master_seed", std::to_string(seed)},
                                       {"M", std::to_string(m)},
                                       {"tau", "1"},
                                       {"S*", "1"},
                                       {"T", join(opt.period_counts, ";")}}));
    return kSuccess;
  }
  if (opt.n_steps < 2) throw ConfigError("--n-steps must be at least 2");
  const CalibrationTable table = calibrate_limit(opt.common.alphas, m, Grid(opt.n_steps, 1.0), seed);
  write_file(dir / "calibration_limit.csv",
             calibration_csv(table, {{"master_seed", std::to_string(seed)},
                                     {"M", std::to_string(m)},
                                     {"n_steps", std::to_string(opt.n_steps)}}));
  return kSuccess;
}

int cmd_test(const TestOptions& opt) {
  apply_threads(opt.common);
  check_alpha_list(opt.common.alphas);
  const StatKind kind = kind_or_config_error(opt.stat);
  CalibrationTable table;
  for (const auto& file : opt.calibration) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open calibration file '" + file.string() + "'");
    table.append(read_calibration_csv(in));
  }
  std::ifstream data(opt.data);
  if (!data) throw ConfigError("cannot open data file '" + opt.data.string() + "'");

  StatResult result{kind, 0.0, {}, opt.data.filename().string()};
  // threshold for each alpha
  std::function<double(double)> threshold;
  auto limit_or = [&](std::string_view finite_kind, std::string_view horizon, std::string_view limit_kind) {
    return [&table, finite_kind = std::string(finite_kind), horizon = std::string(horizon),
            limit_kind = std::string(limit_kind)](double a) {
      if (!finite_kind.empty()) {
        if (const auto* e = table.find(finite_kind, a, horizon)) return e->threshold;
      }
      return table.require(limit_kind, a, "limit").threshold;
    };
  };

  switch (kind) {
    case StatKind::CVM_POISSON:
    case StatKind::KS_POISSON:
    case StatKind::LAUMP:
    case StatKind::LAN_DELTA: {
      const EventRecord record = read_events_csv(data);
      if (kind == StatKind::LAUMP) {
        if (!(opt.base_rate > 0.0)) throw ConfigError("--base-rate must be positive");
        result = stat_laump(record, opt.base_rate);
        threshold = [](double a) { return upper_normal_quantile(a); };
        break;
      }
      if (!record.layout) throw DataError("event file header needs tau and n for " + opt.stat);
      if (kind == StatKind::LAN_DELTA) {
        if (opt.h.empty()) throw ConfigError("LAN_DELTA needs --h");
        const ScalarModel h = model_or_config_error(opt.h, "--h");
        if (!h.support_end) throw ConfigError("--h must have compact support (box-h, exp-kernel, box-kernel)");
        result = stat_lan_delta(record, h, opt.base_rate, record.layout->period, record.layout->n_periods);
        const double info = fisher_info(h, opt.base_rate);
        threshold = [info](double a) { return upper_normal_quantile(a) * std::sqrt(info); };
        break;
      }
      const ScalarModel rate = model_or_config_error(opt.intensity, "--intensity");
      const StatPair st = stat_poisson(record, cumulative_intensity(rate, record.layout->period));
      const bool cvm = kind == StatKind::CVM_POISSON;
      result = cvm ? st.cvm : st.ks;
      threshold = limit_or(opt.stat, horizon_label(static_cast<double>(record.layout->n_periods)), cvm ? "CVM" : "KS");
      break;
    }
    default: {
      const SampledPath path = read_path_csv(data);
      const ScalarModel drift = model_or_config_error(opt.model.drift, "--drift");
      if (kind == StatKind::CVM_SMALL_NOISE || kind == StatKind::KS_SMALL_NOISE) {
        if (!opt.epsilon || !(*opt.epsilon > 0.0)) throw ConfigError("small-noise statistics need --epsilon > 0");
        const double x0 = opt.model.x0.value_or(path.values.front());
        const SampledPath xstar = solve_limit_ode(drift, x0, path.grid).path;
        if (kind == StatKind::CVM_SMALL_NOISE && !opt.model.diffusion.empty()) {
          result = stat_small_noise_sigma(path, xstar, drift, model_or_config_error(opt.model.diffusion, "--diffusion"),
                                          *opt.epsilon);
        } else {
          const StatPair st = stat_small_noise(path, xstar, drift, *opt.epsilon);
          result = kind == StatKind::CVM_SMALL_NOISE ? st.cvm : st.ks;
        }
        threshold = limit_or("", "", kind == StatKind::CVM_SMALL_NOISE ? "CVM" : "KS");
        break;
      }
      if (kind == StatKind::CVM_ERGODIC_FREE) {
        result = stat_ergodic_free(path, drift);
        threshold = limit_or("", "", "CVM");
        break;
      }
      const ErgodicNullModel model = build_null_model(opt.model, path.horizon(), path.grid.step());
      result = model_statistic(kind, path, model);
      if (kind == StatKind::CVM_ERGODIC_FREE_SIGMA) {
        threshold = limit_or("", "", "CVM");
        break;
      }
      const std::string horizon = horizon_label(path.horizon());
      const std::string resolution = model_resolution(model);
      threshold = [&table, horizon, resolution, name = opt.stat](double a) {
        const auto* e = table.find(name, a, horizon);
        if (!e || e->resolution != resolution) {
          throw MissingCalibration(name + " is not distribution-free and has no model-null calibration for alpha=" +
                                   format_double(a) + ", " + horizon + " and this null model; produce one with `ctgof calibrate --model-null " +
                                   name + "` and the same model options (calibrate_model_null)");
        }
        return e->threshold;
      };
      break;
    }
  }
  result.label = opt.data.filename().string();

  std::ostringstream out;
  out << "kind,value,scale_note,label,alpha,threshold,decision\n";
  for (const double a : opt.common.alphas) {
    const double c = threshold(a);
    out << to_string(result.kind) << ',' << format_double(result.value) << ',' << csv_field(result.scale_note) << ','
        << csv_field(result.label) << ',' << format_double(a) << ',' << format_double(c) << ','
        << (result.value > c ? "reject" : "accept") << '\n';
  }
  std::cout << out.str();
  return kSuccess;
}

int cmd_power(const PowerOptions& opt) {
  apply_threads(opt.common);
  check_replicates(opt.common.replicates);
  if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw ConfigError("--alpha must lie in (0, 1)");
  if (opt.n_steps < 2) throw ConfigError("--n-steps must be at least 2");
  const auto dir = prepare_out_dir(opt.common.out_dir);
  const auto seed = opt.common.seed;
  const auto m = opt.common.replicates;
  const Grid grid(opt.n_steps, 1.0);
  const auto rhos = arithmetic_grid(opt.rho_min, opt.rho_max, opt.rho_step);

  CalibrationTable table;
  std::string source;
  if (!opt.calibration.empty()) {
    std::ifstream in(opt.calibration);
    if (!in) throw ConfigError("cannot open calibration file '" + opt.calibration.string() + "'");
    table = read_calibration_csv(in);
    source = opt.calibration.filename().string();
  } else {
    const std::size_t mc = opt.calibration_replicates.value_or(m);
    check_replicates(mc);
    table = calibrate_limit({opt.alpha}, mc, grid, seed);
    source = "internal:M=" + std::to_string(mc);
  }
  const auto curves = limit_power_curves(rhos, opt.alpha, m, grid, seed, table);
  write_file(dir / "power.csv", power_wide_csv(curves, {{"master_seed", std::to_string(seed)},
                                                        {"M", std::to_string(m)},
                                                        {"n_steps", std::to_string(opt.n_steps)},
                                                        {"alpha", format_double(opt.alpha)},
                                                        {"calibration", source}},
                                               opt.analytic_laump));

  if (opt.finite_hawkes) {
    if (opt.finite_replicates == 0) throw ConfigError("--finite-M must be positive");
    const ScalarModel h = model_or_config_error(opt.h, "--h");
    if (!h.support_end) throw ConfigError("--h must have compact support");
    const HawkesAlternativeModel model{h, opt.base_rate, opt.n_periods, opt.period};
    const double rho = rho_h({h, HawkesContext{opt.base_rate}});
    std::ostringstream out;
    out << meta_line({{"master_seed", std::to_string(seed)},
                      {"M", std::to_string(opt.finite_replicates)},
                      {"h", h.label},
                      {"S*", format_double(opt.base_rate)},
                      {"n", std::to_string(opt.n_periods)},
                      {"tau", format_double(opt.period)}})
        << '\n';
    out << "kind,alpha,provenance,rho,beta,standard_error\n";
    for (const char* kind : {"CVM", "KS", "LAUMP"}) {
      const PowerPoint p = finite_sample_power(model, kind, rho, opt.alpha, opt.finite_replicates, seed, table);
      out << kind << ',' << format_double(opt.alpha) << ",finite-sample," << format_double(p.rho) << ','
          << format_double(p.beta) << ',' << format_double(p.standard_error) << '\n';
    }
    write_file(dir / "power_finite.csv", out.str());
  }
  return kSuccess;
}

int cmd_figures(const FiguresOptions& opt) {
  apply_threads(opt.common);
  check_replicates(opt.common.replicates);
  if (opt.n_steps < 2) throw ConfigError("--n-steps must be at least 2");
  const auto dir = prepare_out_dir(opt.common.out_dir);
  const auto seed = opt.common.seed;
  const auto m = opt.common.replicates;
  const Grid grid(opt.n_steps, 1.0);
  auto alphas = arithmetic_grid(opt.alpha_min, opt.alpha_max, opt.alpha_step);
  check_alpha_list(alphas);
  if (!(opt.power_alpha > 0.0 && opt.power_alpha < 1.0)) throw ConfigError("--power-alpha must lie in (0, 1)");
  bool has_power_alpha = false;
  for (const double a : alphas) has_power_alpha = has_power_alpha || std::abs(a - opt.power_alpha) < 1e-12;
  if (!has_power_alpha) alphas.push_back(opt.power_alpha);
  const auto rhos = arithmetic_grid(0.0, opt.rho_max, opt.rho_step);

  using clock = std::chrono::steady_clock;
  std::ostringstream runtime;
  const auto t0 = clock::now();
  CalibrationTable thresholds = calibrate_limit(alphas, m, grid, seed);
  const auto t1 = clock::now();
  thresholds.append(calibrate_finite_poisson(alphas, opt.period_counts, m, seed));
  const auto t2 = clock::now();
  const auto curves = limit_power_curves(rhos, opt.power_alpha, m, grid, seed, thresholds);
  const auto t3 = clock::now();

  const MetaFields base{{"master_seed", std::to_string(seed)}, {"M", std::to_string(m)},
                        {"n_steps", std::to_string(opt.n_steps)}};
  MetaFields fig1_meta = base;
  fig1_meta.emplace_back("T", join(opt.period_counts, ";"));
  MetaFields fig2_meta = base;
  fig2_meta.emplace_back("alpha", format_double(opt.power_alpha));

  const std::string fig1 = write_file(dir / "fig1_thresholds.csv", calibration_csv(thresholds, fig1_meta));
  const std::string fig2 = write_file(dir / "fig2_power.csv", power_wide_csv(curves, fig2_meta, true));

  std::ostringstream manifest;
  manifest << "key,value\n"
           << "command,figures\n"
           << "master_seed," << seed << '\n'
           << "seed_calibrate_limit," << derive_seed(seed, "calibrate_limit") << '\n'
           << "seed_limit_power," << derive_seed(seed, "limit_power") << '\n'
           << "M," << m << '\n'
           << "n_steps," << opt.n_steps << '\n'
           << "alphas," << join(alphas, ";") << '\n'
           << "finite_poisson_T," << join(opt.period_counts, ";") << '\n'
           << "finite_poisson_S*,1\n"
           << "finite_poisson_tau,1\n"
           << "power_alpha," << format_double(opt.power_alpha) << '\n'
           << "rho_grid," << join(rhos, ";") << '\n'
           << "fig1_thresholds.csv,fnv1a:" << hex64(fnv1a(fig1)) << '\n'
           << "fig2_power.csv,fnv1a:" << hex64(fnv1a(fig2)) << '\n'
           << "runtime,see runtime.log\n";
  write_file(dir / "manifest.csv", manifest.str());

  auto secs = [](auto a, auto b) { return std::chrono::duration<double>(b - a).count(); };
  runtime << "threads " << thread_count() << '\n'
          << "calibrate_limit_seconds " << secs(t0, t1) << '\n'
          << "calibrate_finite_poisson_seconds " << secs(t1, t2) << '\n'
          << "limit_power_seconds " << secs(t2, t3) << '\n'
          << "total_seconds " << secs(t0, t3) << '\n';
  write_file(dir / "runtime.log", runtime.str());
  return kSuccess;
}

}  // namespace ctgof::cli
