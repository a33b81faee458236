#include "ctgof/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>

namespace ctgof {

void EventRecord::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("EventRecord: horizon must be positive and finite");
  }
  if (layout) {
    if (!(layout->period > 0.0) || layout->n_periods == 0) {
      throw std::invalid_argument("EventRecord: period and period count must be positive");
    }
    if (layout->horizon() != horizon) {
      throw std::invalid_argument("EventRecord: horizon must equal n_periods * period");
    }
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    const double t = events[i];
    if (!(t > 0.0 && t <= horizon)) throw std::invalid_argument("EventRecord: event outside (0, T]");
    if (i > 0 && !(t > events[i - 1])) throw std::invalid_argument("EventRecord: events must be strictly increasing");
  }
}

EventRecord make_record(std::vector<double> events, const ObservationWindow& window) {
  EventRecord record{std::move(events), window.horizon, window.layout};
  record.validate();
  return record;
}

namespace {

// Cumulative intensity over one period on a uniform table, plus the way to
// evaluate the intensity itself.
struct PeriodTable {
  double period;
  std::vector<double> cumulative;  // size kLambdaTablePoints + 1
};

PeriodTable build_period_table(const std::function<double(double)>& rate, double period) {
  const std::size_t n = kLambdaTablePoints;
  const double h = period / static_cast<double>(n);
  PeriodTable table{period, std::vector<double>(n + 1, 0.0)};
  double left = rate(0.0);
  if (left < 0.0) throw std::domain_error("simulate_poisson: negative intensity");
  for (std::size_t i = 1; i <= n; ++i) {
    const double right = rate(h * static_cast<double>(i));
    if (right < 0.0) throw std::domain_error("simulate_poisson: negative intensity");
    table.cumulative[i] = table.cumulative[i - 1] + 0.5 * h * (left + right);
    left = right;
  }
  return table;
}

// Phase t in [0, period] with table Lambda(t) = target, linear within cells.
double invert_period(const PeriodTable& table, double target) {
  const auto& c = table.cumulative;
  auto it = std::upper_bound(c.begin(), c.end(), target);
  if (it == c.end()) return table.period;
  const auto hi = static_cast<std::size_t>(it - c.begin());
  const std::size_t lo = hi - 1;
  const double h = table.period / static_cast<double>(c.size() - 1);
  const double w = (target - c[lo]) / (c[hi] - c[lo]);
  return h * (static_cast<double>(lo) + w);
}

std::vector<double> poisson_by_inversion(const PeriodTable& table, double horizon, UniformSequence& seq) {
  std::vector<double> events;
  const double per_period = table.cumulative.back();
  if (per_period <= 0.0) return events;
  double arrival = 0.0;
  for (;;) {
    arrival += seq.exponential();
    const double k = std::floor(arrival / per_period);
    const double t = k * table.period + invert_period(table, arrival - k * per_period);
    if (t > horizon) break;
    if (t > 0.0 && (events.empty() || t > events.back())) events.push_back(t);
  }
  return events;
}

}  // namespace

EventRecord simulate_poisson(const IntensitySpec& intensity, const ObservationWindow& window,
                             const RngStream& rng) {
  if (!(window.horizon > 0.0)) throw std::invalid_argument("simulate_poisson: horizon must be positive");
  UniformSequence seq = rng.sequence();

  std::vector<double> events = std::visit(
      [&](const auto& spec) -> std::vector<double> {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, ConstantIntensity>) {
          if (spec.rate < 0.0) throw std::domain_error("simulate_poisson: negative intensity");
          std::vector<double> out;
          if (spec.rate == 0.0) return out;
          double t = 0.0;
          for (;;) {
            t += seq.exponential() / spec.rate;
            if (t > window.horizon) break;
            out.push_back(t);
          }
          return out;
        } else if constexpr (std::is_same_v<T, PeriodicIntensity>) {
          if (!(spec.period > 0.0)) throw std::invalid_argument("simulate_poisson: period must be positive");
          const PeriodTable table = build_period_table(spec.rate.eval, spec.period);
          return poisson_by_inversion(table, window.horizon, seq);
        } else {
          if (!(spec.period > 0.0) || spec.n_periods == 0) {
            throw std::invalid_argument("simulate_poisson: contiguous alternative needs tau > 0 and n > 0");
          }
          const PeriodTable base = build_period_table(spec.base_rate.eval, spec.period);
          const double base_mass = base.cumulative.back();
          if (!(base_mass > 0.0)) throw std::domain_error("simulate_poisson: null intensity has zero mass");
          const double scale = 1.0 / std::sqrt(static_cast<double>(spec.n_periods) * base_mass);
          const double h_cell = spec.period / static_cast<double>(kLambdaTablePoints);
          auto rate = [&](double t) {
            const double cell = t / h_cell;
            const auto i = std::min(static_cast<std::size_t>(cell), kLambdaTablePoints - 1);
            const double w = cell - static_cast<double>(i);
            const double lambda = base.cumulative[i] + w * (base.cumulative[i + 1] - base.cumulative[i]);
            return spec.base_rate(t) * (1.0 + scale * spec.h(lambda / base_mass));
          };
          const PeriodTable table = build_period_table(rate, spec.period);
          return poisson_by_inversion(table, window.horizon, seq);
        }
      },
      intensity);
  return make_record(std::move(events), window);
}

namespace {

double sampled_maximum(const ScalarModel& g, double support) {
  double m = 0.0;
  for (std::size_t i = 0; i <= kKernelQuadraturePoints; ++i) {
    const double v = g(support * static_cast<double>(i) / static_cast<double>(kKernelQuadraturePoints));
    if (v < 0.0) throw std::invalid_argument("HawkesSpec: kernel must be nonnegative");
    m = std::max(m, v);
  }
  return m;
}

}  // namespace

HawkesSpec::HawkesSpec(double base_rate, ScalarModel kernel, std::optional<double> kernel_bound)
    : base_rate_(base_rate), kernel_(std::move(kernel)) {
  if (!(base_rate_ > 0.0)) throw std::invalid_argument("HawkesSpec: base rate must be positive");
  if (!kernel_.support_end || !(*kernel_.support_end > 0.0)) {
    throw std::invalid_argument("HawkesSpec: kernel must declare a compact support [0, L]");
  }
  const double sampled_max = sampled_maximum(kernel_, *kernel_.support_end);
  branching_ratio_ = trapezoid_integral(kernel_, 0.0, *kernel_.support_end, kKernelQuadraturePoints);
  if (!(branching_ratio_ < 1.0)) throw std::invalid_argument("HawkesSpec: branching ratio must be < 1");
  kernel_bound_ = kernel_bound ? *kernel_bound : 1.01 * sampled_max;
  if (kernel_bound_ < sampled_max) throw std::invalid_argument("HawkesSpec: kernel bound below sampled maximum");
}

EventRecord simulate_hawkes(const HawkesSpec& spec, const ObservationWindow& window, const RngStream& rng) {
  if (!(window.horizon > 0.0)) throw std::invalid_argument("simulate_hawkes: horizon must be positive");
  UniformSequence seq = rng.sequence();
  const double support = spec.support();
  const double base = spec.base_rate();
  const double bound = spec.kernel_bound();
  const auto& g = spec.kernel();

  std::vector<double> events;
  std::size_t first_recent = 0;  // events[first_recent..] lie within the last L
  double t = 0.0;
  for (;;) {
    while (first_recent < events.size() && t - events[first_recent] > support) ++first_recent;
    const double upper = base + bound * static_cast<double>(events.size() - first_recent);
    t += seq.exponential() / upper;
    if (t > window.horizon) break;
    double intensity = base;
    if (bound > 0.0) {
      for (std::size_t i = first_recent; i < events.size(); ++i) intensity += g(t - events[i]);
    }
    if (seq.uniform() * upper <= intensity && (events.empty() || t > events.back())) events.push_back(t);
  }
  return make_record(std::move(events), window);
}

EventRecord simulate_hawkes_alternative(const ScalarModel& h, double base_rate, std::size_t n_periods,
                                        double period, const RngStream& rng) {
  const ObservationWindow window = ObservationWindow::periods(period, n_periods);
  const HawkesSpec spec(base_rate, h.scaled(1.0 / std::sqrt(window.horizon)));
  return simulate_hawkes(spec, window, rng);
}

HawkesSummaries hawkes_summaries(const HawkesSpec& spec, const std::vector<double>& lambda_grid) {
  HawkesSummaries out;
  out.branching_ratio = spec.branching_ratio();
  out.stationary_rate = spec.stationary_rate();
  const std::size_t n = kKernelQuadraturePoints;
  const double support = spec.support();
  const double h = support / static_cast<double>(n);
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g[i] = spec.kernel()(h * static_cast<double>(i));

  out.transfer.reserve(lambda_grid.size());
  out.spectral_density.reserve(lambda_grid.size());
  for (const double lambda : lambda_grid) {
    std::complex<double> acc = 0.5 * (g[0] + g[n] * std::polar(1.0, lambda * support));
    for (std::size_t i = 1; i < n; ++i) acc += g[i] * std::polar(1.0, lambda * h * static_cast<double>(i));
    acc *= h;
    out.transfer.push_back(acc);
    out.spectral_density.push_back(out.stationary_rate / (2.0 * std::numbers::pi * std::norm(1.0 - acc)));
  }
  return out;
}

std::size_t PeriodFold::count(std::size_t j, double t) const {
  const auto& p = phases.at(j);
  return static_cast<std::size_t>(std::upper_bound(p.begin(), p.end(), t) - p.begin());
}

std::size_t PeriodFold::total() const noexcept {
  std::size_t n = 0;
  for (const auto& p : phases) n += p.size();
  return n;
}

PeriodFold fold_periods(const EventRecord& record) {
  if (!record.layout) throw std::invalid_argument("fold_periods: record has no period metadata");
  const double tau = record.layout->period;
  const std::size_t n = record.layout->n_periods;
  PeriodFold fold{tau, std::vector<std::vector<double>>(n)};
  for (const double t : record.events) {
    auto j = static_cast<std::size_t>(std::floor(t / tau));
    if (j >= n) j = n - 1;
    fold.phases[j].push_back(std::clamp(t - static_cast<double>(j) * tau, 0.0, tau));
  }
  return fold;
}

}  // namespace ctgof
