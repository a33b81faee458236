#include "ctgof/scalar_model.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ctgof {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

ScalarModel ScalarModel::constant(double value) {
  return {"constant(" + num(value) + ")", [value](double) { return value; }, std::nullopt};
}

ScalarModel ScalarModel::linear(double intercept, double slope) {
  return {"linear(" + num(intercept) + "," + num(slope) + ")",
          [intercept, slope](double x) { return intercept + slope * x; }, std::nullopt};
}

ScalarModel ScalarModel::polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) throw std::invalid_argument("polynomial: no coefficients");
  std::string label = "poly(";
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    label += (i ? "," : "") + num(coefficients[i]);
  }
  label += ")";
  return {label,
          [c = std::move(coefficients)](double x) {
            double acc = 0.0;
            for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
            return acc;
          },
          std::nullopt};
}

ScalarModel ScalarModel::ornstein_uhlenbeck(double theta, double mean) {
  return {"ou(" + num(theta) + "," + num(mean) + ")",
          [theta, mean](double x) { return -theta * (x - mean); }, std::nullopt};
}

ScalarModel ScalarModel::sinusoidal(double base, double amplitude, double period) {
  if (!(period > 0.0)) throw std::invalid_argument("sinusoidal: period must be positive");
  const double omega = 2.0 * std::numbers::pi / period;
  return {"sinusoidal(" + num(base) + "," + num(amplitude) + "," + num(period) + ")",
          [=](double t) { return base * (1.0 + amplitude * std::sin(omega * t)); }, std::nullopt};
}

ScalarModel ScalarModel::exponential_kernel(double a, double b, double support_end) {
  if (!(support_end > 0.0)) throw std::invalid_argument("exponential kernel: support must be positive");
  return {"exp-kernel(" + num(a) + "," + num(b) + "," + num(support_end) + ")",
          [=](double t) { return (t >= 0.0 && t <= support_end) ? a * std::exp(-b * t) : 0.0; },
          support_end};
}

ScalarModel ScalarModel::box(double height, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("box: width must be positive");
  return {"box(" + num(height) + "," + num(width) + ")",
          [=](double t) { return (t >= 0.0 && t <= width) ? height : 0.0; }, width};
}

ScalarModel ScalarModel::cosine(double c, double frequency, double shift) {
  return {"cosine(" + num(c) + "," + num(frequency) + "," + num(shift) + ")",
          [=](double x) { return c * std::cos(frequency * (x - shift)); }, std::nullopt};
}

ScalarModel ScalarModel::tabulated(std::vector<double> xs, std::vector<double> ys, std::string label) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("tabulated: need at least two (x, y) pairs of equal length");
  }
  if (!std::is_sorted(xs.begin(), xs.end()) ||
      std::adjacent_find(xs.begin(), xs.end()) != xs.end()) {
    throw std::invalid_argument("tabulated: abscissae must be strictly increasing");
  }
  return {std::move(label),
          [xs = std::move(xs), ys = std::move(ys)](double x) {
            if (x <= xs.front()) return ys.front();
            if (x >= xs.back()) return ys.back();
            const auto hi = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
            const std::size_t lo = hi - 1;
            const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
            return ys[lo] + w * (ys[hi] - ys[lo]);
          },
          std::nullopt};
}

ScalarModel ScalarModel::scaled(double factor) const {
  return {num(factor) + "*" + label, [f = eval, factor](double x) { return factor * f(x); }, support_end};
}

ScalarModel operator+(const ScalarModel& f, const ScalarModel& g) {
  std::optional<double> support;
  if (f.support_end && g.support_end) support = std::max(*f.support_end, *g.support_end);
  return {f.label + "+" + g.label, [a = f.eval, b = g.eval](double x) { return a(x) + b(x); }, support};
}

double trapezoid_integral(const ScalarModel& f, double a, double b, std::size_t n) {
  if (n == 0) throw std::invalid_argument("trapezoid_integral: n must be positive");
  const double h = (b - a) / static_cast<double>(n);
  double acc = 0.5 * (f(a) + f(b));
  for (std::size_t i = 1; i < n; ++i) acc += f(a + static_cast<double>(i) * h);
  return acc * h;
}

std::vector<double> cumulative_trapezoid(const ScalarModel& f, double a, double b, std::size_t n) {
  if (n == 0) throw std::invalid_argument("cumulative_trapezoid: n must be positive");
  const double h = (b - a) / static_cast<double>(n);
  std::vector<double> out(n + 1, 0.0);
  double left = f(a);
  for (std::size_t i = 1; i <= n; ++i) {
    const double right = f(a + static_cast<double>(i) * h);
    out[i] = out[i - 1] + 0.5 * h * (left + right);
    left = right;
  }
  return out;
}

}  // namespace ctgof
