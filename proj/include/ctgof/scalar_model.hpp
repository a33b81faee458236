#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ctgof {

// A real function of one real variable: a drift S(x), a diffusion
// coefficient sigma(x), an intensity S(t), an alternative h(.) or a Hawkes
// kernel g(t). Kernels declare a compact support [0, support_end] outside of
// which they vanish.
struct ScalarModel {
  std::string label;
  std::function<double(double)> eval;
  std::optional<double> support_end;

  double operator()(double x) const { return eval(x); }

  static ScalarModel constant(double value);
  // a + b x
  static ScalarModel linear(double intercept, double slope);
  // c0 + c1 x + c2 x^2 + ...
  static ScalarModel polynomial(std::vector<double> coefficients);
  // -theta (x - mean), the Ornstein-Uhlenbeck drift.
  static ScalarModel ornstein_uhlenbeck(double theta, double mean = 0.0);
  // base (1 + amplitude sin(2 pi t / period))
  static ScalarModel sinusoidal(double base, double amplitude, double period);
  // a exp(-b t) on [0, support_end].
  static ScalarModel exponential_kernel(double a, double b, double support_end);
  // height on [0, width].
  static ScalarModel box(double height, double width);
  // c cos(frequency (x - shift)) on the whole line.
  static ScalarModel cosine(double c, double frequency, double shift = 0.0);
  // Linear interpolation through (xs, ys), flat beyond the end points.
  static ScalarModel tabulated(std::vector<double> xs, std::vector<double> ys, std::string label);

  // factor * f, keeping the support.
  ScalarModel scaled(double factor) const;
};

// f + g, pointwise.
ScalarModel operator+(const ScalarModel& f, const ScalarModel& g);

// Integral of f over [a, b] by the composite trapezoid rule with n intervals.
double trapezoid_integral(const ScalarModel& f, double a, double b, std::size_t n);

// Cumulative trapezoid table of f on an n-interval uniform grid over [a, b]:
// result[i] = integral from a to a + i (b - a) / n.
std::vector<double> cumulative_trapezoid(const ScalarModel& f, double a, double b, std::size_t n);

}  // namespace ctgof
