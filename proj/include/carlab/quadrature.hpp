#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <vector>

namespace carlab {

// Deterministic pairwise (cascade) summation. The reduction tree depends only
// on the index range, never on thread count, so sums are bit-reproducible.
template <class F>
double pairwise_map_sum(std::ptrdiff_t begin, std::ptrdiff_t end, F&& term) {
  const std::ptrdiff_t n = end - begin;
  if (n <= 0) return 0.0;
  if (n <= 16) {
    double acc = 0.0;
    for (std::ptrdiff_t i = begin; i < end; ++i) acc += term(i);
    return acc;
  }
  const std::ptrdiff_t mid = begin + n / 2;
  return pairwise_map_sum(begin, mid, term) + pairwise_map_sum(mid, end, term);
}

double pairwise_sum(const Eigen::VectorXd& values);

// Weighted quadrature sum  sum_i w_i f(i)  with pairwise accumulation.
template <class F>
double weighted_sum(const Eigen::VectorXd& weights, F&& value_at) {
  return pairwise_map_sum(0, weights.size(), [&](std::ptrdiff_t i) {
    return weights[i] * value_at(i);
  });
}

// Composite Simpson rule with an even number of subintervals.
template <class F>
double composite_simpson(F&& f, double a, double b, int subdivisions) {
  int n = subdivisions;
  if (n < 2) n = 2;
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  const double ends = f(a) + f(b);
  const double odd = pairwise_map_sum(0, n / 2, [&](std::ptrdiff_t k) {
    return f(a + (2 * static_cast<double>(k) + 1) * h);
  });
  const double even = pairwise_map_sum(1, n / 2, [&](std::ptrdiff_t k) {
    return f(a + 2 * static_cast<double>(k) * h);
  });
  return (h / 3.0) * (ends + 4.0 * odd + 2.0 * even);
}

// Adaptive Simpson integration to an absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, int max_depth = 48);

// Simpson weights for an odd number of equispaced nodes with spacing dx.
// Falls back to trapezoid weights when the node count is even.
Eigen::VectorXd simpson_weights(Eigen::Index nodes, double dx);

// Integral of tabulated values at equispaced points with spacing dx.
double integrate_samples(const Eigen::VectorXd& values, double dx);

// n log-spaced points from lo to hi inclusive (lo, hi > 0).
std::vector<double> logspace(double lo, double hi, int n);

// Golden-section search refining a minimizer of f on [a, b].
double golden_section_min(const std::function<double(double)>& f, double a,
                          double b, double tol = 1e-12);

}  // namespace carlab
