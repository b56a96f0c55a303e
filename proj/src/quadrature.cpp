#include "carlab/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace carlab {

double pairwise_sum(const Eigen::VectorXd& values) {
  return pairwise_map_sum(0, values.size(),
                          [&](std::ptrdiff_t i) { return values[i]; });
}

namespace {

double simpson_segment(double fa, double fm, double fb, double h) {
  return (h / 6.0) * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                            double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_segment(fa, flm, fm, m - a);
  const double right = simpson_segment(fm, frm, fb, b - m);
  const double err = (left + right - whole) / 15.0;
  if (depth <= 0 || std::abs(err) <= tol) return left + right + err;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol,
                              depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol,
                              depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = simpson_segment(fa, fm, fb, b - a);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

Eigen::VectorXd simpson_weights(Eigen::Index nodes, double dx) {
  if (nodes < 2) throw std::invalid_argument("simpson_weights: nodes < 2");
  Eigen::VectorXd w(nodes);
  if (nodes % 2 == 1) {
    w.setConstant(2.0 * dx / 3.0);
    for (Eigen::Index i = 1; i < nodes; i += 2) w[i] = 4.0 * dx / 3.0;
    w[0] = dx / 3.0;
    w[nodes - 1] = dx / 3.0;
  } else {
    // even node count: trapezoid
    w.setConstant(dx);
    w[0] = 0.5 * dx;
    w[nodes - 1] = 0.5 * dx;
  }
  return w;
}

double integrate_samples(const Eigen::VectorXd& values, double dx) {
  const Eigen::VectorXd w = simpson_weights(values.size(), dx);
  return weighted_sum(w, [&](std::ptrdiff_t i) { return values[i]; });
}

std::vector<double> logspace(double lo, double hi, int n) {
  if (n < 1) return {};
  if (n == 1) return {lo};
  std::vector<double> out(static_cast<size_t>(n));
  const double la = std::log(lo);
  const double lb = std::log(hi);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    out[static_cast<size_t>(i)] = std::exp(la + t * (lb - la));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

double golden_section_min(const std::function<double(double)>& f, double a,
                          double b, double tol) {
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace carlab
