#include "carlab/weight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "carlab/errors.hpp"

namespace carlab {

Eigen::Index CarlemanWeight::interval_index(double t) const {
  const double T = partition.times[partition.times.size() - 1];
  const double tol = 1e-9 * std::max(1.0, T);
  if (t < -tol || t > T + tol) throw OutOfHorizon("weight: t outside [0, T]");
  const double tc = std::clamp(t, 0.0, T);
  Eigen::Index j = 0;
  while (j + 1 < intervals() && tc >= partition.times[j + 1]) ++j;
  return j;
}

CarlemanWeight build_weight(const Domain& domain, const VelocityField& field,
                            const ConePartition& partition, double r) {
  if (!(r > 0.0)) throw SlackNonpositive("build_weight: slack r must be positive");
  if (partition.certificate.margin < 0.0)
    throw InvalidPartition("build_weight: partition certificate margin is negative");
  if (!domain.contains(Vec::Zero(), 1e-9))
    throw ValidationError(
        "build_weight: the apex rays anchor at the origin, which must lie in the "
        "domain closure");

  const double delta = domain.diameter();
  const double sstar = partition.sstar;
  const Eigen::Index m = partition.intervals();

  CarlemanWeight w{partition, domain};
  w.slack_r = r;
  w.cstar = 2.0 * sstar * sstar - 1.0;
  w.h0 = field.bounds().h0;

  w.radii.resize(m);
  w.apexes.resize(2, m);
  w.mu.resize(m);
  w.upper.resize(m);

  const double r0 = (1.0 + sstar) / (1.0 - sstar) * delta;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double pow2 = std::ldexp(1.0, static_cast<int>(j));
    w.radii[j] = pow2 * r0 + (pow2 - 1.0) * (delta + r);
    w.apexes.col(j) = -w.radii[j] * partition.axes.col(j);
    const auto ext = domain.distance_extremes(w.apexes.col(j));
    w.mu[j] = ext.min;
    w.upper[j] = ext.max;
    if (!(w.mu[j] > 0.0))
      throw ValidationError("build_weight: an apex landed inside the domain closure");
  }
  w.beta = w.cstar * w.h0 * w.mu[0];
  return w;
}

double phi(const CarlemanWeight& w, const Vec& x, double t) {
  if (!w.domain.contains(x, 1e-9))
    throw OutOfDomain("phi: x outside the domain closure");
  const Eigen::Index j = w.interval_index(t);
  return -w.beta * (t - w.partition.times[j]) + (x - Vec(w.apexes.col(j))).squaredNorm();
}

double p_phi(const CarlemanWeight& w, const VelocityField& field, const Vec& x,
             double t) {
  if (!w.domain.contains(x, 1e-9))
    throw OutOfDomain("p_phi: x outside the domain closure");
  const Eigen::Index j = w.interval_index(t);
  return -w.beta + 2.0 * field.at(t).dot(x - Vec(w.apexes.col(j)));
}

double check_apex_cone(const CarlemanWeight& w, const Domain& domain,
                       const QuadratureGrid& grid) {
  double margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < w.intervals(); ++j) {
    const Vec eta = w.partition.axes.col(j);
    const Vec apex = w.apexes.col(j);
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const Vec d = Vec(grid.nodes.col(i)) - apex;
      margin = std::min(margin, d.dot(eta) - w.partition.sstar * d.norm());
    }
  }
  (void)domain;
  return margin;
}

SeparationReport check_separation(const CarlemanWeight& w) {
  const Eigen::Index m = w.intervals();
  SeparationReport rep;
  rep.gaps.resize(std::max<Eigen::Index>(m - 1, 0));
  rep.ok = true;
  for (Eigen::Index j = 0; j + 1 < m; ++j) {
    rep.gaps[j] = w.mu[j + 1] - w.upper[j];
    if (!(rep.gaps[j] > 0.0)) rep.ok = false;
  }
  const double rel = 1.0 + 1e-12;
  rep.extremes_at_ends = w.upper.maxCoeff() <= w.upper[m - 1] * rel &&
                         w.mu.minCoeff() >= w.mu[0] / rel;
  return rep;
}

double check_pphi_lower_bound(const CarlemanWeight& w,
                              const VelocityField& field,
                              const QuadratureGrid& grid, int t_samples) {
  if (t_samples < 1)
    throw ValidationError("check_pphi_lower_bound: t_samples must be >= 1");
  const double bound = w.cstar * w.h0 * w.mu[0];
  double margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < w.intervals(); ++j) {
    const Vec apex = w.apexes.col(j);
    const double a = w.partition.times[j];
    const double b = w.partition.times[j + 1];
    for (int k = 0; k <= t_samples; ++k) {
      const double t = a + (b - a) * static_cast<double>(k) / t_samples;
      const Vec ht = field.at(t);
      for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double val =
            -w.beta + 2.0 * ht.dot(Vec(grid.nodes.col(i)) - apex);
        margin = std::min(margin, val - bound);
      }
    }
  }
  return margin;
}

ObservabilityCondition observability_condition(const CarlemanWeight& w,
                                               const VelocityField& field) {
  const Eigen::Index m = w.intervals();
  ObservabilityCondition out;
  out.q.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double dt = w.partition.times[j + 1] - w.partition.times[j];
    out.q[j] = dt * w.mu[j] / (w.upper[j] * w.upper[j]);
  }
  const double h0 = field.bounds().h0;
  out.threshold = 1.0 / (h0 * w.cstar);
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < m; ++j)
    if (out.q[j] > out.q[best]) best = j;
  out.holds = out.q[best] > out.threshold;
  out.jstar = out.holds ? best : -1;
  return out;
}

S0Estimate estimate_s0(const CarlemanWeight& w, const VelocityField& field,
                       const QuadratureGrid& grid,
                       const std::vector<double>& s_grid) {
  if (s_grid.empty()) throw ValidationError("estimate_s0: empty s grid");
  S0Estimate out;
  const double s_min = *std::min_element(s_grid.begin(), s_grid.end());
  if (w.intervals() < 2) {
    out.s0 = s_min;
    out.empirical = true;
    return out;
  }

  const double rhs = 0.5 * w.mu[0] * w.h0;
  auto dominates_everywhere = [&](double s) {
    for (Eigen::Index j = 1; j < w.intervals(); ++j) {
      const Vec ht = field.at(w.partition.times[j]);
      const Vec xj = w.apexes.col(j);
      const Vec xp = w.apexes.col(j - 1);
      const double ref = w.mu[j] * w.mu[j];
      for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const Vec x = grid.nodes.col(i);
        const double a_coef = 2.0 * ht.dot(x - xj) - w.beta;
        const double b_coef = 2.0 * ht.dot(x - xp) - w.beta;
        // both sides scaled by e^{-2 s mu_j^2}; the second exponent is
        // negative by the separation property, so only the first can
        // overflow, and a positive coefficient there means dominance
        const double ea = 2.0 * s * ((x - xj).squaredNorm() - ref);
        const double eb = 2.0 * s * ((x - xp).squaredNorm() - ref);
        if (ea >= 700.0) {
          if (a_coef > 0.0) continue;
          return false;
        }
        const double lhs = a_coef * std::exp(ea) - b_coef * std::exp(eb);
        if (!(lhs >= rhs)) return false;
      }
    }
    return true;
  };

  std::vector<double> sorted(s_grid);
  std::sort(sorted.begin(), sorted.end());
  for (double s : sorted) {
    if (dominates_everywhere(s)) {
      out.s0 = s;
      out.empirical = true;
      return out;
    }
  }

  // closed-form threshold from the separation gaps
  const double hstar = field.bounds().hstar;
  const double mstar = w.upper[w.intervals() - 1];
  const double log_arg = 2.0 * hstar * mstar / (w.cstar * w.mu[0] * w.h0);
  double s0 = 0.0;
  for (Eigen::Index j = 1; j < w.intervals(); ++j) {
    const double denom =
        2.0 * (w.mu[j] * w.mu[j] - w.upper[j - 1] * w.upper[j - 1]);
    s0 = std::max(s0, std::log(log_arg) / denom);
  }
  out.s0 = s0 > 0.0 ? s0 : s_min;
  out.empirical = false;
  return out;
}

}  // namespace carlab
