#pragma once

#include <Eigen/Dense>
#include <vector>

#include "carlab/geometry.hpp"
#include "carlab/partition.hpp"
#include "carlab/velocity.hpp"

namespace carlab {

// Piecewise space-time weight phi(x,t) = -beta (t - t_j) + |x - x_j|^2 on
// [t_j, t_{j+1}), extended to t = T by the last branch. Apexes sit outside
// the domain on the anchor rays, at doubling radii so that the distance
// ranges seen from consecutive apexes do not overlap.
struct CarlemanWeight {
  ConePartition partition;
  Domain domain;
  Eigen::Matrix2Xd apexes;  // 2 x m, apex j = -radii[j] * axes.col(j)
  Eigen::VectorXd radii;    // m
  Eigen::VectorXd mu;       // m, min over the closure of |x - apex_j|
  Eigen::VectorXd upper;    // m, max over the closure of |x - apex_j|
  double beta = 0.0;        // drift rate (2 sstar^2 - 1) H0 mu[0]
  double cstar = 0.0;       // 2 sstar^2 - 1
  double slack_r = 0.0;
  double h0 = 0.0;          // min field speed, cached at build

  Eigen::Index intervals() const { return apexes.cols(); }

  // Half-open interval lookup, t = T maps to the last interval. Throws
  // OutOfHorizon outside [0, T] (tolerance 1e-9 max(1, T)).
  Eigen::Index interval_index(double t) const;
};

// Builds apexes, radii, drift, and distance extremes from the partition.
// Throws InvalidPartition when the certificate margin is negative,
// SlackNonpositive when r <= 0, and ValidationError when the domain closure
// misses the origin (the radii formulas anchor the apex rays there).
CarlemanWeight build_weight(const Domain& domain, const VelocityField& field,
                            const ConePartition& partition, double r);

// phi(x, t); throws OutOfDomain / OutOfHorizon.
double phi(const CarlemanWeight& w, const Vec& x, double t);

// Transport operator applied to the active branch:
// -beta + 2 H(t).(x - x_j). Constant in t only for constant fields.
double p_phi(const CarlemanWeight& w, const VelocityField& field, const Vec& x,
             double t);

// min over apexes and grid nodes of (x - x_j).eta_j - sstar |x - x_j|.
// Nonnegative for every weight built from a valid partition.
double check_apex_cone(const CarlemanWeight& w, const Domain& domain,
                       const QuadratureGrid& grid);

struct SeparationReport {
  bool ok = false;              // all gaps strictly positive
  Eigen::VectorXd gaps;         // mu[j+1] - upper[j], j = 0..m-2
  bool extremes_at_ends = false;  // max upper at the last apex, min mu at the first
};
SeparationReport check_separation(const CarlemanWeight& w);

// min over apexes, nodes, and time samples of p_phi - cstar H0 mu[0].
double check_pphi_lower_bound(const CarlemanWeight& w,
                              const VelocityField& field,
                              const QuadratureGrid& grid, int t_samples);

// Quantitative time condition sufficient for observability:
// max_j (t_{j+1} - t_j) mu_j / upper_j^2 > 1 / (H0 cstar).
struct ObservabilityCondition {
  bool holds = false;
  Eigen::Index jstar = -1;  // smallest maximizing index when holds
  Eigen::VectorXd q;        // per-interval left-hand values
  double threshold = 0.0;
};
ObservabilityCondition observability_condition(const CarlemanWeight& w,
                                               const VelocityField& field);

// Smallest s in s_grid for which the cross-apex exponential dominance
// q_j(x) >= (mu[0] H0 / 2) e^{2 s mu_j^2} holds at every grid node and
// every j >= 1. Falls back to the closed-form threshold when no grid value
// qualifies; `empirical` records which path produced s0.
struct S0Estimate {
  double s0 = 0.0;
  bool empirical = true;
};
S0Estimate estimate_s0(const CarlemanWeight& w, const VelocityField& field,
                       const QuadratureGrid& grid,
                       const std::vector<double>& s_grid);

}  // namespace carlab
