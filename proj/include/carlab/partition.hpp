#pragma once

#include <Eigen/Dense>

#include "carlab/velocity.hpp"

namespace carlab {

// Sampled certificate for the cone condition: margin is the minimum over
// intervals and samples of (H(t)/|H(t)|) . eta_j - sstar. Because the
// condition is continuum-valued, the margin is conservative only up to
// sampling_gap = L * dt_sample / H0, reported alongside.
struct ConeCertificate {
  double margin = 0.0;
  double worst_time = 0.0;
  double sampling_gap = 0.0;
};

// Partition t_0 = 0 < t_1 < ... < t_m = T with unit anchor directions
// eta_j = H(t_j)/|H(t_j)| such that H(t) stays within angle arccos(sstar)
// of eta_j on [t_j, t_{j+1}].
struct ConePartition {
  Eigen::VectorXd times;   // m + 1 entries
  Eigen::Matrix2Xd axes;   // 2 x m
  double sstar = 0.0;
  ConeCertificate certificate;

  Eigen::Index intervals() const { return axes.cols(); }
};

// m = max(1, ceil(2 L T / (H0 (1 - sstar)))) with uniform times. The
// Lipschitz estimate enters with safety factor 1 so the count matches the
// closed-form bound exactly for analytic fields.
ConePartition uniform_partition(const VelocityField& field, double sstar,
                                int cert_samples = 1000);

// Dense forward scan: each interval extends to the last grid sample whose
// normalized dot against the anchor stays >= sstar + margin. The margin is
// clipped to (1 - sstar)/2 so the threshold stays below 1. Never produces
// more intervals than uniform_partition (asserted).
ConePartition greedy_partition(const VelocityField& field, double sstar,
                               int scan_samples = 20000, double margin = 0.01,
                               int cert_samples = 1000);

// Evaluates the certificate on n_samples + 1 points per interval. A negative
// margin means the partition fails the cone condition; no error is thrown.
ConeCertificate verify_cone_condition(const ConePartition& partition,
                                      const VelocityField& field,
                                      int n_samples);

}  // namespace carlab
