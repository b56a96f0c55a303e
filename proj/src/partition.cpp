#include "carlab/partition.hpp"

#include <cmath>

#include "carlab/errors.hpp"

namespace carlab {

namespace {

constexpr double kSqrt2Inv = 0.70710678118654752440;

void require_aperture(double sstar) {
  if (!(sstar > kSqrt2Inv && sstar < 1.0))
    throw ApertureOutOfRange("aperture must lie in (1/sqrt(2), 1)");
}

Eigen::Matrix2Xd anchor_axes(const VelocityField& field,
                             const Eigen::VectorXd& times) {
  const Eigen::Index m = times.size() - 1;
  Eigen::Matrix2Xd axes(2, m);
  for (Eigen::Index j = 0; j < m; ++j) axes.col(j) = field.at(times[j]).normalized();
  return axes;
}

}  // namespace

ConeCertificate verify_cone_condition(const ConePartition& partition,
                                      const VelocityField& field,
                                      int n_samples) {
  if (n_samples < 1) throw ValidationError("verify_cone_condition: n_samples >= 1");
  ConeCertificate cert;
  cert.margin = std::numeric_limits<double>::infinity();
  double max_dt_sample = 0.0;
  for (Eigen::Index j = 0; j < partition.intervals(); ++j) {
    const Vec eta = partition.axes.col(j);
    const double a = partition.times[j];
    const double b = partition.times[j + 1];
    max_dt_sample = std::max(max_dt_sample, (b - a) / n_samples);
    for (int k = 0; k <= n_samples; ++k) {
      const double t = a + (b - a) * static_cast<double>(k) / n_samples;
      const double dot = field.at(t).normalized().dot(eta);
      if (dot - partition.sstar < cert.margin) {
        cert.margin = dot - partition.sstar;
        cert.worst_time = t;
      }
    }
  }
  const auto b = field.bounds();
  cert.sampling_gap = field.lipschitz_estimate() * max_dt_sample / b.h0;
  return cert;
}

ConePartition uniform_partition(const VelocityField& field, double sstar,
                                int cert_samples) {
  require_aperture(sstar);
  const double T = field.horizon();
  const double h0 = field.bounds().h0;
  const double L = field.lipschitz_estimate(10001, 1.0);
  const double count = 2.0 * L * T / (h0 * (1.0 - sstar));
  const auto m = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::ceil(count)));

  ConePartition p;
  p.sstar = sstar;
  p.times = Eigen::VectorXd::LinSpaced(m + 1, 0.0, T);
  p.times[0] = 0.0;
  p.times[m] = T;
  p.axes = anchor_axes(field, p.times);
  p.certificate = verify_cone_condition(p, field, cert_samples);
  return p;
}

ConePartition greedy_partition(const VelocityField& field, double sstar,
                               int scan_samples, double margin,
                               int cert_samples) {
  require_aperture(sstar);
  if (margin < 0.0) throw ValidationError("greedy_partition: margin must be >= 0");
  if (scan_samples < 2) throw ValidationError("greedy_partition: scan_samples >= 2");
  const double T = field.horizon();
  // keep the cut threshold strictly below 1 even for tight apertures
  const double threshold = sstar + std::min(margin, 0.5 * (1.0 - sstar));

  std::vector<double> cuts{0.0};
  Eigen::Index anchor = 0;
  Vec eta = field.at(0.0).normalized();
  Eigen::Index i = 1;
  while (i <= scan_samples) {
    const double t = T * static_cast<double>(i) / scan_samples;
    const double dot = field.at(t).normalized().dot(eta);
    if (dot >= threshold) {
      ++i;
      continue;
    }
    if (i == anchor + 1)
      throw PartitionFailure("greedy_partition: cannot advance a single step");
    anchor = i - 1;
    const double tc = T * static_cast<double>(anchor) / scan_samples;
    cuts.push_back(tc);
    eta = field.at(tc).normalized();
  }
  cuts.push_back(T);

  ConePartition p;
  p.sstar = sstar;
  p.times = Eigen::Map<const Eigen::VectorXd>(cuts.data(),
                                              static_cast<Eigen::Index>(cuts.size()));
  p.axes = anchor_axes(field, p.times);
  p.certificate = verify_cone_condition(p, field, cert_samples);

  const auto m_uniform = uniform_partition(field, sstar, 1).intervals();
  if (p.intervals() > m_uniform)
    throw PartitionFailure(
        "greedy_partition: scan grid too coarse, exceeded the uniform interval count");
  return p;
}

}  // namespace carlab
