#include <doctest.h>

#include <cmath>
#include <numbers>

#include "carlab/errors.hpp"
#include "carlab/partition.hpp"

using namespace carlab;

TEST_CASE("constant field needs a single interval") {
  const VelocityField f = VelocityField::constant(Vec(0.6, -0.8), 3.0);
  const ConePartition p = uniform_partition(f, 0.8);
  REQUIRE(p.intervals() == 1);
  CHECK(p.times[0] == 0.0);
  CHECK(p.times[1] == 3.0);
  CHECK((Vec(p.axes.col(0)) - Vec(0.6, -0.8)).norm() <= 1e-14);
  CHECK(p.certificate.margin == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(p.certificate.sampling_gap == 0.0);
}

TEST_CASE("uniform interval count matches the closed-form bound") {
  // unit-speed rotation over a quarter turn at aperture 0.75:
  // m = ceil(2 L T / (H0 (1 - sstar))) = ceil(4 pi) = 13
  const VelocityField f =
      VelocityField::rotation(1.0, 1.0, 0.0, 0.5 * std::numbers::pi);
  const ConePartition p = uniform_partition(f, 0.75);
  CHECK(p.intervals() == 13);
  CHECK(p.certificate.margin >= 0.0);
  // uniform spacing
  const double dt = p.times[1] - p.times[0];
  for (Eigen::Index j = 1; j + 1 < p.times.size(); ++j)
    CHECK(p.times[j + 1] - p.times[j] == doctest::Approx(dt).epsilon(1e-12));
  // anchors are the normalized field at interval starts
  for (Eigen::Index j = 0; j < p.intervals(); ++j)
    CHECK((Vec(p.axes.col(j)) - f.at(p.times[j]).normalized()).norm() <= 1e-14);
}

TEST_CASE("greedy partition of the quarter turn needs three intervals") {
  // cos(t - t_j) >= 0.75 + 0.01 allows steps up to arccos(0.76) = 0.7076;
  // ceil((pi/2) / 0.7076) = 3
  const VelocityField f =
      VelocityField::rotation(1.0, 1.0, 0.0, 0.5 * std::numbers::pi);
  const ConePartition p = greedy_partition(f, 0.75);
  CHECK(p.intervals() == 3);
  CHECK(p.certificate.margin >= 0.0);
  CHECK(p.times[0] == 0.0);
  CHECK(p.times[p.times.size() - 1] ==
        doctest::Approx(0.5 * std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("greedy step length matches the arccos oracle") {
  // every greedy interval must stay below the exact aperture step and the
  // first one must come close to it (within two scan cells)
  const double sstar = 0.8;
  const double margin = 0.01;
  const VelocityField f = VelocityField::rotation(1.0, 1.0, 0.0, 2.0);
  const int scan = 20000;
  const ConePartition p = greedy_partition(f, sstar, scan, margin);
  const double step_limit = std::acos(sstar + margin);
  const double cell = 2.0 / scan;
  for (Eigen::Index j = 0; j < p.intervals(); ++j) {
    const double dt = p.times[j + 1] - p.times[j];
    CHECK(dt <= step_limit + 1e-12);
  }
  CHECK(p.times[1] - p.times[0] >= step_limit - 2.0 * cell);
}

TEST_CASE("greedy never exceeds the uniform interval count") {
  for (double sstar : {0.72, 0.8, 0.95}) {
    const VelocityField f = VelocityField::rotation(0.5, 2.0, 0.3, 1.0);
    const ConePartition u = uniform_partition(f, sstar);
    const ConePartition g = greedy_partition(f, sstar);
    CHECK(g.intervals() <= u.intervals());
    CHECK(g.certificate.margin >= 0.0);
    CHECK(u.certificate.margin >= 0.0);
  }
}

TEST_CASE("aperture outside the unit-cone window is rejected") {
  const VelocityField f = VelocityField::constant(Vec(1.0, 0.0), 1.0);
  CHECK_THROWS_AS((void)uniform_partition(f, 0.5), ApertureOutOfRange);
  CHECK_THROWS_AS((void)uniform_partition(f, 1.0), ApertureOutOfRange);
  CHECK_THROWS_AS((void)uniform_partition(f, 1.0 / std::numbers::sqrt2),
                  ApertureOutOfRange);
  CHECK_THROWS_AS((void)greedy_partition(f, 0.3), ApertureOutOfRange);
}

TEST_CASE("greedy fails loudly when the scan cannot advance") {
  // one scan cell spans far more than the admissible angular step
  const VelocityField f =
      VelocityField::rotation(1.0, 50.0, 0.0, 2.0 * std::numbers::pi);
  CHECK_THROWS_AS((void)greedy_partition(f, 0.95, 16), PartitionFailure);
}

TEST_CASE("certificate flags a partition that violates the cone condition") {
  const VelocityField f =
      VelocityField::rotation(1.0, 1.0, 0.0, 2.0);  // quarter+ turn
  ConePartition p;
  p.times = Eigen::VectorXd::LinSpaced(2, 0.0, 2.0);
  p.axes.resize(2, 1);
  p.axes.col(0) = Vec(1.0, 0.0);  // single anchor cannot hold 2 radians
  p.sstar = 0.8;
  const ConeCertificate cert = verify_cone_condition(p, f, 500);
  CHECK(cert.margin < 0.0);
  CHECK(cert.worst_time == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(cert.sampling_gap > 0.0);
}

TEST_CASE("tabulated fields partition through sampled certificates") {
  Eigen::VectorXd times(3);
  times << 0.0, 0.6, 1.2;
  Eigen::Matrix2Xd values(2, 3);
  values.col(0) = Vec(1.0, 0.0);
  values.col(1) = Vec(0.9, 0.3);
  values.col(2) = Vec(0.8, -0.2);
  const VelocityField f = VelocityField::tabulated(times, values);
  const ConePartition p = uniform_partition(f, 0.8);
  CHECK(p.intervals() >= 1);
  CHECK(p.certificate.margin >= 0.0);
}
