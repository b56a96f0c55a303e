#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "carlab/geometry.hpp"

namespace carlab {

enum class FieldKind { Constant, Rotation, Tabulated, Composite };

// One circular harmonic: amplitude * (cos(rate t + phase), sin(rate t + phase)).
struct Harmonic {
  double amplitude = 0.0;
  double rate = 0.0;
  double phase = 0.0;
};

// Time-dependent, space-independent velocity H(t) on [0, horizon].
// Immutable after construction; all evaluation is pure and thread safe.
// Construction rejects fields whose sampled minimum speed is ≤ 1e-10.
class VelocityField {
 public:
  static VelocityField constant(const Vec& value, double horizon);
  // H(t) = radius*|rate| * (cos(rate t + phase), sin(rate t + phase)),
  // the derivative of a circular motion of the given radius and angular rate.
  static VelocityField rotation(double radius, double rate, double phase,
                                double horizon);
  // Constant base plus circular harmonics; C1 with analytic derivative.
  static VelocityField composite(const Vec& base,
                                 const std::vector<Harmonic>& harmonics,
                                 double horizon);
  // Piecewise-linear interpolation of (times[i], values.col(i)). Lipschitz
  // but not C1; times must be strictly increasing with times[0] = 0.
  static VelocityField tabulated(const Eigen::VectorXd& times,
                                 const Eigen::Matrix2Xd& values);

  FieldKind kind() const { return kind_; }
  double horizon() const { return horizon_; }
  bool is_c1() const { return kind_ != FieldKind::Tabulated; }

  // H(t); throws OutOfHorizon for t outside [0, horizon] (tolerance 1e-9 T).
  Vec at(double t) const;
  Vec operator()(double t) const { return at(t); }

  struct Bounds {
    double h0;     // min |H|
    double hstar;  // max |H|
  };
  // Uniform sampling refined by golden section around the extremal sample.
  Bounds bounds(int n_samples = 10001) const;

  // Upper estimate of the Lipschitz constant of t -> H(t): max sampled |H'|
  // (analytic kinds) or max divided difference (tabulated), times safety.
  double lipschitz_estimate(int n_samples = 10001, double safety = 1.1) const;

  // X(t) = integral of H over [0, t], absolute tolerance 1e-12 per component.
  Vec displacement(double t) const;

  // H'(t): analytic when available, else central differences (step 1e-6 T).
  Vec derivative(double t) const;

  std::string describe() const;

 private:
  VelocityField() = default;

  Vec raw_at(double t) const;       // no horizon check
  Vec raw_derivative(double t) const;
  void validate_nondegenerate() const;
  void build_checkpoints();

  FieldKind kind_ = FieldKind::Constant;
  double horizon_ = 0.0;
  Vec base_ = Vec::Zero();
  std::vector<Harmonic> harmonics_;
  Eigen::VectorXd table_times_;
  Eigen::Matrix2Xd table_values_;

  // Prefix displacement table on a uniform grid, built at construction so
  // displacement() stays read-only afterwards.
  Eigen::VectorXd cp_times_;
  Eigen::Matrix2Xd cp_disp_;
};

}  // namespace carlab
