#include "carlab/velocity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "carlab/errors.hpp"
#include "carlab/quadrature.hpp"

namespace carlab {

namespace {

constexpr double kDegenerateSpeed = 1e-10;

double horizon_tol(double horizon) { return 1e-9 * std::max(1.0, horizon); }

}  // namespace

VelocityField VelocityField::constant(const Vec& value, double horizon) {
  if (!(horizon > 0.0)) throw ValidationError("velocity: horizon must be positive");
  VelocityField f;
  f.kind_ = FieldKind::Constant;
  f.horizon_ = horizon;
  f.base_ = value;
  f.validate_nondegenerate();
  f.build_checkpoints();
  return f;
}

VelocityField VelocityField::rotation(double radius, double rate, double phase,
                                      double horizon) {
  if (!(horizon > 0.0)) throw ValidationError("velocity: horizon must be positive");
  if (!(radius > 0.0)) throw ValidationError("velocity: rotation radius must be positive");
  if (rate == 0.0) throw ValidationError("velocity: rotation rate must be nonzero");
  VelocityField f;
  f.kind_ = FieldKind::Rotation;
  f.horizon_ = horizon;
  f.harmonics_ = {{radius * std::abs(rate), rate, phase}};
  f.validate_nondegenerate();
  f.build_checkpoints();
  return f;
}

VelocityField VelocityField::composite(const Vec& base,
                                       const std::vector<Harmonic>& harmonics,
                                       double horizon) {
  if (!(horizon > 0.0)) throw ValidationError("velocity: horizon must be positive");
  VelocityField f;
  f.kind_ = FieldKind::Composite;
  f.horizon_ = horizon;
  f.base_ = base;
  f.harmonics_ = harmonics;
  f.validate_nondegenerate();
  f.build_checkpoints();
  return f;
}

VelocityField VelocityField::tabulated(const Eigen::VectorXd& times,
                                       const Eigen::Matrix2Xd& values) {
  if (times.size() < 2 || values.cols() != times.size())
    throw ValidationError("velocity: table needs >= 2 rows with matching shapes");
  if (times[0] != 0.0)
    throw ValidationError("velocity: table must start at t = 0");
  for (Eigen::Index i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw ValidationError("velocity: table times must be strictly increasing");
  VelocityField f;
  f.kind_ = FieldKind::Tabulated;
  f.horizon_ = times[times.size() - 1];
  f.table_times_ = times;
  f.table_values_ = values;
  f.validate_nondegenerate();
  f.build_checkpoints();
  return f;
}

Vec VelocityField::raw_at(double t) const {
  switch (kind_) {
    case FieldKind::Constant:
      return base_;
    case FieldKind::Rotation:
    case FieldKind::Composite: {
      Vec v = base_;
      if (kind_ == FieldKind::Rotation) v = Vec::Zero();
      for (const Harmonic& h : harmonics_) {
        const double a = h.rate * t + h.phase;
        v += h.amplitude * Vec(std::cos(a), std::sin(a));
      }
      return v;
    }
    case FieldKind::Tabulated: {
      const double tc = std::clamp(t, table_times_[0], horizon_);
      Eigen::Index hi = 1;
      while (hi < table_times_.size() - 1 && table_times_[hi] < tc) ++hi;
      const Eigen::Index lo = hi - 1;
      const double dt = table_times_[hi] - table_times_[lo];
      const double w = (tc - table_times_[lo]) / dt;
      return (1.0 - w) * table_values_.col(lo) + w * table_values_.col(hi);
    }
  }
  return Vec::Zero();
}

Vec VelocityField::at(double t) const {
  const double tol = horizon_tol(horizon_);
  if (t < -tol || t > horizon_ + tol)
    throw OutOfHorizon("velocity: t outside [0, horizon]");
  return raw_at(std::clamp(t, 0.0, horizon_));
}

Vec VelocityField::raw_derivative(double t) const {
  switch (kind_) {
    case FieldKind::Constant:
      return Vec::Zero();
    case FieldKind::Rotation:
    case FieldKind::Composite: {
      Vec v = Vec::Zero();
      for (const Harmonic& h : harmonics_) {
        const double a = h.rate * t + h.phase;
        v += h.amplitude * h.rate * Vec(-std::sin(a), std::cos(a));
      }
      return v;
    }
    case FieldKind::Tabulated: {
      const double step = 1e-6 * horizon_;
      const double lo = std::clamp(t - step, 0.0, horizon_);
      const double hi = std::clamp(t + step, 0.0, horizon_);
      return (raw_at(hi) - raw_at(lo)) / (hi - lo);
    }
  }
  return Vec::Zero();
}

Vec VelocityField::derivative(double t) const {
  const double tol = horizon_tol(horizon_);
  if (t < -tol || t > horizon_ + tol)
    throw OutOfHorizon("velocity: t outside [0, horizon]");
  return raw_derivative(std::clamp(t, 0.0, horizon_));
}

void VelocityField::validate_nondegenerate() const {
  const int n = 10001;
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double t = horizon_ * static_cast<double>(i) / (n - 1);
    lo = std::min(lo, raw_at(t).norm());
  }
  if (lo <= kDegenerateSpeed)
    throw DegenerateField("velocity: min |H| over the horizon is not positive");
}

void VelocityField::build_checkpoints() {
  const auto segments = std::min<Eigen::Index>(
      16384, std::max<Eigen::Index>(1024, 64 * static_cast<Eigen::Index>(
                                              std::ceil(horizon_))));
  cp_times_.resize(segments + 1);
  cp_disp_.resize(2, segments + 1);
  cp_disp_.col(0).setZero();
  cp_times_[0] = 0.0;
  for (Eigen::Index k = 1; k <= segments; ++k) {
    const double a = horizon_ * static_cast<double>(k - 1) / static_cast<double>(segments);
    const double b = horizon_ * static_cast<double>(k) / static_cast<double>(segments);
    cp_times_[k] = b;
    Vec inc;
    inc.x() = adaptive_simpson([this](double s) { return raw_at(s).x(); }, a, b, 1e-15);
    inc.y() = adaptive_simpson([this](double s) { return raw_at(s).y(); }, a, b, 1e-15);
    cp_disp_.col(k) = cp_disp_.col(k - 1) + inc;
  }
}

Vec VelocityField::displacement(double t) const {
  const double tol = horizon_tol(horizon_);
  if (t < -tol || t > horizon_ + tol)
    throw OutOfHorizon("displacement: t outside [0, horizon]");
  const double tc = std::clamp(t, 0.0, horizon_);
  const auto segments = cp_times_.size() - 1;
  const double seg_len = horizon_ / static_cast<double>(segments);
  auto k = std::min<Eigen::Index>(segments,
                                  static_cast<Eigen::Index>(std::floor(tc / seg_len)));
  const double a = cp_times_[k];
  Vec out = cp_disp_.col(k);
  if (tc > a) {
    out.x() += adaptive_simpson([this](double s) { return raw_at(s).x(); }, a, tc, 1e-13);
    out.y() += adaptive_simpson([this](double s) { return raw_at(s).y(); }, a, tc, 1e-13);
  }
  return out;
}

VelocityField::Bounds VelocityField::bounds(int n_samples) const {
  if (n_samples < 2) throw ValidationError("bounds: n_samples must be >= 2");
  const int n = n_samples;
  Eigen::VectorXd speed(n);
  for (int i = 0; i < n; ++i)
    speed[i] = raw_at(horizon_ * static_cast<double>(i) / (n - 1)).norm();
  Eigen::Index imin = 0, imax = 0;
  speed.minCoeff(&imin);
  speed.maxCoeff(&imax);

  auto refine = [&](Eigen::Index i, double sign) {
    const double dt = horizon_ / (n - 1);
    const double a = std::max(0.0, static_cast<double>(i) * dt - dt);
    const double b = std::min(horizon_, static_cast<double>(i) * dt + dt);
    const double t = golden_section_min(
        [&](double s) { return sign * raw_at(s).norm(); }, a, b, 1e-12 * std::max(1.0, horizon_));
    return raw_at(t).norm();
  };

  Bounds out{};
  out.h0 = std::min(speed[imin], refine(imin, +1.0));
  out.hstar = std::max(speed[imax], refine(imax, -1.0));
  if (out.h0 <= kDegenerateSpeed)
    throw DegenerateField("bounds: min |H| is not positive");
  return out;
}

double VelocityField::lipschitz_estimate(int n_samples, double safety) const {
  if (n_samples < 3) throw ValidationError("lipschitz_estimate: n_samples must be >= 3");
  if (!(safety >= 1.0)) throw ValidationError("lipschitz_estimate: safety must be >= 1");
  if (kind_ == FieldKind::Constant) return 0.0;
  if (kind_ == FieldKind::Tabulated) {
    double best = 0.0;
    for (Eigen::Index i = 1; i < table_times_.size(); ++i) {
      const double dt = table_times_[i] - table_times_[i - 1];
      best = std::max(best,
                      (table_values_.col(i) - table_values_.col(i - 1)).norm() / dt);
    }
    return best * safety;
  }
  double best = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const double t = horizon_ * static_cast<double>(i) / (n_samples - 1);
    best = std::max(best, raw_derivative(t).norm());
  }
  return best * safety;
}

std::string VelocityField::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case FieldKind::Constant:
      os << "constant (" << base_.x() << ", " << base_.y() << ")";
      break;
    case FieldKind::Rotation:
      os << "rotation speed " << harmonics_[0].amplitude << " rate "
         << harmonics_[0].rate;
      break;
    case FieldKind::Composite:
      os << "composite with " << harmonics_.size() << " harmonics";
      break;
    case FieldKind::Tabulated:
      os << "tabulated with " << table_times_.size() << " samples";
      break;
  }
  os << " on [0, " << horizon_ << "]";
  return os.str();
}

}  // namespace carlab
