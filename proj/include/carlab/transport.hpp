#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "carlab/geometry.hpp"
#include "carlab/velocity.hpp"

namespace carlab {

using SpaceFn = std::function<double(const Vec&)>;
using SpaceTimeFn = std::function<double(const Vec&, double)>;

// Space-time scalar field sampled on an interior grid and a boundary grid at
// the listed times, plus the generating rule for on-demand evaluation at
// arbitrary (x, t). `residual` is the transport operator applied to the
// rule; an empty residual means the field solves the equation exactly.
struct SolutionField {
  Domain domain;
  VelocityField field;
  QuadratureGrid grid;
  BoundaryGrid boundary;
  Eigen::VectorXd times;
  Eigen::MatrixXd interior_values;  // grid.size() x times.size()
  Eigen::MatrixXd boundary_values;  // boundary.size() x times.size()
  SpaceTimeFn rule;
  SpaceTimeFn residual;  // empty when the rule is an exact solution
  std::string provenance;
  double compatibility_gap = 0.0;  // max |g - u0| mismatch at inflow, t = 0

  double value(const Vec& x, double t) const { return rule(x, t); }
  bool exact() const { return !residual; }

  // Same field scaled by lambda (values, rule, and residual).
  SolutionField scaled(double lambda) const;
};

// Boundary restriction with the exit-set classification: mask(i, k) is true
// iff H(times[k]) . normal(i) >= 0.
struct TraceField {
  Eigen::MatrixXd values;                              // boundary x times
  Eigen::MatrixXd flow_normal_dot;                     // H(t) . nu(x)
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> exit_mask;
};

// Assembles a SolutionField by evaluating `rule` on both grids at all times.
// Building block for manufactured and synthetic (nonzero-residual) fields.
SolutionField make_solution(const Domain& domain, const VelocityField& field,
                            const QuadratureGrid& grid,
                            const BoundaryGrid& boundary,
                            const Eigen::VectorXd& times, SpaceTimeFn rule,
                            SpaceTimeFn residual, std::string provenance);

// u(x, t) = profile(x - X(t)): exact solution with zero residual whose
// boundary data is the profile's own trace.
SolutionField manufactured_solution(const SpaceFn& profile,
                                    const VelocityField& field,
                                    const Domain& domain,
                                    const QuadratureGrid& grid,
                                    const BoundaryGrid& boundary,
                                    const Eigen::VectorXd& times);

// Method of characteristics for interior data u0 and boundary data g: each
// value is read off the backward trace, from u0 when the trace stays inside
// until t = 0 and from g at the last boundary entry otherwise. Entry times
// are bisected on the signed distance to 1e-12.
SolutionField solve_characteristics(const Domain& domain,
                                    const VelocityField& field,
                                    const SpaceFn& u0, const SpaceTimeFn& g,
                                    const QuadratureGrid& grid,
                                    const BoundaryGrid& boundary,
                                    const Eigen::VectorXd& times);

TraceField boundary_trace(const SolutionField& solution);

// Rigidly rotating compactly supported bump with zero boundary data: the
// classical scenario where interior energy persists while every boundary
// observation vanishes.
struct CounterexampleScenario {
  Domain domain;            // disk of radius sigma at the origin
  VelocityField field;      // derivative of the circular motion, speed rho
  SpaceFn u0;               // bump centered at (rho, 0), radius rho/2
  SpaceTimeFn g;            // identically zero
  double horizon = 0.0;
  double support_radius = 0.0;
};

// Throws RhoOutOfRange unless 0 < rho < 2 sigma / 3 (keeps the rotating
// support strictly inside the disk). `bump`, when given, must be supported
// in the ball of radius rho/2 around the origin.
CounterexampleScenario rotating_bump_counterexample(double sigma, double rho,
                                                    const SpaceFn& bump = {},
                                                    double horizon = 0.0);

// Profile library for fixtures.
SpaceFn gaussian_profile(const Vec& center, double width);          // e^{-|x-c|^2 / w^2}
SpaceFn smooth_bump(const Vec& center, double radius);              // C-infinity cutoff
SpaceFn trig_product(double kx, double ky);                         // cos(kx x) cos(ky y)
SpaceFn linear_profile(const Vec& slope, double offset);            // a . x + b

}  // namespace carlab
