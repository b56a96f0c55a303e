#include "carlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "carlab/errors.hpp"

namespace carlab {

namespace {

// Last entry time of the backward trace y(s) = x - (X(t) - X(s)) into the
// domain: scan s from t downward, bracket the first sign change of the
// signed distance, and bisect. Returns negative when the trace never leaves.
// The signed distance is 1-Lipschitz and the remaining travel is at most
// hstar * s, so the scan stops early once sd <= -hstar * s: no later sample
// could cross the boundary.
double last_entry_time(const Domain& domain, const VelocityField& field,
                       const Vec& x, double t, const Vec& xt_disp,
                       int scan_steps, double hstar) {
  if (t <= 0.0) return -1.0;
  const auto trace = [&](double s) { return x - (xt_disp - field.displacement(s)); };
  double s_in = t;
  double sd_in = domain.signed_distance(trace(s_in));
  if (sd_in <= -hstar * t) return -1.0;
  double s_out = -1.0;
  for (int k = 1; k <= scan_steps; ++k) {
    const double s = t * (1.0 - static_cast<double>(k) / scan_steps);
    const double sd = domain.signed_distance(trace(s));
    if (sd > 0.0 && sd_in <= 0.0) {
      s_out = s;
      break;
    }
    if (sd <= -hstar * s) return -1.0;
    s_in = s;
    sd_in = sd;
  }
  if (s_out < 0.0) return -1.0;

  double lo = s_out, hi = s_in;  // sd(lo) > 0 >= sd(hi)
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (domain.signed_distance(trace(mid)) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

}  // namespace

SolutionField SolutionField::scaled(double lambda) const {
  SolutionField out = *this;
  out.interior_values *= lambda;
  out.boundary_values *= lambda;
  const SpaceTimeFn base_rule = rule;
  out.rule = [base_rule, lambda](const Vec& x, double t) {
    return lambda * base_rule(x, t);
  };
  if (residual) {
    const SpaceTimeFn base_res = residual;
    out.residual = [base_res, lambda](const Vec& x, double t) {
      return lambda * base_res(x, t);
    };
  }
  return out;
}

SolutionField make_solution(const Domain& domain, const VelocityField& field,
                            const QuadratureGrid& grid,
                            const BoundaryGrid& boundary,
                            const Eigen::VectorXd& times, SpaceTimeFn rule,
                            SpaceTimeFn residual, std::string provenance) {
  if (times.size() < 1) throw ValidationError("make_solution: needs >= 1 time");
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    if (times[k] < -1e-12 || times[k] > field.horizon() + 1e-9 * std::max(1.0, field.horizon()))
      throw OutOfHorizon("make_solution: time sample outside [0, T]");
    if (k > 0 && !(times[k] > times[k - 1]))
      throw ValidationError("make_solution: times must be strictly increasing");
  }
  SolutionField sol{domain, field, grid, boundary, times};
  sol.rule = std::move(rule);
  sol.residual = std::move(residual);
  sol.provenance = std::move(provenance);
  sol.interior_values.resize(grid.size(), times.size());
  sol.boundary_values.resize(boundary.size(), times.size());
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    const double t = times[k];
    for (Eigen::Index i = 0; i < grid.size(); ++i)
      sol.interior_values(i, k) = sol.rule(grid.nodes.col(i), t);
    for (Eigen::Index i = 0; i < boundary.size(); ++i)
      sol.boundary_values(i, k) = sol.rule(boundary.nodes.col(i), t);
  }
  return sol;
}

SolutionField manufactured_solution(const SpaceFn& profile,
                                    const VelocityField& field,
                                    const Domain& domain,
                                    const QuadratureGrid& grid,
                                    const BoundaryGrid& boundary,
                                    const Eigen::VectorXd& times) {
  VelocityField f = field;
  SpaceFn F = profile;
  SpaceTimeFn rule = [f, F](const Vec& x, double t) {
    return F(x - f.displacement(t));
  };
  return make_solution(domain, field, grid, boundary, times, std::move(rule),
                       SpaceTimeFn{}, "manufactured");
}

SolutionField solve_characteristics(const Domain& domain,
                                    const VelocityField& field,
                                    const SpaceFn& u0, const SpaceTimeFn& g,
                                    const QuadratureGrid& grid,
                                    const BoundaryGrid& boundary,
                                    const Eigen::VectorXd& times) {
  const int scan_steps = 2048;
  if (times.size() < 1)
    throw ValidationError("solve_characteristics: needs >= 1 time");
  const double tol = 1e-9 * std::max(1.0, field.horizon());
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    if (times[k] < -tol || times[k] > field.horizon() + tol)
      throw OutOfHorizon("solve_characteristics: time sample outside [0, T]");
    if (k > 0 && !(times[k] > times[k - 1]))
      throw ValidationError("solve_characteristics: times must be strictly increasing");
  }

  SolutionField sol{domain, field, grid, boundary, times};
  sol.provenance = "characteristics";
  const double hstar = field.bounds().hstar;
  {
    Domain dom = domain;
    VelocityField f = field;
    SpaceFn ic = u0;
    SpaceTimeFn bc = g;
    sol.rule = [dom, f, ic, bc, scan_steps, hstar](const Vec& x, double t) {
      const Vec xt = f.displacement(t);
      const double s = last_entry_time(dom, f, x, t, xt, scan_steps, hstar);
      if (s < 0.0) return ic(x - xt);
      return bc(x - (xt - f.displacement(s)), s);
    };
  }

  sol.interior_values.resize(grid.size(), times.size());
  sol.boundary_values.resize(boundary.size(), times.size());
  std::vector<Vec> disp(static_cast<size_t>(scan_steps) + 1);
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    const double t = std::clamp(times[k], 0.0, field.horizon());
    // scan displacements are node independent; amortize them per slice
    for (int i = 0; i <= scan_steps; ++i)
      disp[static_cast<size_t>(i)] =
          field.displacement(t * (1.0 - static_cast<double>(i) / scan_steps));

    const auto value_at = [&](const Vec& x) {
      const Vec base = x - disp[0];  // disp[0] = X(t)
      double sd_prev = domain.signed_distance(x);
      int hit = -1;
      // same Lipschitz pruning as the on-demand rule: once the trace sits
      // deeper inside than the remaining travel hstar * s it cannot exit
      if (!(sd_prev <= -hstar * t)) {
        for (int i = 1; i <= scan_steps; ++i) {
          const double sd =
              domain.signed_distance(base + disp[static_cast<size_t>(i)]);
          if (sd > 0.0 && sd_prev <= 0.0) {
            hit = i;
            break;
          }
          const double s = t * (1.0 - static_cast<double>(i) / scan_steps);
          if (sd <= -hstar * s) break;
          sd_prev = sd;
        }
      }
      if (hit < 0) return u0(base);  // X(0) = 0: the trace foot is x - X(t)
      double lo = t * (1.0 - static_cast<double>(hit) / scan_steps);      // outside
      double hi = t * (1.0 - static_cast<double>(hit - 1) / scan_steps);  // inside
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (domain.signed_distance(base + field.displacement(mid)) > 0.0)
          lo = mid;
        else
          hi = mid;
      }
      return g(base + field.displacement(hi), hi);
    };

    for (Eigen::Index i = 0; i < grid.size(); ++i)
      sol.interior_values(i, k) = value_at(grid.nodes.col(i));
    for (Eigen::Index i = 0; i < boundary.size(); ++i)
      sol.boundary_values(i, k) = value_at(boundary.nodes.col(i));
  }

  // inflow compatibility of the data at t = 0 (warning, not an error)
  const Vec h0 = field.at(0.0);
  double gap = 0.0;
  for (Eigen::Index i = 0; i < boundary.size(); ++i) {
    if (h0.dot(boundary.normals.col(i)) >= 0.0) continue;
    const Vec x = boundary.nodes.col(i);
    gap = std::max(gap, std::abs(g(x, 0.0) - u0(x)));
  }
  sol.compatibility_gap = gap;
  return sol;
}

TraceField boundary_trace(const SolutionField& solution) {
  TraceField trace;
  trace.values = solution.boundary_values;
  const Eigen::Index nb = solution.boundary.size();
  const Eigen::Index nt = solution.times.size();
  trace.flow_normal_dot.resize(nb, nt);
  trace.exit_mask.resize(nb, nt);
  for (Eigen::Index k = 0; k < nt; ++k) {
    const Vec h = solution.field.at(solution.times[k]);
    for (Eigen::Index i = 0; i < nb; ++i) {
      const double dot = h.dot(solution.boundary.normals.col(i));
      trace.flow_normal_dot(i, k) = dot;
      trace.exit_mask(i, k) = dot >= 0.0;
    }
  }
  return trace;
}

CounterexampleScenario rotating_bump_counterexample(double sigma, double rho,
                                                    const SpaceFn& bump,
                                                    double horizon) {
  if (!(sigma > 0.0)) throw ValidationError("counterexample: sigma must be positive");
  if (!(rho > 0.0 && rho < 2.0 * sigma / 3.0))
    throw RhoOutOfRange("counterexample: rho must lie in (0, 2 sigma / 3)");
  const double T = horizon > 0.0 ? horizon : 2.0 * std::numbers::pi;
  // derivative of t -> (rho cos t, rho sin t): speed rho, phase pi/2
  CounterexampleScenario sc{Domain::disk(Vec::Zero(), sigma),
                            VelocityField::rotation(rho, 1.0, 0.5 * std::numbers::pi, T)};
  sc.horizon = T;
  sc.support_radius = 0.5 * rho;
  const SpaceFn profile = bump ? bump : smooth_bump(Vec::Zero(), sc.support_radius);
  const Vec center(rho, 0.0);
  sc.u0 = [profile, center](const Vec& x) { return profile(x - center); };
  sc.g = [](const Vec&, double) { return 0.0; };
  return sc;
}

SpaceFn gaussian_profile(const Vec& center, double width) {
  if (!(width > 0.0)) throw ValidationError("gaussian_profile: width must be positive");
  return [center, width](const Vec& x) {
    return std::exp(-(x - center).squaredNorm() / (width * width));
  };
}

SpaceFn smooth_bump(const Vec& center, double radius) {
  if (!(radius > 0.0)) throw ValidationError("smooth_bump: radius must be positive");
  return [center, radius](const Vec& x) {
    const double r2 = (x - center).squaredNorm() / (radius * radius);
    if (r2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r2));
  };
}

SpaceFn trig_product(double kx, double ky) {
  return [kx, ky](const Vec& x) { return std::cos(kx * x.x()) * std::cos(ky * x.y()); };
}

SpaceFn linear_profile(const Vec& slope, double offset) {
  return [slope, offset](const Vec& x) { return slope.dot(x) + offset; };
}

}  // namespace carlab
