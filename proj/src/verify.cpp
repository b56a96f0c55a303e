#include "carlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "carlab/errors.hpp"
#include "carlab/quadrature.hpp"

namespace carlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_setup(const SolutionField& sol, const CarlemanWeight& w) {
  const Domain& a = sol.domain;
  const Domain& b = w.domain;
  if (a.kind() != b.kind() ||
      std::abs(a.diameter() - b.diameter()) > 1e-12 * std::max(1.0, a.diameter()) ||
      (a.centroid() - b.centroid()).norm() > 1e-9)
    throw GridMismatch("weight and solution disagree on the domain");
  const double T = w.partition.times[w.partition.times.size() - 1];
  if (std::abs(T - sol.field.horizon()) > 1e-9 * std::max(1.0, T))
    throw GridMismatch("weight partition and solution field disagree on the horizon");
}

// phi ranges over [mu_j^2 - beta dt_j, upper_j^2] on interval j
std::pair<double, double> phi_extremes(const CarlemanWeight& w) {
  double lo = kInf, hi = -kInf;
  for (Eigen::Index j = 0; j < w.intervals(); ++j) {
    const double dt = w.partition.times[j + 1] - w.partition.times[j];
    lo = std::min(lo, w.mu[j] * w.mu[j] - w.beta * dt);
    hi = std::max(hi, w.upper[j] * w.upper[j]);
  }
  return {lo, hi};
}

// minimal C >= 1 with C*res + C s e^{(C - 2 phi_max) s} g >= lhs; all terms
// carry the common e^{-2 s phi_max} scaling. Monotone and unbounded in C,
// so bracket doubling plus bisection terminates. Returns +inf when the
// right-hand side is identically zero against a positive left-hand side.
double minimal_c(double lhs, double res, double g, double s, double phi_max) {
  if (!(lhs > 0.0)) return 1.0;
  if (res <= 0.0 && g <= 0.0) return kInf;
  const auto holds = [&](double c) {
    double rhs = c * res;
    if (g > 0.0) rhs += c * s * std::exp((c - 2.0 * phi_max) * s) * g;
    return rhs >= lhs;
  };
  if (holds(1.0)) return 1.0;
  double lo = 1.0, hi = 2.0;
  while (!holds(hi)) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (holds(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double trace_norm2(const SolutionField& sol) {
  const Eigen::Index nt = sol.times.size();
  Eigen::VectorXd per_time(nt);
  for (Eigen::Index k = 0; k < nt; ++k)
    per_time[k] = weighted_sum(sol.boundary.weights, [&](std::ptrdiff_t b) {
      const double v = sol.boundary_values(b, k);
      return v * v;
    });
  double total = 0.0;
  for (Eigen::Index k = 1; k < nt; ++k)
    total += 0.5 * (per_time[k] + per_time[k - 1]) * (sol.times[k] - sol.times[k - 1]);
  return total;
}

Eigen::VectorXd slice_energies(const SolutionField& sol) {
  Eigen::VectorXd e(sol.times.size());
  for (Eigen::Index k = 0; k < sol.times.size(); ++k)
    e[k] = weighted_sum(sol.grid.weights, [&](std::ptrdiff_t i) {
      const double v = sol.interior_values(i, k);
      return v * v;
    });
  return e;
}

}  // namespace

CarlemanReport carleman_report(const SolutionField& solution,
                               const CarlemanWeight& weight,
                               const std::vector<double>& s_values, double c0,
                               int time_subdivisions) {
  if (!solution.field.is_c1())
    throw NotC1("carleman_report: the estimate requires a C1 velocity field");
  if (s_values.empty()) throw ValidationError("carleman_report: empty s grid");
  for (size_t k = 0; k < s_values.size(); ++k) {
    if (!(s_values[k] > 0.0))
      throw ValidationError("carleman_report: s values must be positive");
    if (k > 0 && !(s_values[k] > s_values[k - 1]))
      throw ValidationError("carleman_report: s values must be increasing");
  }
  if (time_subdivisions < 2)
    throw ValidationError("carleman_report: time_subdivisions must be >= 2");
  require_same_setup(solution, weight);

  const int nsub = time_subdivisions + (time_subdivisions % 2);
  const Eigen::Index m = weight.intervals();
  const Eigen::Index ng = solution.grid.size();
  const Eigen::Index nb = solution.boundary.size();

  CarlemanReport rep;
  rep.s_values = s_values;
  rep.c0 = c0;
  rep.time_subdivisions = nsub;
  const auto [pmin, pmax] = phi_extremes(weight);
  rep.phi_min = pmin;
  rep.phi_max = pmax;

  Eigen::MatrixXd d2(ng, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const Vec apex = weight.apexes.col(j);
    for (Eigen::Index i = 0; i < ng; ++i)
      d2(i, j) = (Vec(solution.grid.nodes.col(i)) - apex).squaredNorm();
  }

  // tensor caches over (interval, Simpson time node)
  const Eigen::Index ntn = m * (nsub + 1);
  Eigen::VectorXd node_t(ntn), node_wt(ntn);
  Eigen::VectorXi node_j(ntn);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double a = weight.partition.times[j];
    const double b = weight.partition.times[j + 1];
    const Eigen::VectorXd wts = simpson_weights(nsub + 1, (b - a) / nsub);
    for (int k = 0; k <= nsub; ++k) {
      const Eigen::Index idx = j * (nsub + 1) + k;
      node_t[idx] = a + (b - a) * static_cast<double>(k) / nsub;
      node_wt[idx] = wts[k];
      node_j[idx] = static_cast<int>(j);
    }
  }

  Eigen::MatrixXd u2(ng, ntn);
  Eigen::MatrixXd res2;
  if (!solution.exact()) res2.resize(ng, ntn);
  Eigen::VectorXd exit_sum(ntn);
  for (Eigen::Index k = 0; k < ntn; ++k) {
    const double t = node_t[k];
    for (Eigen::Index i = 0; i < ng; ++i) {
      const double u = solution.rule(solution.grid.nodes.col(i), t);
      u2(i, k) = u * u;
      if (!solution.exact()) {
        const double r = solution.residual(solution.grid.nodes.col(i), t);
        res2(i, k) = r * r;
      }
    }
    const Vec h = solution.field.at(t);
    exit_sum[k] = pairwise_map_sum(0, nb, [&](std::ptrdiff_t b) {
      if (h.dot(solution.boundary.normals.col(b)) < 0.0) return 0.0;
      const double g = solution.rule(solution.boundary.nodes.col(b), t);
      return solution.boundary.weights[b] * g * g;
    });
  }

  rep.sigma_term = pairwise_map_sum(
      0, ntn, [&](std::ptrdiff_t k) { return node_wt[k] * exit_sum[k]; });
  rep.slices = pairwise_map_sum(0, m, [&](std::ptrdiff_t j) {
    const Eigen::Index k0 = j * (nsub + 1);
    return weighted_sum(solution.grid.weights,
                        [&](std::ptrdiff_t i) { return u2(i, k0); });
  });
  {
    const Eigen::Index klast = ntn - 1;
    rep.final_term = weighted_sum(solution.grid.weights,
                                  [&](std::ptrdiff_t i) { return u2(i, klast); });
  }

  const auto s_count = static_cast<Eigen::Index>(s_values.size());
  rep.bulk_scaled.resize(s_count);
  rep.residual_scaled.setZero(s_count);
  rep.c_of_s.resize(s_count);
  for (Eigen::Index is = 0; is < s_count; ++is) {
    const double s = s_values[static_cast<size_t>(is)];
    const auto weighted_time_sum = [&](const Eigen::MatrixXd& sq) {
      return pairwise_map_sum(0, ntn, [&](std::ptrdiff_t k) {
        const Eigen::Index j = node_j[k];
        const double drift = std::exp(-2.0 * s * weight.beta *
                                      (node_t[k] - weight.partition.times[j]));
        const double inner =
            weighted_sum(solution.grid.weights, [&](std::ptrdiff_t i) {
              return sq(i, k) * std::exp(2.0 * s * (d2(i, j) - rep.phi_max));
            });
        return node_wt[k] * drift * inner;
      });
    };
    rep.bulk_scaled[is] = s * s * weighted_time_sum(u2);
    if (!solution.exact()) rep.residual_scaled[is] = weighted_time_sum(res2);

    const double lhs = rep.bulk_scaled[is] +
                       s * std::exp(-(c0 + 2.0 * rep.phi_max) * s) * rep.slices;
    rep.c_of_s[is] = minimal_c(lhs, rep.residual_scaled[is],
                               rep.sigma_term + rep.final_term, s, rep.phi_max);
  }
  return rep;
}

std::vector<double> default_s_grid(const CarlemanWeight& weight,
                                   const VelocityField& field,
                                   const QuadratureGrid& grid, int count) {
  if (count < 2) throw ValidationError("default_s_grid: count must be >= 2");
  const auto probe = logspace(0.5, 64.0, 25);
  const double s0 = estimate_s0(weight, field, grid, probe).s0;
  const double s_lo = std::max(1.0, s0);
  const auto [pmin, pmax] = phi_extremes(weight);
  const double range = std::max(pmax - pmin, 1e-12);
  const double s_hi = std::max(4.0 * s_lo, 25.0 / range);
  return logspace(s_lo, s_hi, count);
}

EnergyProfile energy_profile(const SolutionField& solution) {
  if (solution.times.size() < 2)
    throw ValidationError("energy_profile: needs >= 2 time slices");
  EnergyProfile prof;
  prof.times = solution.times;
  prof.energy = slice_energies(solution);
  const Eigen::Index nt = solution.times.size();
  prof.flux.resize(nt);
  for (Eigen::Index k = 0; k < nt; ++k) {
    const Vec h = solution.field.at(solution.times[k]);
    prof.flux[k] = weighted_sum(solution.boundary.weights, [&](std::ptrdiff_t b) {
      const double v = solution.boundary_values(b, k);
      return h.dot(solution.boundary.normals.col(b)) * v * v;
    });
  }
  prof.identity_residual.resize(nt);
  double cumulative = 0.0;
  prof.identity_residual[0] = 0.0;
  for (Eigen::Index k = 1; k < nt; ++k) {
    cumulative += 0.5 * (prof.flux[k] + prof.flux[k - 1]) *
                  (solution.times[k] - solution.times[k - 1]);
    prof.identity_residual[k] = prof.energy[k] - prof.energy[0] + cumulative;
  }

  prof.hstar = solution.field.bounds().hstar;
  prof.g_norm2 = trace_norm2(solution);

  const double sup_u2 = std::max(solution.interior_values.array().square().maxCoeff(),
                                 solution.boundary_values.size() > 0
                                     ? solution.boundary_values.array().square().maxCoeff()
                                     : 0.0);
  const double vol_defect =
      std::abs(pairwise_sum(solution.grid.weights) - solution.domain.volume());
  double dt_max = 0.0;
  for (Eigen::Index k = 1; k < nt; ++k)
    dt_max = std::max(dt_max, solution.times[k] - solution.times[k - 1]);
  prof.tau_q = sup_u2 * (vol_defect +
                         solution.grid.resolution * solution.domain.perimeter()) +
               dt_max * prof.flux.cwiseAbs().maxCoeff();

  const double budget = prof.hstar * prof.g_norm2;
  prof.upper_worst_slack = kInf;
  prof.lower_worst_slack = kInf;
  for (Eigen::Index k = 0; k < nt; ++k) {
    prof.upper_worst_slack =
        std::min(prof.upper_worst_slack, prof.energy[0] + budget - prof.energy[k]);
    prof.lower_worst_slack =
        std::min(prof.lower_worst_slack, prof.energy[k] + budget - prof.energy[0]);
  }
  return prof;
}

ObservabilityReport observability_ratio(const std::vector<SolutionField>& solutions,
                                        const CarlemanWeight& weight,
                                        const VelocityField& field) {
  if (solutions.empty())
    throw ValidationError("observability_ratio: no solutions given");
  ObservabilityReport rep;
  const auto n = static_cast<Eigen::Index>(solutions.size());
  rep.ratios.resize(n);
  rep.peak_norms.resize(n);
  rep.trace_norms.resize(n);
  bool any_infinite = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    const SolutionField& sol = solutions[static_cast<size_t>(i)];
    require_same_setup(sol, weight);
    rep.peak_norms[i] = std::sqrt(slice_energies(sol).maxCoeff());
    rep.trace_norms[i] = std::sqrt(trace_norm2(sol));
    if (rep.trace_norms[i] <= 1e-12 * rep.peak_norms[i]) {
      rep.ratios[i] = kInf;
      any_infinite = true;
    } else {
      rep.ratios[i] = rep.peak_norms[i] / rep.trace_norms[i];
    }
  }
  rep.family_sup = rep.ratios.maxCoeff();
  rep.certificate = observability_condition(weight, field);
  if (any_infinite)
    rep.verdict = "observability fails";
  else if (rep.certificate.holds)
    rep.verdict = "time condition holds";
  else
    rep.verdict = "time condition fails";
  return rep;
}

WindowCheck extend_window_check(const SolutionField& solution, double s1,
                                double s2, double c_window) {
  const double T = solution.field.horizon();
  const double tol = 1e-9 * std::max(1.0, T);
  if (!(s1 >= -tol && s1 < s2 && s2 <= T + tol))
    throw WindowOutOfRange("extend_window_check: need 0 <= s1 < s2 <= T");

  WindowCheck chk;
  const Eigen::VectorXd energy = slice_energies(solution);
  const double g2 = trace_norm2(solution);
  const double peak = std::sqrt(energy.maxCoeff());
  if (std::sqrt(g2) <= 1e-12 * peak) {
    chk.skipped = true;
    chk.ok = true;
    return chk;
  }

  const double hstar = solution.field.bounds().hstar;
  chk.bound_before = std::sqrt(c_window * c_window + 2.0 * hstar);
  chk.bound_after = std::sqrt(c_window * c_window + hstar);

  double in_sup2 = 0.0, before_sup2 = 0.0, after_sup2 = 0.0;
  for (Eigen::Index k = 0; k < solution.times.size(); ++k) {
    const double t = solution.times[k];
    const double r2 = energy[k] / g2;
    if (t >= s1 - tol && t <= s2 + tol) in_sup2 = std::max(in_sup2, r2);
    if (t <= s1 + tol) before_sup2 = std::max(before_sup2, r2);
    if (t >= s2 - tol) after_sup2 = std::max(after_sup2, r2);
  }
  chk.in_window_sup = std::sqrt(in_sup2);
  chk.before_sup = std::sqrt(before_sup2);
  chk.after_sup = std::sqrt(after_sup2);

  // the two-sided energy bound transfers between any two slices up to the
  // measured identity residual; allow exactly that quadrature slack
  double res_max = 0.0;
  {
    const EnergyProfile prof = energy_profile(solution);
    res_max = prof.identity_residual.cwiseAbs().maxCoeff();
  }
  const double allowance = (2.0 * res_max + 1e-15) / g2;
  chk.premise_holds = in_sup2 <= c_window * c_window + allowance;
  chk.ok = chk.premise_holds &&
           before_sup2 <= chk.bound_before * chk.bound_before + allowance &&
           after_sup2 <= chk.bound_after * chk.bound_after + allowance;
  return chk;
}

FitResult fit_constants(const std::vector<CarlemanReport>& fit,
                        const std::vector<CarlemanReport>& holdout) {
  if (fit.empty() || holdout.empty())
    throw ValidationError("fit_constants: both report sets must be nonempty");
  const CarlemanReport& ref = fit.front();
  const auto same_axes = [&](const CarlemanReport& r) {
    if (r.s_values.size() != ref.s_values.size()) return false;
    for (size_t k = 0; k < r.s_values.size(); ++k)
      if (std::abs(r.s_values[k] - ref.s_values[k]) > 1e-12 * ref.s_values[k])
        return false;
    return std::abs(r.phi_max - ref.phi_max) <= 1e-9 * (1.0 + std::abs(ref.phi_max));
  };
  for (const auto& r : fit)
    if (!same_axes(r)) throw GridMismatch("fit_constants: fit reports disagree on the s grid");
  for (const auto& r : holdout)
    if (!same_axes(r)) throw GridMismatch("fit_constants: holdout reports disagree on the s grid");

  FitResult out;
  out.c_uniform = 1.0;
  for (const auto& r : fit) out.c_uniform = std::max(out.c_uniform, r.c_of_s.maxCoeff());
  out.valid_on_holdout = true;
  for (const auto& r : holdout)
    if (!(r.c_of_s.maxCoeff() <= out.c_uniform * (1.0 + 1e-12)))
      out.valid_on_holdout = false;
  return out;
}

std::vector<SolutionField> manufactured_family(
    const Domain& domain, const VelocityField& field,
    const QuadratureGrid& grid, const BoundaryGrid& boundary,
    const Eigen::VectorXd& times, int count, unsigned long long seed,
    bool gaussians_only) {
  if (count < 1) throw ValidationError("manufactured_family: count must be >= 1");
  std::mt19937_64 eng(seed);
  // canonical doubles straight off the engine keep the family identical
  // across standard libraries
  const auto u01 = [&eng]() {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
  };
  const double diam = domain.diameter();
  const Vec c0 = domain.centroid();

  // The first half is a fixed stress set so that the leading members bound
  // the minimal constant for any randomized tail: the weight is largest at
  // the boundary point the flow points toward, so a narrow bump there
  // maximizes the weighted bulk relative to its own trace.
  const Vec eta0 = field.at(0.0).normalized();
  Vec x_ext = boundary.nodes.col(0);
  for (Eigen::Index i = 1; i < boundary.size(); ++i)
    if (boundary.nodes.col(i).dot(eta0) > x_ext.dot(eta0))
      x_ext = boundary.nodes.col(i);
  const Vec perp(-eta0.y(), eta0.x());

  struct Member {
    Vec center;
    double width;
    double amp;
  };
  const Member designed[] = {
      {x_ext, 0.12 * diam, 1.0},
      {c0, 0.6 * diam, 1.0},
      {c0 + 0.5 * (x_ext - c0), 0.18 * diam, 1.5},
      {c0 - 0.35 * (x_ext - c0), 0.3 * diam, 1.0},
      {c0 + 0.25 * diam * perp, 0.25 * diam, 1.2},
  };
  const int n_designed = std::min((count + 1) / 2, 5);

  std::vector<SolutionField> family;
  family.reserve(static_cast<size_t>(count));
  for (int idx = 0; idx < count; ++idx) {
    SpaceFn profile;
    if (idx < n_designed) {
      const Member& m = designed[idx];
      if (!gaussians_only && idx == 4) {
        const SpaceFn trig = trig_product(2.5 / diam, 1.5 / diam);
        const double amp = m.amp;
        profile = [trig, amp](const Vec& x) { return amp * trig(x); };
      } else {
        const SpaceFn gauss = gaussian_profile(m.center, m.width);
        const double amp = m.amp;
        profile = [gauss, amp](const Vec& x) { return amp * gauss(x); };
      }
    } else {
      const double angle = 2.0 * std::numbers::pi * u01();
      const double rad = 0.25 * diam * u01();
      const Vec center = c0 + rad * Vec(std::cos(angle), std::sin(angle));
      const double width = (0.25 + 0.2 * u01()) * diam;
      const double amp = 0.5 + u01();
      const SpaceFn gauss = gaussian_profile(center, width);
      profile = [gauss, amp](const Vec& x) { return amp * gauss(x); };
    }
    family.push_back(
        manufactured_solution(profile, field, domain, grid, boundary, times));
  }
  return family;
}

}  // namespace carlab
