#include <doctest.h>

#include <cmath>
#include <limits>

#include "carlab/errors.hpp"
#include "carlab/quadrature.hpp"
#include "carlab/transport.hpp"
#include "carlab/verify.hpp"
#include "carlab/weight.hpp"

using namespace carlab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Unit disk, constant rightward field, single-interval partition. Same
// closed forms as in the weight tests: mu = 17, upper = 19, beta = 4.76.
struct Fixture {
  Domain domain = Domain::disk(Vec::Zero(), 1.0);
  VelocityField field = VelocityField::constant(Vec(1.0, 0.0), 2.0);
  ConePartition partition = uniform_partition(field, 0.8);
  CarlemanWeight weight = build_weight(domain, field, partition, 2.0);
  QuadratureGrid grid = domain.interior_grid(0.1);
  BoundaryGrid boundary = domain.boundary_grid(0.05);
};

Eigen::VectorXd uniform_times(double T, int n) {
  return Eigen::VectorXd::LinSpaced(n, 0.0, T);
}

// Mirrors the trapezoid-in-time boundary accumulation of the library so the
// window checks can be pinned against an independently summed value.
double trace_norm2_oracle(const SolutionField& sol) {
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

Eigen::VectorXd slice_energies_oracle(const SolutionField& sol) {
  Eigen::VectorXd e(sol.times.size());
  for (Eigen::Index k = 0; k < sol.times.size(); ++k)
    e[k] = weighted_sum(sol.grid.weights, [&](std::ptrdiff_t i) {
      const double v = sol.interior_values(i, k);
      return v * v;
    });
  return e;
}

// Re-evaluates the closing predicate of the estimate from the report's own
// ledger entries, with the identical expression used by the bisection.
bool estimate_holds(const CarlemanReport& rep, Eigen::Index is, double c) {
  const double s = rep.s_values[static_cast<size_t>(is)];
  const double lhs = rep.bulk_scaled[is] +
                     s * std::exp(-(rep.c0 + 2.0 * rep.phi_max) * s) * rep.slices;
  const double g = rep.sigma_term + rep.final_term;
  double rhs = c * rep.residual_scaled[is];
  if (g > 0.0) rhs += c * s * std::exp((c - 2.0 * rep.phi_max) * s) * g;
  return rhs >= lhs;
}

}  // namespace

TEST_CASE("carleman report pins the term integrals for the constant solution") {
  Fixture f;
  const Eigen::VectorXd times = uniform_times(2.0, 9);
  const SolutionField sol = manufactured_solution(
      linear_profile(Vec::Zero(), 1.0), f.field, f.domain, f.grid, f.boundary, times);
  REQUIRE(sol.exact());

  const std::vector<double> s_values = {0.5, 1.0, 2.0};
  const CarlemanReport rep = carleman_report(sol, f.weight, s_values, 1.0, 8);

  CHECK(rep.phi_max == doctest::Approx(361.0).epsilon(1e-13));
  CHECK(rep.phi_min == doctest::Approx(289.0 - 2.0 * 4.76).epsilon(1e-13));
  CHECK(rep.time_subdivisions == 8);
  CHECK(rep.c0 == 1.0);

  // one interval: the slice sum is the t = 0 energy, and u = 1 makes both
  // it and the final-time term equal the summed grid weights
  const double grid_mass = pairwise_sum(f.grid.weights);
  CHECK(rep.slices == doctest::Approx(grid_mass).epsilon(1e-12));
  CHECK(rep.final_term == doctest::Approx(grid_mass).epsilon(1e-12));

  // constant field: the exit set never changes and the Simpson weights sum
  // to the horizon, so the exit term is T times the exit arc mass
  const Vec h = f.field.at(0.0);
  const double exit_arc = [&] {
    double acc = 0.0;
    for (Eigen::Index b = 0; b < f.boundary.size(); ++b)
      if (h.dot(f.boundary.normals.col(b)) >= 0.0) acc += f.boundary.weights[b];
    return acc;
  }();
  CHECK(exit_arc > 3.0);  // about half the perimeter
  CHECK(exit_arc < 3.3);
  CHECK(rep.sigma_term == doctest::Approx(2.0 * exit_arc).epsilon(1e-12));

  for (Eigen::Index is = 0; is < 3; ++is) {
    CHECK(rep.residual_scaled[is] == 0.0);
    CHECK(rep.bulk_scaled[is] > 0.0);
    CHECK(std::isfinite(rep.c_of_s[is]));
    CHECK(rep.c_of_s[is] >= 1.0);
  }
}

TEST_CASE("minimal constant is the bisection root of the closing predicate") {
  Fixture f;
  const Eigen::VectorXd times = uniform_times(2.0, 9);
  const SolutionField sol = manufactured_solution(
      gaussian_profile(Vec(0.3, -0.2), 0.5), f.field, f.domain, f.grid, f.boundary, times);

  const std::vector<double> s_values = {1.0, 2.0, 4.0};
  const CarlemanReport rep = carleman_report(sol, f.weight, s_values, 1.0, 8);

  for (Eigen::Index is = 0; is < 3; ++is) {
    const double c = rep.c_of_s[is];
    REQUIRE(std::isfinite(c));
    CHECK(estimate_holds(rep, is, c));
    if (c > 1.0) CHECK_FALSE(estimate_holds(rep, is, c * (1.0 - 1e-9)));
  }
}

TEST_CASE("minimal constant is invariant under solution scaling") {
  Fixture f;
  const Eigen::VectorXd times = uniform_times(2.0, 9);
  const SolutionField sol = manufactured_solution(
      gaussian_profile(Vec(0.3, -0.2), 0.5), f.field, f.domain, f.grid, f.boundary, times);

  const std::vector<double> s_values = {1.0, 2.0, 4.0};
  const CarlemanReport rep = carleman_report(sol, f.weight, s_values, 1.0, 8);
  const CarlemanReport rep3 = carleman_report(sol.scaled(3.0), f.weight, s_values, 1.0, 8);

  for (Eigen::Index is = 0; is < 3; ++is) {
    CHECK(rep3.bulk_scaled[is] == doctest::Approx(9.0 * rep.bulk_scaled[is]).epsilon(1e-12));
    CHECK(std::abs(rep3.c_of_s[is] - rep.c_of_s[is]) <= 1e-9);
  }
  CHECK(rep3.slices == doctest::Approx(9.0 * rep.slices).epsilon(1e-12));
  CHECK(rep3.sigma_term == doctest::Approx(9.0 * rep.sigma_term).epsilon(1e-12));
  CHECK(rep3.final_term == doctest::Approx(9.0 * rep.final_term).epsilon(1e-12));
}

TEST_CASE("carleman report rejects malformed inputs") {
  Fixture f;
  const Eigen::VectorXd times = uniform_times(2.0, 5);
  const SolutionField sol = manufactured_solution(
      linear_profile(Vec::Zero(), 1.0), f.field, f.domain, f.grid, f.boundary, times);

  CHECK_THROWS_AS(carleman_report(sol, f.weight, {}, 1.0), ValidationError);
  CHECK_THROWS_AS(carleman_report(sol, f.weight, {-1.0, 1.0}, 1.0), ValidationError);
  CHECK_THROWS_AS(carleman_report(sol, f.weight, {1.0, 1.0}, 1.0), ValidationError);
  CHECK_THROWS_AS(carleman_report(sol, f.weight, {1.0, 2.0}, 1.0, 1), ValidationError);

  // sampled field has no derivative: the estimate needs P phi pointwise
  Eigen::VectorXd tab_t(3);
  tab_t << 0.0, 1.0, 2.0;
  Eigen::Matrix2Xd tab_v(2, 3);
  tab_v << 1.0, 1.0, 1.0, 0.0, 0.1, 0.0;
  const VelocityField tab = VelocityField::tabulated(tab_t, tab_v);
  const SolutionField tab_sol =
      make_solution(f.domain, tab, f.grid, f.boundary, times,
                    [](const Vec&, double) { return 1.0; }, {}, "synthetic");
  CHECK_THROWS_AS(carleman_report(tab_sol, f.weight, {1.0}, 1.0), NotC1);

  // domain mismatch: same kind, different diameter
  const Domain small = Domain::disk(Vec::Zero(), 0.9);
  const SolutionField off_domain = manufactured_solution(
      linear_profile(Vec::Zero(), 1.0), f.field, small, small.interior_grid(0.1),
      small.boundary_grid(0.05), times);
  CHECK_THROWS_AS(carleman_report(off_domain, f.weight, {1.0}, 1.0), GridMismatch);

  // horizon mismatch: field runs past the partition
  const VelocityField longer = VelocityField::constant(Vec(1.0, 0.0), 2.5);
  const SolutionField off_horizon = manufactured_solution(
      linear_profile(Vec::Zero(), 1.0), longer, f.domain, f.grid, f.boundary,
      uniform_times(2.5, 5));
  CHECK_THROWS_AS(carleman_report(off_horizon, f.weight, {1.0}, 1.0), GridMismatch);
}

TEST_CASE("default s grid is log spaced from the dominance threshold") {
  Fixture f;
  const auto s = default_s_grid(f.weight, f.field, f.grid, 6);
  REQUIRE(s.size() == 6);
  for (size_t k = 0; k < s.size(); ++k) {
    CHECK(s[k] > 0.0);
    if (k > 0) CHECK(s[k] > s[k - 1]);
  }
  // single interval: dominance is vacuous, the scan floor is 1; the top end
  // is 4x the floor because the phi range (361 - 279.48) already covers the
  // exponent budget
  CHECK(s.front() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.back() == doctest::Approx(4.0).epsilon(1e-12));
  const double ratio = s[1] / s[0];
  for (size_t k = 2; k < s.size(); ++k)
    CHECK(s[k] / s[k - 1] == doctest::Approx(ratio).epsilon(1e-10));

  CHECK_THROWS_AS(default_s_grid(f.weight, f.field, f.grid, 1), ValidationError);
}

TEST_CASE("energy profile of the constant solution is flat with zero net flux") {
  Fixture f;
  const Eigen::VectorXd times = uniform_times(2.0, 9);
  const SolutionField sol = manufactured_solution(
      linear_profile(Vec::Zero(), 1.0), f.field, f.domain, f.grid, f.boundary, times);

  const EnergyProfile prof = energy_profile(sol);
  REQUIRE(prof.times.size() == 9);

  const double grid_mass = pairwise_sum(f.grid.weights);
  const double perim = f.domain.perimeter();
  for (Eigen::Index k = 0; k < 9; ++k) {
    CHECK(prof.energy[k] == doctest::Approx(grid_mass).epsilon(1e-12));
    // net flux of a constant field through a closed curve vanishes
    CHECK(std::abs(prof.flux[k]) < 1e-9 * perim);
    CHECK(std::abs(prof.identity_residual[k]) < 1e-8 * grid_mass);
  }
  CHECK(prof.hstar == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(prof.g_norm2 == doctest::Approx(2.0 * perim).epsilon(1e-9));
  CHECK(prof.tau_q >= 0.0);
  // constant energy: both worst slacks equal the H* g^2 budget exactly
  CHECK(prof.upper_worst_slack == doctest::Approx(prof.hstar * prof.g_norm2).epsilon(1e-9));
  CHECK(prof.lower_worst_slack == doctest::Approx(prof.hstar * prof.g_norm2).epsilon(1e-9));

  const SolutionField single = manufactured_solution(
      linear_profile(Vec::Zero(), 1.0), f.field, f.domain, f.grid, f.boundary,
      uniform_times(2.0, 1));
  CHECK_THROWS_AS(energy_profile(single), ValidationError);
}

TEST_CASE("energy profile tracks an exiting bump within the quadrature tolerance") {
  Fixture f;
  const Eigen::VectorXd times = uniform_times(2.0, 33);
  const SolutionField sol = manufactured_solution(
      gaussian_profile(Vec(-0.2, 0.0), 0.3), f.field, f.domain, f.grid, f.boundary, times);

  const EnergyProfile prof = energy_profile(sol);
  CHECK(prof.tau_q > 0.0);
  CHECK(prof.identity_residual.cwiseAbs().maxCoeff() <= prof.tau_q);
  CHECK(prof.upper_worst_slack >= -prof.tau_q);
  CHECK(prof.lower_worst_slack >= -prof.tau_q);
  // the bump leaves: energy decays by orders of magnitude and the flux is
  // outward while it crosses
  CHECK(prof.energy[prof.times.size() - 1] < 0.05 * prof.energy[0]);
  CHECK(prof.flux.maxCoeff() > 0.0);
  CHECK(prof.g_norm2 > 0.0);
}

TEST_CASE("observability ratio flags the vanishing trace with the infinite sentinel") {
  const CounterexampleScenario sc = rotating_bump_counterexample(1.0, 0.5, {}, 2.0);
  const QuadratureGrid grid = sc.domain.interior_grid(0.1);
  const BoundaryGrid boundary = sc.domain.boundary_grid(0.1);
  const SolutionField sol = solve_characteristics(sc.domain, sc.field, sc.u0, sc.g,
                                                  grid, boundary, uniform_times(2.0, 9));

  const ConePartition part = uniform_partition(sc.field, 0.8);
  const CarlemanWeight w = build_weight(sc.domain, sc.field, part, 2.0);

  const ObservabilityReport rep = observability_ratio({sol}, w, sc.field);
  REQUIRE(rep.ratios.size() == 1);
  CHECK(rep.ratios[0] == kInf);
  CHECK(rep.family_sup == kInf);
  CHECK(rep.peak_norms[0] > 0.0);
  CHECK(rep.trace_norms[0] <= 1e-12 * rep.peak_norms[0]);
  CHECK(rep.verdict == "observability fails");
  CHECK_FALSE(rep.certificate.holds);
}

TEST_CASE("observability verdict follows the quantitative time condition") {
  Fixture f;

  // T = 2 is far below the threshold horizon 361 / 4.76
  {
    const Eigen::VectorXd times = uniform_times(2.0, 9);
    const SolutionField sol = manufactured_solution(
        gaussian_profile(Vec(0.0, 0.0), 0.4), f.field, f.domain, f.grid, f.boundary, times);
    const ObservabilityReport rep = observability_ratio({sol}, f.weight, f.field);
    CHECK(std::isfinite(rep.ratios[0]));
    CHECK(rep.ratios[0] > 0.0);
    CHECK_FALSE(rep.certificate.holds);
    CHECK(rep.verdict == "time condition fails");
  }

  // T = 80 exceeds it: 80 * 17 / 361 > 1 / (1 * 0.28)
  {
    const VelocityField field = VelocityField::constant(Vec(1.0, 0.0), 80.0);
    const ConePartition part = uniform_partition(field, 0.8);
    const CarlemanWeight w = build_weight(f.domain, field, part, 2.0);
    const SolutionField sol = manufactured_solution(
        gaussian_profile(Vec(0.0, 0.0), 0.4), field, f.domain, f.grid, f.boundary,
        uniform_times(80.0, 41));
    const ObservabilityReport rep = observability_ratio({sol}, w, field);
    CHECK(rep.certificate.holds);
    CHECK(rep.certificate.jstar == 0);
    CHECK(std::isfinite(rep.family_sup));
    CHECK(rep.verdict == "time condition holds");
  }

  CHECK_THROWS_AS(observability_ratio({}, f.weight, f.field), ValidationError);
}

TEST_CASE("window extension bounds hold for a transported bump") {
  Fixture f;
  const Eigen::VectorXd times = uniform_times(2.0, 33);
  const SolutionField sol = manufactured_solution(
      gaussian_profile(Vec(-0.2, 0.0), 0.3), f.field, f.domain, f.grid, f.boundary, times);

  const Eigen::VectorXd energy = slice_energies_oracle(sol);
  const double g2 = trace_norm2_oracle(sol);
  REQUIRE(g2 > 0.0);
  double window_sup2 = 0.0;
  for (Eigen::Index k = 0; k < times.size(); ++k)
    if (times[k] >= 0.5 && times[k] <= 1.5)
      window_sup2 = std::max(window_sup2, energy[k] / g2);
  const double c_window = std::sqrt(window_sup2) * (1.0 + 1e-12);

  const WindowCheck chk = extend_window_check(sol, 0.5, 1.5, c_window);
  CHECK_FALSE(chk.skipped);
  CHECK(chk.premise_holds);
  CHECK(chk.in_window_sup == doctest::Approx(std::sqrt(window_sup2)).epsilon(1e-9));
  const double hstar = 1.0;
  CHECK(chk.bound_before ==
        doctest::Approx(std::sqrt(c_window * c_window + 2.0 * hstar)).epsilon(1e-12));
  CHECK(chk.bound_after ==
        doctest::Approx(std::sqrt(c_window * c_window + hstar)).epsilon(1e-12));
  CHECK(chk.before_sup <= chk.bound_before + 1e-6);
  CHECK(chk.after_sup <= chk.bound_after + 1e-6);
  CHECK(chk.ok);

  CHECK_THROWS_AS(extend_window_check(sol, -0.5, 1.0, 1.0), WindowOutOfRange);
  CHECK_THROWS_AS(extend_window_check(sol, 0.0, 2.5, 1.0), WindowOutOfRange);
  CHECK_THROWS_AS(extend_window_check(sol, 1.0, 1.0, 1.0), WindowOutOfRange);
}

TEST_CASE("window extension is skipped when there is nothing to normalize") {
  const CounterexampleScenario sc = rotating_bump_counterexample(1.0, 0.5, {}, 2.0);
  const SolutionField sol = solve_characteristics(
      sc.domain, sc.field, sc.u0, sc.g, sc.domain.interior_grid(0.1),
      sc.domain.boundary_grid(0.1), uniform_times(2.0, 9));
  const WindowCheck chk = extend_window_check(sol, 0.5, 1.5, 1.0);
  CHECK(chk.skipped);
  CHECK(chk.ok);
}

TEST_CASE("fitting the constant takes the max over fit reports and checks holdout") {
  Fixture f;
  const Eigen::VectorXd times = uniform_times(2.0, 9);
  const std::vector<double> s_values = {1.0, 2.0};
  const SolutionField a = manufactured_solution(
      linear_profile(Vec::Zero(), 1.0), f.field, f.domain, f.grid, f.boundary, times);
  const SolutionField b = manufactured_solution(
      gaussian_profile(Vec(0.3, -0.2), 0.5), f.field, f.domain, f.grid, f.boundary, times);
  const CarlemanReport ra = carleman_report(a, f.weight, s_values, 1.0, 8);
  const CarlemanReport rb = carleman_report(b, f.weight, s_values, 1.0, 8);

  const FitResult both = fit_constants({ra, rb}, {ra, rb});
  CHECK(both.c_uniform ==
        doctest::Approx(std::max(ra.c_of_s.maxCoeff(), rb.c_of_s.maxCoeff())));
  CHECK(both.valid_on_holdout);

  const FitResult one = fit_constants({ra}, {rb});
  CHECK(one.c_uniform == doctest::Approx(ra.c_of_s.maxCoeff()));
  CHECK(one.valid_on_holdout ==
        (rb.c_of_s.maxCoeff() <= ra.c_of_s.maxCoeff() * (1.0 + 1e-12)));

  const CarlemanReport rc = carleman_report(a, f.weight, {1.0, 2.0, 3.0}, 1.0, 8);
  CHECK_THROWS_AS(fit_constants({ra}, {rc}), GridMismatch);
  CHECK_THROWS_AS(fit_constants({ra, rc}, {ra}), GridMismatch);
  CHECK_THROWS_AS(fit_constants({}, {ra}), ValidationError);
  CHECK_THROWS_AS(fit_constants({ra}, {}), ValidationError);
}

TEST_CASE("manufactured family is seeded, deterministic, and stress led") {
  Fixture f;
  const Eigen::VectorXd times = uniform_times(2.0, 5);

  const auto fam = manufactured_family(f.domain, f.field, f.grid, f.boundary,
                                       times, 6, 42, true);
  REQUIRE(fam.size() == 6);
  for (const auto& sol : fam) {
    CHECK(sol.exact());
    CHECK(sol.provenance == "manufactured");
  }

  const auto fam2 = manufactured_family(f.domain, f.field, f.grid, f.boundary,
                                        times, 6, 42, true);
  for (size_t i = 0; i < fam.size(); ++i) {
    CHECK((fam[i].interior_values - fam2[i].interior_values).cwiseAbs().maxCoeff() == 0.0);
    CHECK((fam[i].boundary_values - fam2[i].boundary_values).cwiseAbs().maxCoeff() == 0.0);
  }

  // the lead member is the narrow bump at the boundary point the flow
  // points toward: for a rightward field that is (1, 0)
  CHECK(fam[0].value(Vec(0.99, 0.0), 0.0) > 100.0 * fam[0].value(Vec::Zero(), 0.0));

  // a different seed changes only the random tail
  const auto fam3 = manufactured_family(f.domain, f.field, f.grid, f.boundary,
                                        times, 6, 7, true);
  for (size_t i = 0; i < 3; ++i)
    CHECK((fam[i].interior_values - fam3[i].interior_values).cwiseAbs().maxCoeff() == 0.0);
  CHECK((fam[5].interior_values - fam3[5].interior_values).cwiseAbs().maxCoeff() > 0.0);

  // with trig members allowed the fifth designed member switches family
  const auto mixed = manufactured_family(f.domain, f.field, f.grid, f.boundary,
                                         times, 9, 42, false);
  CHECK(mixed[4].value(Vec::Zero(), 0.0) == doctest::Approx(1.2).epsilon(1e-12));

  CHECK_THROWS_AS(manufactured_family(f.domain, f.field, f.grid, f.boundary,
                                      times, 0, 42, true),
                  ValidationError);
}
