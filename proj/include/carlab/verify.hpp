#pragma once

#include <Eigen/Dense>
#include <vector>

#include "carlab/transport.hpp"
#include "carlab/weight.hpp"

namespace carlab {

// Term ledger of the weighted estimate at each scanned s. Every integral
// against e^{2 s phi} is stored scaled by e^{-2 s phi_max}: the estimate is
// invariant under that common factor and the raw values overflow for
// desk-scale weights (phi can reach several hundred).
struct CarlemanReport {
  std::vector<double> s_values;
  double phi_max = 0.0;  // sup of phi over the space-time cylinder
  double phi_min = 0.0;
  double c0 = 1.0;
  int time_subdivisions = 64;
  Eigen::VectorXd bulk_scaled;      // s^2 * int |u|^2 e^{2s(phi - phi_max)}
  Eigen::VectorXd residual_scaled;  // int |Pu|^2 e^{2s(phi - phi_max)}
  double slices = 0.0;              // sum_j int |u(., t_j)|^2, j = 0..m-1
  double sigma_term = 0.0;          // int over the exit set of |u|^2
  double final_term = 0.0;          // int |u(., T)|^2
  Eigen::VectorXd c_of_s;           // minimal C >= 1 closing the estimate
};

// Computes the five term integrals (interior grid x per-interval composite
// Simpson in time; boundary grid with exit mask) and the minimal constant
// per s by monotone bisection. Throws NotC1 for fields without a
// continuous derivative and GridMismatch when weight and solution disagree
// on domain or horizon.
CarlemanReport carleman_report(const SolutionField& solution,
                               const CarlemanWeight& weight,
                               const std::vector<double>& s_values, double c0,
                               int time_subdivisions = 64);

// Log-spaced scan range anchored at the dominance threshold: lower end
// max(1, s0), upper end wide enough that 2 s (phi_max - phi_min) stays
// within a fixed exponent budget.
std::vector<double> default_s_grid(const CarlemanWeight& weight,
                                   const VelocityField& field,
                                   const QuadratureGrid& grid, int count = 16);

struct EnergyProfile {
  Eigen::VectorXd times;
  Eigen::VectorXd energy;             // E(t) = int |u(., t)|^2
  Eigen::VectorXd flux;               // int over the boundary of (H.nu)|g|^2
  Eigen::VectorXd identity_residual;  // E(t) - E(0) + int_0^t flux
  double tau_q = 0.0;                 // quadrature tolerance estimate
  double hstar = 0.0;
  double g_norm2 = 0.0;  // squared trace norm over the whole lateral boundary
  double upper_worst_slack = 0.0;  // min over t of E(0) + H* g2 - E(t)
  double lower_worst_slack = 0.0;  // min over t of E(t) + H* g2 - E(0)
};

// Tabulates energy and boundary flux, the balance-identity residual, and
// the two-sided energy bounds with their worst slack (>= -tau_q expected).
EnergyProfile energy_profile(const SolutionField& solution);

struct ObservabilityReport {
  Eigen::VectorXd ratios;       // sup_t ||u(., t)|| / ||g||; inf sentinel
  Eigen::VectorXd peak_norms;   // sup_t ||u(., t)||
  Eigen::VectorXd trace_norms;  // ||g|| over the lateral boundary
  double family_sup = 0.0;
  ObservabilityCondition certificate;
  std::string verdict;
};

// Ratio per solution plus the quantitative time-condition certificate.
// ||g|| <= 1e-12 sup_t ||u|| flags the infinite-ratio sentinel and the
// verdict "observability fails".
ObservabilityReport observability_ratio(const std::vector<SolutionField>& solutions,
                                        const CarlemanWeight& weight,
                                        const VelocityField& field);

struct WindowCheck {
  bool ok = false;
  bool skipped = false;        // zero trace norm: nothing to normalize
  bool premise_holds = false;  // measured in-window ratio <= c_window
  double in_window_sup = 0.0;
  double before_sup = 0.0;
  double after_sup = 0.0;
  double bound_before = 0.0;  // sqrt(c_window^2 + 2 H*)
  double bound_after = 0.0;   // sqrt(c_window^2 + H*)
};

// Checks the window-extension arithmetic: a ratio bound c_window on
// [s1, s2] extends to sqrt(c_window^2 + 2H*) before the window and
// sqrt(c_window^2 + H*) after it. Ratios are normalized by the trace norm.
WindowCheck extend_window_check(const SolutionField& solution, double s1,
                                double s2, double c_window);

struct FitResult {
  double c_uniform = 1.0;  // max of c_of_s over the fitting reports
  bool valid_on_holdout = false;
};

// The constant is solution independent in the estimate; this fits the max
// over a family and checks it closes the estimate on held-out solutions at
// every scanned s. Throws GridMismatch when the reports disagree on the s
// grid or the factored phi_max.
FitResult fit_constants(const std::vector<CarlemanReport>& fit,
                        const std::vector<CarlemanReport>& holdout);

// Deterministic family of exact solutions from seeded profiles: Gaussians
// of varied center and width, optionally interleaved with trigonometric
// products. Same seed, same family.
std::vector<SolutionField> manufactured_family(
    const Domain& domain, const VelocityField& field,
    const QuadratureGrid& grid, const BoundaryGrid& boundary,
    const Eigen::VectorXd& times, int count, unsigned long long seed,
    bool gaussians_only);

}  // namespace carlab
