#pragma once

#include <span>
#include <string>
#include <vector>

#include "ringctl/kernel.hpp"
#include "ringctl/ring.hpp"

namespace ringctl {

/// Horizon bounds entering the decay/boundedness inequalities. M and L are
/// running maxima of the reference norms measured along the realized
/// trajectory; kernel-difference norms are grid quadrature values.
struct BoundConstants {
  double M = 0.0;             // sup_t ||rho_d||_2
  double L = 0.0;             // sup_t ||rho_d_x||_2
  double D1 = 0.0;            // sup ||d||_inf
  double D2 = 0.0;            // sup ||d_x||_inf
  double g_norm = 0.0;        // ||window(f) - f||_2
  double gx_norm = 0.0;       // ||(window(f) - f)_x||_2
  double gtilde_norm = 0.0;   // ||f~ - f||_2
  double gtildex_norm = 0.0;  // ||(f~ - f)_x||_2

  /// Folds one reference sample into the running maxima.
  void absorb_reference(const RingField& rho_d);
};

/// Grid norms of the sensing-window difference g = window(f, delta) - f.
void measure_sensing_difference(BoundConstants& c, const Kernel& kernel,
                                double delta, const RingGrid& grid);

/// Grid norms of the synthesis mismatch g~ = f~ - f.
void measure_kernel_mismatch(BoundConstants& c, const Kernel& plant,
                             const Kernel& synthesis, const RingGrid& grid);

struct BoundSample {
  double t = 0.0;
  double lhs = 0.0;  // measured d/dt of ||e||_2^2
  double rhs = 0.0;  // inequality bound
  double margin = 0.0;  // rhs + tol - lhs (negative = violated)
  bool ok = true;
};

/// Per-sample verdicts for one differential inequality along one run.
/// `hypothesis_met == false` means the claim's precondition failed and the
/// inequality was not checked (informational, not a violation).
struct BoundReport {
  std::vector<BoundSample> samples;
  double tolerance = 0.0;
  bool hypothesis_met = true;
  std::string note;
  int violations = 0;
  double max_violation = 0.0;

  // Disturbance runs also carry the scalar comparison envelope v(t) with
  // v' = -a v + c sqrt(v), v(0) = eta(0), and the domination verdict.
  std::vector<double> envelope;
  int envelope_violations = 0;

  bool passed() const { return hypothesis_met && violations == 0 && envelope_violations == 0; }
};

/// d/dt eta <= (-2 Kp + 2 M ||g_x|| + 2 L ||g|| + ||g_x|| sqrt(eta)) eta.
BoundReport check_limited_sensing_inequality(std::span<const double> t,
                                             std::span<const double> eta,
                                             const BoundConstants& c, double kp);

/// d/dt eta <= (-2 Kp + 3 M ||g~_x|| + 2 L ||g~|| + ||g~_x|| sqrt(eta)) eta.
BoundReport check_kernel_perturbation_inequality(std::span<const double> t,
                                                 std::span<const double> eta,
                                                 const BoundConstants& c,
                                                 double kp);

/// d/dt eta <= -a eta + c sqrt(eta) with a = 2 Kp - D2, c = 2 L D1 + 2 M D2,
/// plus comparison-envelope domination. Requires 2 Kp > D2; otherwise the
/// report flags the hypothesis as unmet.
BoundReport check_disturbance_inequality(std::span<const double> t,
                                         std::span<const double> eta,
                                         const BoundConstants& c, double kp);

/// Steady bound on eta = ||e||_2^2: ((2 L D1 + 2 M D2) / (2 Kp - D2))^2.
/// Throws HypothesisNotMet unless 2 Kp > D2.
double steady_state_bound(const BoundConstants& c, double kp);

/// Integrates v' = -a v + c sqrt(v) from v(0) = eta0 and returns v at the
/// requested times (which must be nondecreasing, starting at times[0]).
/// Requires a > 0, c >= 0, eta0 >= 0.
std::vector<double> comparison_ode_solve(double a, double c, double eta0,
                                         std::span<const double> times);

/// Sufficient proportional gain for monotone decay from error radius gamma.
double limited_sensing_gain_threshold(const BoundConstants& c, double gamma);
double kernel_mismatch_gain_threshold(const BoundConstants& c, double gamma);

/// Measured time derivative of a sampled scalar series: three-point
/// difference on a possibly nonuniform time lattice, one-sided at the ends.
std::vector<double> sampled_derivative(std::span<const double> t,
                                       std::span<const double> y);

}  // namespace ringctl
