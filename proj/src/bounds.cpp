#include "ringctl/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "ringctl/norms.hpp"

namespace ringctl {

void BoundConstants::absorb_reference(const RingField& rho_d) {
  M = std::max(M, lp_norm(rho_d, 2.0));
  L = std::max(L, lp_norm(central_difference(rho_d), 2.0));
}

void measure_sensing_difference(BoundConstants& c, const Kernel& kernel,
                                double delta, const RingGrid& grid) {
  const RingField g = kernel.windowed(delta).sample_field(grid) -
                      kernel.sample_field(grid);
  c.g_norm = lp_norm(g, 2.0);
  c.gx_norm = lp_norm(central_difference(g), 2.0);
}

void measure_kernel_mismatch(BoundConstants& c, const Kernel& plant,
                             const Kernel& synthesis, const RingGrid& grid) {
  const RingField g = synthesis.sample_field(grid) - plant.sample_field(grid);
  c.gtilde_norm = lp_norm(g, 2.0);
  c.gtildex_norm = lp_norm(central_difference(g), 2.0);
}

std::vector<double> sampled_derivative(std::span<const double> t,
                                       std::span<const double> y) {
  const std::size_t n = t.size();
  if (n != y.size()) throw DimensionMismatch("sampled_derivative: size mismatch");
  if (n < 3) {
    throw InvalidParameter("sampled_derivative: need at least three samples");
  }
  std::vector<double> d(n, 0.0);
  auto three_point = [&](std::size_t i0, std::size_t i1, std::size_t i2,
                         double at) {
    const double t0 = t[i0], t1 = t[i1], t2 = t[i2];
    const double w0 = (2.0 * at - t1 - t2) / ((t0 - t1) * (t0 - t2));
    const double w1 = (2.0 * at - t0 - t2) / ((t1 - t0) * (t1 - t2));
    const double w2 = (2.0 * at - t0 - t1) / ((t2 - t0) * (t2 - t1));
    return w0 * y[i0] + w1 * y[i1] + w2 * y[i2];
  };
  d[0] = three_point(0, 1, 2, t[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d[i] = three_point(i - 1, i, i + 1, t[i]);
  }
  d[n - 1] = three_point(n - 3, n - 2, n - 1, t[n - 1]);
  return d;
}

namespace {

BoundReport check_decay_form(std::span<const double> t,
                             std::span<const double> eta, double kp,
                             double coeff_const, double coeff_sqrt) {
  // rhs = (-2 kp + coeff_const + coeff_sqrt * sqrt(eta)) * eta
  BoundReport report;
  const auto lhs = sampled_derivative(t, eta);
  std::vector<double> rhs(eta.size());
  double rhs_max = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    const double e2 = std::max(eta[i], 0.0);
    rhs[i] = (-2.0 * kp + coeff_const + coeff_sqrt * std::sqrt(e2)) * e2;
    rhs_max = std::max(rhs_max, std::abs(rhs[i]));
  }
  report.tolerance = 1e-3 * rhs_max + 1e-8;
  report.samples.resize(eta.size());
  for (std::size_t i = 0; i < eta.size(); ++i) {
    auto& s = report.samples[i];
    s.t = t[i];
    s.lhs = lhs[i];
    s.rhs = rhs[i];
    s.margin = rhs[i] + report.tolerance - lhs[i];
    s.ok = s.margin >= 0.0;
    if (!s.ok) {
      ++report.violations;
      report.max_violation = std::max(report.max_violation, -s.margin);
    }
  }
  return report;
}

}  // namespace

BoundReport check_limited_sensing_inequality(std::span<const double> t,
                                             std::span<const double> eta,
                                             const BoundConstants& c, double kp) {
  return check_decay_form(t, eta, kp, 2.0 * c.M * c.gx_norm + 2.0 * c.L * c.g_norm,
                          c.gx_norm);
}

BoundReport check_kernel_perturbation_inequality(std::span<const double> t,
                                                 std::span<const double> eta,
                                                 const BoundConstants& c,
                                                 double kp) {
  return check_decay_form(t, eta, kp,
                          3.0 * c.M * c.gtildex_norm + 2.0 * c.L * c.gtilde_norm,
                          c.gtildex_norm);
}

BoundReport check_disturbance_inequality(std::span<const double> t,
                                         std::span<const double> eta,
                                         const BoundConstants& c, double kp) {
  if (!(2.0 * kp > c.D2)) {
    BoundReport report;
    report.hypothesis_met = false;
    report.note = "hypothesis 2 Kp > D2 not met; boundedness claim not checkable";
    return report;
  }
  const double a = 2.0 * kp - c.D2;
  const double cc = 2.0 * c.L * c.D1 + 2.0 * c.M * c.D2;

  // pointwise differential inequality
  BoundReport report;
  const auto lhs = sampled_derivative(t, eta);
  std::vector<double> rhs(eta.size());
  double rhs_max = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    const double e2 = std::max(eta[i], 0.0);
    rhs[i] = -a * e2 + cc * std::sqrt(e2);
    rhs_max = std::max(rhs_max, std::abs(rhs[i]));
  }
  report.tolerance = 1e-3 * rhs_max + 1e-8;
  report.samples.resize(eta.size());
  for (std::size_t i = 0; i < eta.size(); ++i) {
    auto& s = report.samples[i];
    s.t = t[i];
    s.lhs = lhs[i];
    s.rhs = rhs[i];
    s.margin = rhs[i] + report.tolerance - lhs[i];
    s.ok = s.margin >= 0.0;
    if (!s.ok) {
      ++report.violations;
      report.max_violation = std::max(report.max_violation, -s.margin);
    }
  }

  // comparison-lemma domination: eta(t) <= v(t) within a 1% slack
  report.envelope = comparison_ode_solve(a, cc, std::max(eta[0], 0.0), t);
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (eta[i] > report.envelope[i] * 1.01 + 1e-8) ++report.envelope_violations;
  }
  return report;
}

double steady_state_bound(const BoundConstants& c, double kp) {
  if (!(2.0 * kp > c.D2)) {
    throw HypothesisNotMet("steady_state_bound: requires 2 Kp > D2");
  }
  const double r = (2.0 * c.L * c.D1 + 2.0 * c.M * c.D2) / (2.0 * kp - c.D2);
  return r * r;
}

std::vector<double> comparison_ode_solve(double a, double c, double eta0,
                                         std::span<const double> times) {
  if (!(a > 0.0)) {
    throw UnsupportedRegime("comparison_ode_solve: requires a > 0");
  }
  if (!(c >= 0.0) || !(eta0 >= 0.0)) {
    throw InvalidParameter("comparison_ode_solve: requires c >= 0 and eta0 >= 0");
  }
  if (times.empty()) return {};
  auto rhs = [a, c](double v) { return -a * v + c * std::sqrt(std::max(v, 0.0)); };
  const double dt_cap = 0.05 / a;  // resolves the decay rate
  std::vector<double> out(times.size());
  double v = eta0;
  double t = times[0];
  out[0] = v;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double target = times[i];
    if (target < t) {
      throw InvalidParameter("comparison_ode_solve: times must be nondecreasing");
    }
    while (t < target) {
      const double dt = std::min(dt_cap, target - t);
      // classical RK4
      const double k1 = rhs(v);
      const double k2 = rhs(v + 0.5 * dt * k1);
      const double k3 = rhs(v + 0.5 * dt * k2);
      const double k4 = rhs(v + dt * k3);
      v += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      v = std::max(v, 0.0);
      t += dt;
    }
    out[i] = v;
  }
  return out;
}

double limited_sensing_gain_threshold(const BoundConstants& c, double gamma) {
  return (c.M + 0.5 * gamma) * c.gx_norm + c.L * c.g_norm;
}

double kernel_mismatch_gain_threshold(const BoundConstants& c, double gamma) {
  return 0.5 * gamma * c.gtildex_norm + 1.5 * c.M * c.gtildex_norm +
         c.L * c.gtilde_norm;
}

}  // namespace ringctl
