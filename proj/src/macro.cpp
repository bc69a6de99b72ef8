#include "ringctl/macro.hpp"

#include <algorithm>
#include <cmath>

namespace ringctl {

double StepDisturbance::sup_velocity() const { return std::abs(amplitude); }

MacroStepper::MacroStepper(RingGrid grid, Kernel plant_kernel)
    : grid_(grid),
      kernel_(std::move(plant_kernel)),
      engine_(grid),
      kernel_spec_(engine_.kernel_spectrum(kernel_)) {}

RingField MacroStepper::velocity(const RingField& rho) {
  return engine_.convolve(kernel_spec_, engine_.forward(rho));
}

RingField MacroStepper::total_velocity(const RingField& rho, ControlInput control,
                                       double t) {
  RingField v = velocity(rho);
  if (control.velocity != nullptr) {
    require_same_grid(v, *control.velocity);
    axpy(1.0, *control.velocity, v);
  }
  const double d = disturbance_.at(t);
  if (d != 0.0) {
    for (int j = 0; j < v.size(); ++j) v[j] += d;
  }
  return v;
}

RingField MacroStepper::flux_divergence(const RingField& rho,
                                        const RingField& v) const {
  const int m = grid_.size();
  const double inv_h = 1.0 / grid_.cell_width();
  RingField out(grid_);
  // Rusanov flux at face j+1/2, divergence by telescoping differences.
  double f_prev;  // flux at face j-1/2
  {
    const int jm = m - 1;
    const double a = std::max(std::abs(v[jm]), std::abs(v[0]));
    f_prev = 0.5 * (rho[jm] * v[jm] + rho[0] * v[0]) - 0.5 * a * (rho[0] - rho[jm]);
  }
  for (int j = 0; j < m; ++j) {
    const int jp = (j + 1) % m;
    const double a = std::max(std::abs(v[j]), std::abs(v[jp]));
    const double f_next =
        0.5 * (rho[j] * v[j] + rho[jp] * v[jp]) - 0.5 * a * (rho[jp] - rho[j]);
    out[j] = -(f_next - f_prev) * inv_h;
    f_prev = f_next;
  }
  return out;
}

void MacroStepper::check_cfl(const RingField& v, double dt) const {
  const double vmax = v.max_abs();
  if (vmax <= 0.0) return;
  const double admissible = 0.5 * grid_.cell_width() / vmax;
  if (dt > admissible) {
    throw StepRejected("step rejected: dt exceeds 0.5 * cell_width / max speed",
                       admissible);
  }
}

double MacroStepper::max_speed(const MacroState& state, ControlInput control) {
  return total_velocity(state.rho, control, state.t).max_abs();
}

void MacroStepper::step_controlled(MacroState& state, ControlInput control,
                                   double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidParameter("step_controlled: dt must be positive");
  }
  if (control.source != nullptr) require_same_grid(state.rho, *control.source);

  const RingField v1 = total_velocity(state.rho, control, state.t);
  check_cfl(v1, dt);

  RingField k1 = flux_divergence(state.rho, v1);
  if (control.source != nullptr) axpy(1.0, *control.source, k1);

  RingField rho_half = state.rho;
  axpy(0.5 * dt, k1, rho_half);

  const RingField v2 = total_velocity(rho_half, control, state.t + 0.5 * dt);
  RingField k2 = flux_divergence(rho_half, v2);
  if (control.source != nullptr) axpy(1.0, *control.source, k2);

  axpy(dt, k2, state.rho);
  state.t += dt;

  // nonnegativity: clip and account, callers abort on excessive totals
  const double h = grid_.cell_width();
  for (int j = 0; j < state.rho.size(); ++j) {
    if (state.rho[j] < 0.0) {
      clipped_ += -state.rho[j] * h;
      state.rho[j] = 0.0;
    }
  }
}

void MacroStepper::step_reference(RingField& rho_d, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidParameter("step_reference: dt must be positive");
  }
  const RingField v1 = velocity(rho_d);
  check_cfl(v1, dt);
  const RingField k1 = flux_divergence(rho_d, v1);

  RingField half = rho_d;
  axpy(0.5 * dt, k1, half);

  const RingField v2 = velocity(half);
  const RingField k2 = flux_divergence(half, v2);
  axpy(dt, k2, rho_d);
}

RingField velocity_field(const Kernel& kernel, const RingField& rho) {
  return circular_convolution(kernel, rho);
}

RingField error_field(const MacroState& state) { return state.rho_d - state.rho; }

}  // namespace ringctl
