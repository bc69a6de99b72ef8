#pragma once

#include <memory>

#include "ringctl/convolution.hpp"
#include "ringctl/kernel.hpp"
#include "ringctl/ring.hpp"

namespace ringctl {

/// Additive velocity disturbance d(x, t) = amplitude * step(t - switch_time),
/// uniform in space (so the gradient bound is zero and the magnitude bound is
/// |amplitude|). Periodic in x by construction.
struct StepDisturbance {
  double amplitude = 0.0;
  double switch_time = 0.0;

  double at(double t) const { return t >= switch_time ? amplitude : 0.0; }
  bool enabled() const { return amplitude != 0.0; }
  double sup_velocity() const;  // bound on |d| over any horizon past the switch
  double sup_gradient() const { return 0.0; }
};

/// Plant density, reference density and clock.
struct MacroState {
  RingField rho;
  RingField rho_d;
  double t = 0.0;
};

/// Control handed to one plant step: a mass source q, a velocity field U, or
/// neither (open loop). Held fixed across the step's stages.
struct ControlInput {
  const RingField* source = nullptr;
  const RingField* velocity = nullptr;
};

/// Conservative finite-volume integrator for the controlled transport
/// equation rho_t + [rho (V + U + d)]_x = q with V = kernel * rho, and for
/// the self-advected reference rho_d_t + [rho_d V_d]_x = 0. Fluxes are
/// Rusanov; time stepping is explicit midpoint with the control held over
/// the step. Flux differences telescope, so mass changes only through q.
class MacroStepper {
 public:
  MacroStepper(RingGrid grid, Kernel plant_kernel);

  void set_disturbance(StepDisturbance d) { disturbance_ = d; }
  const StepDisturbance& disturbance() const { return disturbance_; }
  const Kernel& plant_kernel() const { return kernel_; }

  /// V = plant_kernel * rho.
  RingField velocity(const RingField& rho);

  /// Largest advective speed the first stage would see; the step is rejected
  /// when dt > 0.5 * cell_width / max_speed.
  double max_speed(const MacroState& state, ControlInput control);

  /// Advances rho and t by dt. Throws StepRejected with the admissible step
  /// if dt violates the CFL restriction. Negative samples are clipped to
  /// zero afterwards and the clipped mass is accumulated.
  void step_controlled(MacroState& state, ControlInput control, double dt);

  /// Advances the reference density by dt (velocity recomputed per stage).
  void step_reference(RingField& rho_d, double dt);

  double clipped_mass() const { return clipped_; }

 private:
  RingField total_velocity(const RingField& rho, ControlInput control, double t);
  RingField flux_divergence(const RingField& rho, const RingField& v) const;
  void check_cfl(const RingField& v, double dt) const;

  RingGrid grid_;
  Kernel kernel_;
  StepDisturbance disturbance_;
  ConvolutionEngine engine_;
  ConvolutionEngine::Spectrum kernel_spec_;
  double clipped_ = 0.0;
};

/// V = kernel * rho (one-shot convenience).
RingField velocity_field(const Kernel& kernel, const RingField& rho);

/// e = rho_d - rho.
RingField error_field(const MacroState& state);

}  // namespace ringctl
