#pragma once

#include <optional>

#include "ringctl/convolution.hpp"
#include "ringctl/kernel.hpp"
#include "ringctl/macro.hpp"
#include "ringctl/ring.hpp"

namespace ringctl {

/// Gains and synthesis kernel for the density-regulation law. The synthesis
/// kernel may differ from the plant kernel (mismatched-kernel studies), and
/// the error convolution is windowed to the sensing radius.
struct ControllerConfig {
  ControllerConfig(double kp_, double ki_, double sensing_radius_, Kernel kernel_,
                   double rho_floor_)
      : kp(kp_),
        ki(ki_),
        sensing_radius(sensing_radius_),
        kernel(std::move(kernel_)),
        rho_floor(rho_floor_) {}
  explicit ControllerConfig(Kernel kernel_)
      : ControllerConfig(10.0, 0.0, kPi, std::move(kernel_), 1e-6) {}

  double kp;             // proportional gain, > 0
  double ki;             // integral gain, >= 0
  double sensing_radius; // in (0, pi]
  Kernel kernel;         // synthesis kernel f~
  double rho_floor;      // density floor used when inverting rho U

  void validate() const;
};

/// Time integral of the error field, rectangle rule, with a per-sample
/// anti-windup clamp.
class IntegralState {
 public:
  IntegralState(RingGrid grid, double clamp_bound)
      : acc_(grid), clamp_(clamp_bound) {}

  const RingField& accumulated() const { return acc_; }
  double clamp_bound() const { return clamp_; }

  void update(const RingField& e, double dt);

 private:
  RingField acc_;
  double clamp_;
};

/// Control source
///   q = Kp e - [e Vd]_x - [rho Ve]_x + Ki * integral,
/// with Vd = f~ * rho_d and Ve = window(f~, sensing_radius) * e.
/// Derivatives are periodic central differences.
class Controller {
 public:
  Controller(RingGrid grid, ControllerConfig config);

  const ControllerConfig& config() const { return cfg_; }

  RingField compute_q(const RingField& e, const RingField& rho,
                      const RingField& rho_d,
                      const IntegralState* integral = nullptr);

  /// Velocity realization of q through [rho U]_x = -q; see compute_U.
  RingField compute_u(const RingField& q, const RingField& rho) const;

 private:
  RingGrid grid_;
  ControllerConfig cfg_;
  ConvolutionEngine engine_;
  ConvolutionEngine::Spectrum synth_spec_;     // f~
  ConvolutionEngine::Spectrum windowed_spec_;  // window(f~, sensing_radius)
};

/// Solves [rho U]_x = -q for the periodic velocity field U. Requires q to be
/// zero-mean (otherwise no periodic solution exists; the tolerance scales
/// with the field mass and gain scale). Among the one-parameter family of
/// solutions, the constant is fixed so that the momentum integral of rho U
/// vanishes; rho is floored at config.rho_floor for the division only.
RingField compute_U(const RingField& q, const RingField& rho,
                    const ControllerConfig& config);

/// Removes the quadrature mean from q in place; returns the removed rate
/// (diagnostic for integral-action runs).
double project_zero_mean(RingField& q);

/// Periodic linear interpolation of U at each agent position.
std::vector<double> sample_control(const RingField& u,
                                   std::span<const double> positions);

/// One rectangle-rule update of the error integral (convenience wrapper).
void update_integral(IntegralState& integral, const RingField& e, double dt);

/// Closed-form error rate for cross-validating simulated trajectories.
enum class ErrorModel {
  kLimitedSensing,     // e_t = -Kp e + [rho_d (g*e)]_x - [e (g*e)]_x
  kDisturbance,        // e_t = -Kp e + [(rho_d - e) d]_x
  kKernelMismatch,     // e_t = -Kp e + [e (g~*rho_d)]_x + [rho_d (g~*e)]_x - [e (g~*e)]_x
};

RingField error_rhs_closed_form(ErrorModel model, const RingField& e,
                                const RingField& rho_d, const RingField& rho,
                                const Kernel& plant_kernel,
                                const ControllerConfig& config,
                                const StepDisturbance* disturbance = nullptr,
                                double t = 0.0);

}  // namespace ringctl
