#include "ringctl/controller.hpp"

#include <algorithm>
#include <cmath>

namespace ringctl {

void ControllerConfig::validate() const {
  if (!(kp > 0.0) || !std::isfinite(kp)) {
    throw InvalidParameter("controller: kp must be positive");
  }
  if (!(ki >= 0.0) || !std::isfinite(ki)) {
    throw InvalidParameter("controller: ki must be nonnegative");
  }
  if (!(sensing_radius > 0.0) || sensing_radius > kPi) {
    throw InvalidParameter("controller: sensing radius must lie in (0, pi]");
  }
  if (!(rho_floor > 0.0)) {
    throw InvalidParameter("controller: rho_floor must be positive");
  }
}

void IntegralState::update(const RingField& e, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidParameter("integral update: dt must be positive");
  }
  require_same_grid(acc_, e);
  for (int j = 0; j < acc_.size(); ++j) {
    acc_[j] = std::clamp(acc_[j] + e[j] * dt, -clamp_, clamp_);
  }
}

Controller::Controller(RingGrid grid, ControllerConfig config)
    : grid_(grid), cfg_(std::move(config)), engine_(grid) {
  cfg_.validate();
  synth_spec_ = engine_.kernel_spectrum(cfg_.kernel);
  windowed_spec_ =
      engine_.kernel_spectrum(cfg_.kernel.windowed(cfg_.sensing_radius));
}

RingField Controller::compute_q(const RingField& e, const RingField& rho,
                                const RingField& rho_d,
                                const IntegralState* integral) {
  require_same_grid(e, rho);
  require_same_grid(e, rho_d);
  const auto vd = engine_.convolve(synth_spec_, engine_.forward(rho_d));
  const auto ve = engine_.convolve(windowed_spec_, engine_.forward(e));

  RingField q = central_difference(multiply(e, vd));
  const RingField transport = central_difference(multiply(rho, ve));
  for (int j = 0; j < q.size(); ++j) {
    q[j] = cfg_.kp * e[j] - q[j] - transport[j];
  }
  if (cfg_.ki > 0.0 && integral != nullptr) {
    axpy(cfg_.ki, integral->accumulated(), q);
  }
  return q;
}

RingField Controller::compute_u(const RingField& q, const RingField& rho) const {
  return compute_U(q, rho, cfg_);
}

RingField compute_U(const RingField& q, const RingField& rho,
                    const ControllerConfig& config) {
  require_same_grid(q, rho);
  const double mass_rate = q.integral();
  const double tol =
      1e-8 * std::max(1.0, std::abs(rho.integral())) * std::max(1.0, config.kp);
  if (std::abs(mass_rate) > tol) {
    throw NoPeriodicSolution(
        "compute_U: source is not zero-mean, [rho U]_x = -q has no periodic "
        "solution");
  }
  RingField flux = cumulative_integral(q);  // P(x), P(-pi) = 0
  double mean = 0.0;
  for (double v : flux.values()) mean += v;
  mean /= flux.size();
  RingField u(q.grid());
  for (int j = 0; j < u.size(); ++j) {
    // rho U = -(P - mean(P)): periodic, zero momentum integral
    u[j] = -(flux[j] - mean) / std::max(rho[j], config.rho_floor);
  }
  return u;
}

double project_zero_mean(RingField& q) {
  const double rate = q.integral() / kTwoPi;
  for (int j = 0; j < q.size(); ++j) q[j] -= rate;
  return rate * kTwoPi;
}

std::vector<double> sample_control(const RingField& u,
                                   std::span<const double> positions) {
  const int m = u.size();
  const double h = u.grid().cell_width();
  std::vector<double> out(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const double s = (wrap_angle(positions[i]) + kPi) / h;
    int j = static_cast<int>(s);
    if (j >= m) j = m - 1;  // guard the wrap cell
    const double w = s - j;
    out[i] = (1.0 - w) * u[j] + w * u[(j + 1) % m];
  }
  return out;
}

void update_integral(IntegralState& integral, const RingField& e, double dt) {
  integral.update(e, dt);
}

RingField error_rhs_closed_form(ErrorModel model, const RingField& e,
                                const RingField& rho_d, const RingField& rho,
                                const Kernel& plant_kernel,
                                const ControllerConfig& config,
                                const StepDisturbance* disturbance, double t) {
  require_same_grid(e, rho_d);
  require_same_grid(e, rho);
  RingField rhs = (-config.kp) * e;

  switch (model) {
    case ErrorModel::kLimitedSensing: {
      // g = window(f~, delta) - f~ with f~ expected to equal the plant kernel
      ConvolutionEngine engine(e.grid());
      const auto e_spec = engine.forward(e);
      const auto windowed = engine.convolve(
          engine.kernel_spectrum(config.kernel.windowed(config.sensing_radius)),
          e_spec);
      const auto full = engine.convolve(engine.kernel_spectrum(config.kernel), e_spec);
      const RingField tilde_v = windowed - full;  // (g * e)
      axpy(1.0, central_difference(multiply(rho_d, tilde_v)), rhs);
      axpy(-1.0, central_difference(multiply(e, tilde_v)), rhs);
      return rhs;
    }
    case ErrorModel::kDisturbance: {
      const double d = disturbance != nullptr ? disturbance->at(t) : 0.0;
      RingField carried = rho_d - e;
      axpy(d, central_difference(carried), rhs);
      return rhs;
    }
    case ErrorModel::kKernelMismatch: {
      ConvolutionEngine engine(e.grid());
      const auto mismatch_spec = [&] {
        auto synth = engine.kernel_spectrum(config.kernel);
        const auto plant = engine.kernel_spectrum(plant_kernel);
        for (std::size_t k = 0; k < synth.size(); ++k) synth[k] -= plant[k];
        return synth;  // spectrum of g~ = f~ - f
      }();
      const auto u_d = engine.convolve(mismatch_spec, engine.forward(rho_d));
      const auto u_e = engine.convolve(mismatch_spec, engine.forward(e));
      axpy(1.0, central_difference(multiply(e, u_d)), rhs);
      axpy(1.0, central_difference(multiply(rho_d, u_e)), rhs);
      axpy(-1.0, central_difference(multiply(e, u_e)), rhs);
      return rhs;
    }
  }
  throw InvalidParameter("error_rhs_closed_form: unknown model");
}

}  // namespace ringctl
