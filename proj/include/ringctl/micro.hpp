#pragma once

#include <random>
#include <span>
#include <vector>

#include "ringctl/convolution.hpp"
#include "ringctl/kernel.hpp"
#include "ringctl/ring.hpp"

namespace ringctl {

/// N agent angles on the ring, kept wrapped to [-pi, pi).
class AgentEnsemble {
 public:
  explicit AgentEnsemble(std::vector<double> positions);

  /// x_i = -pi + (i - 1/2) * 2 pi / n, i = 1..n.
  static AgentEnsemble evenly_spaced(int n);

  /// Inverse-CDF sampling from a nonnegative density (piecewise constant
  /// over cells, uniform within a cell).
  static AgentEnsemble sampled(const RingField& rho0, int n,
                               std::mt19937_64& rng);

  int count() const { return static_cast<int>(x_.size()); }
  std::span<const double> positions() const { return x_; }
  std::span<double> positions() { return x_; }

 private:
  std::vector<double> x_;
};

/// v_i = sum_j f(wrap(x_i - x_j)); the self term contributes f(0) = 0.
std::vector<double> interaction_velocity(const AgentEnsemble& agents,
                                         const Kernel& kernel);

/// Advances every agent by explicit midpoint under pairwise interactions
/// plus a per-agent control velocity held constant across the step.
/// Rejects dt when max speed * dt >= cell_width.
void step_agents(AgentEnsemble& agents, const Kernel& kernel,
                 std::span<const double> control, double dt, double cell_width);

/// Periodic kernel-density estimate on the grid. `bandwidth` is the full
/// width of the smoothing kernel: a von Mises bump with concentration
/// (2 / bandwidth)^2, i.e. circular standard deviation bandwidth / 2.
/// Agents are deposited with linear (cloud-in-cell) weights before the
/// smoothing convolution; the quadrature integral equals the agent count
/// exactly by construction.
RingField estimate_density(const AgentEnsemble& agents, const RingGrid& grid,
                           double bandwidth);

/// estimate_density with the smoothing spectrum cached across calls.
class DensityEstimator {
 public:
  DensityEstimator(RingGrid grid, double bandwidth);

  double bandwidth() const { return bandwidth_; }
  RingField estimate(const AgentEnsemble& agents);

 private:
  RingGrid grid_;
  double bandwidth_;
  ConvolutionEngine engine_;
  ConvolutionEngine::Spectrum smoother_;
};

/// Linear-weight (cloud-in-cell) deposit of unit masses; integral = n / h.
RingField deposit_agents(const AgentEnsemble& agents, const RingGrid& grid);

}  // namespace ringctl
