#include "ringctl/micro.hpp"

#include <algorithm>
#include <cmath>

namespace ringctl {

AgentEnsemble::AgentEnsemble(std::vector<double> positions) : x_(std::move(positions)) {
  if (x_.empty()) throw InvalidParameter("AgentEnsemble: need at least one agent");
  for (double& x : x_) x = wrap_angle(x);
}

AgentEnsemble AgentEnsemble::evenly_spaced(int n) {
  if (n <= 0) throw InvalidParameter("evenly_spaced: agent count must be positive");
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    xs[static_cast<std::size_t>(i)] = -kPi + (i + 0.5) * kTwoPi / n;
  }
  return AgentEnsemble(std::move(xs));
}

AgentEnsemble AgentEnsemble::sampled(const RingField& rho0, int n,
                                     std::mt19937_64& rng) {
  if (n <= 0) throw InvalidParameter("sampled: agent count must be positive");
  const int m = rho0.size();
  std::vector<double> cdf(static_cast<std::size_t>(m) + 1, 0.0);
  for (int j = 0; j < m; ++j) {
    const double w = std::max(rho0[j], 0.0);
    cdf[static_cast<std::size_t>(j) + 1] = cdf[static_cast<std::size_t>(j)] + w;
  }
  const double total = cdf.back();
  if (!(total > 0.0)) throw InvalidParameter("sampled: density has no mass");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double h = rho0.grid().cell_width();
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double u = unif(rng) * total;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    int cell = static_cast<int>(std::distance(cdf.begin(), it)) - 1;
    cell = std::clamp(cell, 0, m - 1);
    const double lo = cdf[static_cast<std::size_t>(cell)];
    const double hi = cdf[static_cast<std::size_t>(cell) + 1];
    const double frac = hi > lo ? (u - lo) / (hi - lo) : 0.5;
    // cells are centered on the nodes
    xs[static_cast<std::size_t>(i)] =
        wrap_angle(rho0.grid().node(cell) + (frac - 0.5) * h);
  }
  return AgentEnsemble(std::move(xs));
}

std::vector<double> interaction_velocity(const AgentEnsemble& agents,
                                         const Kernel& kernel) {
  const auto xs = agents.positions();
  const int n = agents.count();
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const double xi = xs[static_cast<std::size_t>(i)];
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double d = xi - xs[static_cast<std::size_t>(j)];
      if (d >= kPi) d -= kTwoPi;
      if (d < -kPi) d += kTwoPi;
      s += kernel.fast_eval(d);
    }
    v[static_cast<std::size_t>(i)] = s;
  }
  return v;
}

namespace {
double max_speed(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] + b[i]));
  return s;
}
}  // namespace

void step_agents(AgentEnsemble& agents, const Kernel& kernel,
                 std::span<const double> control, double dt, double cell_width) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidParameter("step_agents: dt must be positive");
  }
  if (!control.empty() && control.size() != static_cast<std::size_t>(agents.count())) {
    throw DimensionMismatch("step_agents: control size does not match ensemble");
  }
  std::span<const double> u = control;
  std::vector<double> zeros;
  if (u.empty()) {
    zeros.assign(static_cast<std::size_t>(agents.count()), 0.0);
    u = zeros;
  }

  const auto v1 = interaction_velocity(agents, kernel);
  const double vmax = max_speed(v1, u);
  if (vmax > 0.0 && dt * vmax >= cell_width) {
    throw StepRejected("step_agents: dt * max speed exceeds the cell width",
                       0.9 * cell_width / vmax);
  }

  const auto xs = agents.positions();
  std::vector<double> half(xs.begin(), xs.end());
  for (std::size_t i = 0; i < half.size(); ++i) {
    half[i] = wrap_angle(half[i] + 0.5 * dt * (v1[i] + u[i]));
  }
  AgentEnsemble mid(std::move(half));
  const auto v2 = interaction_velocity(mid, kernel);

  auto out = agents.positions();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = wrap_angle(out[i] + dt * (v2[i] + u[i]));
  }
}

RingField deposit_agents(const AgentEnsemble& agents, const RingGrid& grid) {
  const int m = grid.size();
  const double h = grid.cell_width();
  RingField dep(grid);
  for (double x : agents.positions()) {
    const double s = (wrap_angle(x) + kPi) / h;
    int j = static_cast<int>(s);
    if (j >= m) j = m - 1;
    const double w = s - j;
    dep[j] += (1.0 - w) / h;
    dep[(j + 1) % m] += w / h;
  }
  return dep;
}

namespace {
std::vector<double> smoothing_row(const RingGrid& grid, double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw InvalidParameter("estimate_density: bandwidth must be positive");
  }
  const double sigma = 0.5 * bandwidth;
  const double kappa = 1.0 / (sigma * sigma);
  const int m = grid.size();
  const double h = grid.cell_width();
  std::vector<double> row(static_cast<std::size_t>(m));
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    const double z = wrap_angle(i * h + 0.0);
    row[static_cast<std::size_t>(i)] = std::exp(kappa * (std::cos(z) - 1.0));
    sum += row[static_cast<std::size_t>(i)];
  }
  // unit quadrature mass so the convolution preserves the deposit integral
  const double scale = 1.0 / (sum * h);
  for (double& v : row) v *= scale;
  return row;
}
}  // namespace

DensityEstimator::DensityEstimator(RingGrid grid, double bandwidth)
    : grid_(grid), bandwidth_(bandwidth), engine_(grid) {
  smoother_ = engine_.forward_samples(smoothing_row(grid, bandwidth));
}

RingField DensityEstimator::estimate(const AgentEnsemble& agents) {
  RingField rho = engine_.convolve(smoother_, engine_.forward(deposit_agents(agents, grid_)));
  // exact mass: rescale to the agent count and clear negative roundoff
  for (int j = 0; j < rho.size(); ++j) rho[j] = std::max(rho[j], 0.0);
  const double total = rho.integral();
  const double factor = agents.count() / total;
  for (int j = 0; j < rho.size(); ++j) rho[j] *= factor;
  return rho;
}

RingField estimate_density(const AgentEnsemble& agents, const RingGrid& grid,
                           double bandwidth) {
  DensityEstimator est(grid, bandwidth);
  return est.estimate(agents);
}

}  // namespace ringctl
