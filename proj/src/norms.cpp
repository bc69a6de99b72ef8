#include "ringctl/norms.hpp"

#include <cmath>

namespace ringctl {

double lp_norm(const RingField& f, double p) {
  if (p == kInfNorm) return f.max_abs();
  if (p != 1.0 && p != 2.0) {
    throw InvalidParameter("lp_norm: p must be 1, 2 or infinity");
  }
  const double h = f.grid().cell_width();
  double s = 0.0;
  if (p == 1.0) {
    for (double v : f.values()) s += std::abs(v);
    return s * h;
  }
  for (double v : f.values()) s += v * v;
  return std::sqrt(s * h);
}

namespace {

constexpr double kProbFloor = 1e-12;

// Normalizes to unit quadrature integral, zeroing negative samples that are
// within tolerance of roundoff; larger negatives are an input error.
std::vector<double> normalized_probability(const RingField& f, const char* role) {
  const double scale = f.max_abs();
  const double neg_tol = 1e-9 * (scale > 0.0 ? scale : 1.0);
  std::vector<double> p(f.values().begin(), f.values().end());
  for (double& v : p) {
    if (v < 0.0) {
      if (v < -neg_tol) {
        throw InvalidParameter(std::string("kl_divergence: negative density sample in ") + role);
      }
      v = 0.0;
    }
  }
  double total = 0.0;
  for (double v : p) total += v;
  total *= f.grid().cell_width();
  if (!(total > 0.0)) {
    throw InvalidParameter(std::string("kl_divergence: ") + role + " has no positive mass");
  }
  for (double& v : p) v /= total;
  return p;
}

}  // namespace

double kl_divergence(const RingField& rho, const RingField& rho_d) {
  require_same_grid(rho, rho_d);
  const auto p = normalized_probability(rho, "rho");
  const auto q = normalized_probability(rho_d, "rho_d");
  const double h = rho.grid().cell_width();
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) continue;  // 0 log 0 = 0
    s += p[k] * std::log(p[k] / std::max(q[k], kProbFloor));
  }
  s *= h;
  return s > 0.0 ? s : 0.0;
}

RingField von_mises_field(double mu, double k, double mass, const RingGrid& grid) {
  if (!(k >= 0.0) || !std::isfinite(k)) {
    throw InvalidParameter("von_mises_field: concentration must be >= 0");
  }
  if (!(mass > 0.0) || !std::isfinite(mass) || !std::isfinite(mu)) {
    throw InvalidParameter("von_mises_field: mass must be positive");
  }
  RingField out(grid);
  // subtract k so the exponent peaks at 0; overall scale is renormalized away
  for (int j = 0; j < grid.size(); ++j) {
    out[j] = std::exp(k * (std::cos(grid.node(j) - mu) - 1.0));
  }
  const double total = out.integral();
  const double factor = mass / total;
  for (int j = 0; j < grid.size(); ++j) out[j] *= factor;
  return out;
}

}  // namespace ringctl
