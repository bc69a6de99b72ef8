#include "ringctl/ring.hpp"

#include <algorithm>
#include <cmath>

namespace ringctl {

double wrap_angle(double x) {
  if (!std::isfinite(x)) {
    throw InvalidParameter("wrap_angle: input must be finite");
  }
  // remainder() lands in [-pi, pi]; fold the seam onto -pi.
  double r = std::remainder(x, kTwoPi);
  if (r >= kPi) r = -kPi;
  return r;
}

double wrapped_distance(double xi, double xj) { return wrap_angle(xi - xj); }

RingGrid::RingGrid(int cells) : m_(cells) {
  if (cells <= 0) {
    throw InvalidParameter("RingGrid: cell count must be positive");
  }
}

std::vector<double> RingGrid::nodes() const {
  std::vector<double> xs(static_cast<std::size_t>(m_));
  for (int k = 0; k < m_; ++k) xs[static_cast<std::size_t>(k)] = node(k);
  return xs;
}

RingField::RingField(RingGrid grid, std::vector<double> values)
    : grid_(grid), v_(std::move(values)) {
  if (static_cast<int>(v_.size()) != grid_.size()) {
    throw DimensionMismatch("RingField: sample count does not match grid");
  }
}

double RingField::integral() const {
  double s = 0.0;
  for (double x : v_) s += x;
  return s * grid_.cell_width();
}

double RingField::min() const { return *std::min_element(v_.begin(), v_.end()); }
double RingField::max() const { return *std::max_element(v_.begin(), v_.end()); }

double RingField::max_abs() const {
  double s = 0.0;
  for (double x : v_) s = std::max(s, std::abs(x));
  return s;
}

void require_same_grid(const RingField& a, const RingField& b) {
  if (!(a.grid() == b.grid())) {
    throw DimensionMismatch("fields live on different grids");
  }
}

RingField operator+(const RingField& a, const RingField& b) {
  require_same_grid(a, b);
  RingField out = a;
  for (int k = 0; k < a.size(); ++k) out[k] += b[k];
  return out;
}

RingField operator-(const RingField& a, const RingField& b) {
  require_same_grid(a, b);
  RingField out = a;
  for (int k = 0; k < a.size(); ++k) out[k] -= b[k];
  return out;
}

RingField operator*(double s, const RingField& a) {
  RingField out = a;
  for (int k = 0; k < a.size(); ++k) out[k] *= s;
  return out;
}

RingField multiply(const RingField& a, const RingField& b) {
  require_same_grid(a, b);
  RingField out = a;
  for (int k = 0; k < a.size(); ++k) out[k] *= b[k];
  return out;
}

void axpy(double s, const RingField& x, RingField& y) {
  require_same_grid(x, y);
  for (int k = 0; k < x.size(); ++k) y[k] += s * x[k];
}

RingField central_difference(const RingField& f) {
  const int m = f.size();
  const double inv2h = 1.0 / (2.0 * f.grid().cell_width());
  RingField out(f.grid());
  for (int j = 0; j < m; ++j) {
    const int jp = (j + 1) % m;
    const int jm = (j + m - 1) % m;
    out[j] = (f[jp] - f[jm]) * inv2h;
  }
  return out;
}

RingField cumulative_integral(const RingField& f) {
  const int m = f.size();
  const double h = f.grid().cell_width();
  RingField out(f.grid());
  out[0] = 0.0;
  for (int j = 1; j < m; ++j) {
    out[j] = out[j - 1] + 0.5 * h * (f[j] + f[j - 1]);
  }
  return out;
}

}  // namespace ringctl
