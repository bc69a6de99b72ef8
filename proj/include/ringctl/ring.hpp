#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "ringctl/errors.hpp"

namespace ringctl {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Maps an angle onto [-pi, pi). The seam is identified with -pi.
double wrap_angle(double x);

/// Wrapped signed distance xi - xj in [-pi, pi).
double wrapped_distance(double xi, double xj);

/// Uniform periodic grid on [-pi, pi): m cells, node k at -pi + k * width.
/// Node m is identified with node 0; every field stores one sample per cell.
class RingGrid {
 public:
  explicit RingGrid(int cells);

  int size() const { return m_; }
  double cell_width() const { return kTwoPi / m_; }
  double node(int k) const { return -kPi + k * cell_width(); }
  std::vector<double> nodes() const;

  friend bool operator==(const RingGrid&, const RingGrid&) = default;

 private:
  int m_;
};

/// Scalar samples over a RingGrid (densities, velocities, error and control
/// fields). Periodicity is structural: one stored sample per cell.
class RingField {
 public:
  explicit RingField(RingGrid grid, double fill = 0.0)
      : grid_(grid), v_(static_cast<std::size_t>(grid.size()), fill) {}
  RingField(RingGrid grid, std::vector<double> values);

  const RingGrid& grid() const { return grid_; }
  int size() const { return grid_.size(); }

  double& operator[](int k) { return v_[static_cast<std::size_t>(k)]; }
  double operator[](int k) const { return v_[static_cast<std::size_t>(k)]; }

  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }

  /// Midpoint-rule integral over the circle; exact for constants.
  double integral() const;

  double min() const;
  double max() const;
  double max_abs() const;

 private:
  RingGrid grid_;
  std::vector<double> v_;
};

void require_same_grid(const RingField& a, const RingField& b);

// elementwise helpers used throughout the solvers
RingField operator+(const RingField& a, const RingField& b);
RingField operator-(const RingField& a, const RingField& b);
RingField operator*(double s, const RingField& a);
RingField multiply(const RingField& a, const RingField& b);
void axpy(double s, const RingField& x, RingField& y);  // y += s * x

/// Second-order central difference with periodic wrap.
RingField central_difference(const RingField& f);

/// Trapezoidal antiderivative P with P(node 0) = 0; P(x) ~ integral from -pi
/// to x. For zero-mean periodic inputs the wrap value returns to 0.
RingField cumulative_integral(const RingField& f);

}  // namespace ringctl
