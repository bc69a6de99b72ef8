#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "ringctl/ring.hpp"

namespace ringctl {

/// Periodic pairwise interaction velocity f(z) on [-pi, pi].
///
/// Kernels are immutable values; windowing and amplitude scaling return new
/// kernels sharing the underlying rule. Offset sampling uses one convention
/// worth noting: the two endpoints +-pi describe the same point of the
/// circle, so the seam sample gets the symmetrized value
/// (f(-pi) + f(pi)) / 2, which is 0 for every odd kernel.
class Kernel {
 public:
  /// sign(z) * (-G e^{-|z|/L} + e^{-|z|}), with f(0) = 0 so that an agent
  /// exerts no force on itself. Requires L > 0.
  static Kernel morse(double G, double L);

  /// Custom rule defined on the closed interval [-pi, pi]. `odd` declares
  /// the symmetry; it is the caller's responsibility when set.
  static Kernel from_function(std::function<double(double)> rule, bool odd);

  /// Zero outside [-delta, delta], unchanged inside. delta in (0, pi].
  Kernel windowed(double delta) const;

  /// Amplitude-scaled copy (used for mean-field 1/N normalization).
  Kernel scaled(double factor) const;

  /// Evaluate at any angle (wrapped onto [-pi, pi) first).
  double operator()(double z) const;

  /// Tabulated evaluation for pairwise loops; max error ~1e-9 for the
  /// Morse family. Table is built lazily and shared between copies.
  double fast_eval(double z) const;

  /// Samples indexed by grid offset i, at angle wrap(i * cell_width).
  std::vector<double> sample_offsets(const RingGrid& grid) const;

  /// Samples in node order (angle -pi + k * cell_width), e.g. for norms of
  /// kernel differences.
  RingField sample_field(const RingGrid& grid) const;

  double window_radius() const;
  bool is_odd() const;

 private:
  struct Impl;
  explicit Kernel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

}  // namespace ringctl
