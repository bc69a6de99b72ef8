#include "ringctl/kernel.hpp"

#include <cmath>
#include <mutex>

namespace ringctl {

namespace {
constexpr int kTableIntervals = 1 << 16;
}

struct Kernel::Impl {
  Impl() = default;
  // copies share the rule but rebuild their own lookup table
  Impl(const Impl& other)
      : rule(other.rule), odd(other.odd), delta(other.delta), scale(other.scale) {}

  std::function<double(double)> rule;  // on [-pi, pi], unscaled, unwindowed
  bool odd = false;
  double delta = kPi;  // window radius
  double scale = 1.0;

  mutable std::once_flag table_once;
  // Odd kernels store values on [0, pi]; others on [-pi, pi].
  mutable std::vector<double> table;

  double raw(double z) const {
    if (std::abs(z) > delta) return 0.0;
    return scale * rule(z);
  }

  void build_table() const {
    const int n = kTableIntervals;
    if (odd) {
      table.resize(static_cast<std::size_t>(n) + 1);
      const double dz = kPi / n;
      for (int k = 0; k <= n; ++k) {
        table[static_cast<std::size_t>(k)] = raw(k * dz);
      }
    } else {
      table.resize(2 * static_cast<std::size_t>(n) + 1);
      const double dz = kPi / n;
      for (int k = 0; k <= 2 * n; ++k) {
        table[static_cast<std::size_t>(k)] = raw(-kPi + k * dz);
      }
    }
  }
};

Kernel Kernel::morse(double G, double L) {
  if (!(L > 0.0) || !std::isfinite(L) || !std::isfinite(G)) {
    throw InvalidParameter("morse kernel: L must be positive and finite");
  }
  auto impl = std::make_shared<Impl>();
  impl->rule = [G, L](double z) {
    if (z == 0.0) return 0.0;
    const double a = std::abs(z);
    const double v = -G * std::exp(-a / L) + std::exp(-a);
    return z > 0.0 ? v : -v;
  };
  impl->odd = true;
  return Kernel(std::move(impl));
}

Kernel Kernel::from_function(std::function<double(double)> rule, bool odd) {
  auto impl = std::make_shared<Impl>();
  impl->rule = std::move(rule);
  impl->odd = odd;
  return Kernel(std::move(impl));
}

Kernel Kernel::windowed(double delta) const {
  if (!(delta > 0.0) || delta > kPi || !std::isfinite(delta)) {
    throw InvalidParameter("windowed kernel: radius must lie in (0, pi]");
  }
  auto impl = std::make_shared<Impl>(*impl_);
  impl->delta = std::min(impl_->delta, delta);
  return Kernel(std::move(impl));
}

Kernel Kernel::scaled(double factor) const {
  if (!std::isfinite(factor)) {
    throw InvalidParameter("scaled kernel: factor must be finite");
  }
  auto impl = std::make_shared<Impl>(*impl_);
  impl->scale = impl_->scale * factor;
  return Kernel(std::move(impl));
}

double Kernel::operator()(double z) const { return impl_->raw(wrap_angle(z)); }

double Kernel::fast_eval(double z) const {
  std::call_once(impl_->table_once, [this] { impl_->build_table(); });
  const double zw = wrap_angle(z);
  const int n = kTableIntervals;
  const double inv_dz = n / kPi;
  const auto& t = impl_->table;
  if (impl_->odd) {
    const double a = std::abs(zw);
    const double s = a * inv_dz;
    const int k = std::min(static_cast<int>(s), n - 1);
    const double w = s - k;
    const double v = (1.0 - w) * t[static_cast<std::size_t>(k)] +
                     w * t[static_cast<std::size_t>(k) + 1];
    return zw >= 0.0 ? v : -v;
  }
  const double s = (zw + kPi) * inv_dz;
  const int k = std::min(static_cast<int>(s), 2 * n - 1);
  const double w = s - k;
  return (1.0 - w) * t[static_cast<std::size_t>(k)] +
         w * t[static_cast<std::size_t>(k) + 1];
}

std::vector<double> Kernel::sample_offsets(const RingGrid& grid) const {
  const int m = grid.size();
  const double h = grid.cell_width();
  std::vector<double> row(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double z = i * h;
    if (2 * i == m) {
      // seam: +-pi identified
      row[static_cast<std::size_t>(i)] =
          0.5 * (impl_->raw(-kPi) + impl_->raw(kPi));
    } else if (z < kPi) {
      row[static_cast<std::size_t>(i)] = impl_->raw(z);
    } else {
      row[static_cast<std::size_t>(i)] = impl_->raw(z - kTwoPi);
    }
  }
  return row;
}

RingField Kernel::sample_field(const RingGrid& grid) const {
  const int m = grid.size();
  RingField out(grid);
  out[0] = 0.5 * (impl_->raw(-kPi) + impl_->raw(kPi));  // node 0 is the seam
  for (int k = 1; k < m; ++k) {
    out[k] = impl_->raw(grid.node(k));
  }
  return out;
}

double Kernel::window_radius() const { return impl_->delta; }
bool Kernel::is_odd() const { return impl_->odd; }

}  // namespace ringctl
