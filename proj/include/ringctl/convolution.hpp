#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "ringctl/kernel.hpp"
#include "ringctl/ring.hpp"

namespace ringctl {

/// FFT-backed circular convolution on one grid. Owns its transform plans and
/// scratch buffers, so one engine must not be shared between threads;
/// simulations each hold their own.
class ConvolutionEngine {
 public:
  using Spectrum = std::vector<std::complex<double>>;

  explicit ConvolutionEngine(RingGrid grid);
  ~ConvolutionEngine();
  ConvolutionEngine(const ConvolutionEngine&) = delete;
  ConvolutionEngine& operator=(const ConvolutionEngine&) = delete;

  const RingGrid& grid() const { return grid_; }

  Spectrum forward(const RingField& f);
  Spectrum forward_samples(const std::vector<double>& samples);
  Spectrum kernel_spectrum(const Kernel& k);

  /// Quadrature-weighted circular convolution: with spectra A = F(kernel
  /// offsets) and B = F(field), returns IFFT(A .* B) * cell_width, matching
  /// the direct sum  out_j = sum_k kernel(wrap(x_j - y_k)) field_k h.
  RingField convolve(const Spectrum& kernel_spec, const Spectrum& field_spec);

  RingField convolve(const Kernel& k, const RingField& f);

 private:
  RingGrid grid_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

/// One-shot convolution (plans built per call; fine outside hot loops).
RingField circular_convolution(const Kernel& k, const RingField& f);

/// Spatial derivative of (k * f), realized as the periodic central
/// difference of the convolution; identical (to rounding) to convolving
/// with the differentiated field.
RingField convolution_derivative(const Kernel& k, const RingField& f);

}  // namespace ringctl
