#include "ringctl/convolution.hpp"

#include <fftw3.h>

#include <mutex>

namespace ringctl {

namespace {
// FFTW plan creation is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct ConvolutionEngine::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  int m = 0;

  explicit Plans(int cells) : m(cells) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    real = fftw_alloc_real(static_cast<std::size_t>(m));
    cplx = fftw_alloc_complex(static_cast<std::size_t>(m / 2 + 1));
    r2c = fftw_plan_dft_r2c_1d(m, real, cplx, FFTW_ESTIMATE);
    c2r = fftw_plan_dft_c2r_1d(m, cplx, real, FFTW_ESTIMATE);
  }

  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
    fftw_free(real);
    fftw_free(cplx);
  }
};

ConvolutionEngine::ConvolutionEngine(RingGrid grid)
    : grid_(grid), plans_(std::make_unique<Plans>(grid.size())) {}

ConvolutionEngine::~ConvolutionEngine() = default;

ConvolutionEngine::Spectrum ConvolutionEngine::forward_samples(
    const std::vector<double>& samples) {
  const int m = grid_.size();
  if (static_cast<int>(samples.size()) != m) {
    throw DimensionMismatch("forward_samples: sample count does not match grid");
  }
  for (int k = 0; k < m; ++k) plans_->real[k] = samples[static_cast<std::size_t>(k)];
  fftw_execute(plans_->r2c);
  Spectrum out(static_cast<std::size_t>(m / 2 + 1));
  for (int k = 0; k <= m / 2; ++k) {
    out[static_cast<std::size_t>(k)] = {plans_->cplx[k][0], plans_->cplx[k][1]};
  }
  return out;
}

ConvolutionEngine::Spectrum ConvolutionEngine::forward(const RingField& f) {
  if (!(f.grid() == grid_)) {
    throw DimensionMismatch("forward: field grid does not match engine grid");
  }
  const int m = grid_.size();
  for (int k = 0; k < m; ++k) plans_->real[k] = f[k];
  fftw_execute(plans_->r2c);
  Spectrum out(static_cast<std::size_t>(m / 2 + 1));
  for (int k = 0; k <= m / 2; ++k) {
    out[static_cast<std::size_t>(k)] = {plans_->cplx[k][0], plans_->cplx[k][1]};
  }
  return out;
}

ConvolutionEngine::Spectrum ConvolutionEngine::kernel_spectrum(const Kernel& k) {
  return forward_samples(k.sample_offsets(grid_));
}

RingField ConvolutionEngine::convolve(const Spectrum& kernel_spec,
                                      const Spectrum& field_spec) {
  const int m = grid_.size();
  const std::size_t n = static_cast<std::size_t>(m / 2 + 1);
  if (kernel_spec.size() != n || field_spec.size() != n) {
    throw DimensionMismatch("convolve: spectrum size does not match grid");
  }
  // h/m: quadrature weight plus FFTW's unnormalized inverse.
  const double scale = grid_.cell_width() / m;
  for (std::size_t k = 0; k < n; ++k) {
    const std::complex<double> prod = kernel_spec[k] * field_spec[k];
    plans_->cplx[k][0] = prod.real();
    plans_->cplx[k][1] = prod.imag();
  }
  fftw_execute(plans_->c2r);
  RingField out(grid_);
  for (int k = 0; k < m; ++k) out[k] = plans_->real[k] * scale;
  return out;
}

RingField ConvolutionEngine::convolve(const Kernel& k, const RingField& f) {
  return convolve(kernel_spectrum(k), forward(f));
}

RingField circular_convolution(const Kernel& k, const RingField& f) {
  ConvolutionEngine engine(f.grid());
  return engine.convolve(k, f);
}

RingField convolution_derivative(const Kernel& k, const RingField& f) {
  return central_difference(circular_convolution(k, f));
}

}  // namespace ringctl
