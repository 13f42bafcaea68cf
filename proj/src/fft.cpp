#include "accomp/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "accomp/errors.hpp"

namespace accomp {
namespace {

// The FFTW planner is not reentrant; execution with new-array interfaces is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct RealFft::Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

RealFft::RealFft(std::size_t size) : size_(size), plans_(std::make_unique<Plans>()) {
  if (size < 2 || size % 2 != 0) throw InvalidArgument("FFT size must be even and >= 2");
  const int n = static_cast<int>(size);
  double* re = fftw_alloc_real(size);
  fftw_complex* spec = fftw_alloc_complex(size / 2 + 1);
  {
    std::lock_guard lock(planner_mutex());
    plans_->forward = fftw_plan_dft_r2c_1d(n, re, spec, FFTW_ESTIMATE);
    plans_->inverse = fftw_plan_dft_c2r_1d(n, spec, re, FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
  }
  fftw_free(re);
  fftw_free(spec);
}

RealFft::~RealFft() {
  if (!plans_) return;
  std::lock_guard lock(planner_mutex());
  if (plans_->forward) fftw_destroy_plan(plans_->forward);
  if (plans_->inverse) fftw_destroy_plan(plans_->inverse);
}

RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> in, std::span<Complex> out) const {
  if (in.size() != size_ || out.size() != bins()) throw InvalidArgument("RealFft::forward: size");
  // Aligned scratch keeps the plan's SIMD assumptions valid.
  double* re = fftw_alloc_real(size_);
  fftw_complex* spec = fftw_alloc_complex(bins());
  std::copy(in.begin(), in.end(), re);
  fftw_execute_dft_r2c(plans_->forward, re, spec);
  for (std::size_t i = 0; i < bins(); ++i) out[i] = Complex(spec[i][0], spec[i][1]);
  fftw_free(re);
  fftw_free(spec);
}

void RealFft::inverse(std::span<const Complex> in, std::span<double> out) const {
  if (in.size() != bins() || out.size() != size_) throw InvalidArgument("RealFft::inverse: size");
  double* re = fftw_alloc_real(size_);
  fftw_complex* spec = fftw_alloc_complex(bins());
  for (std::size_t i = 0; i < bins(); ++i) {
    spec[i][0] = in[i].real();
    spec[i][1] = in[i].imag();
  }
  // DC and Nyquist are real for a real signal.
  spec[0][1] = 0.0;
  spec[bins() - 1][1] = 0.0;
  fftw_execute_dft_c2r(plans_->inverse, spec, re);
  const double scale = 1.0 / static_cast<double>(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = re[i] * scale;
  fftw_free(re);
  fftw_free(spec);
}

}  // namespace accomp
