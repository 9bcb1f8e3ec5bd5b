#pragma once

// Thin RAII layer over FFTW for the fixed-size complex transforms used by the
// wavelet and reconstruction code. Planning is serialised; execution is not.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <vector>

namespace csirecip::detail {

using cvec = std::vector<std::complex<double>>;

class FftPlan {
 public:
  FftPlan(std::size_t n, bool forward);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const noexcept { return n_; }

  /// Unnormalised transform; `in` and `out` must both have size() elements.
  void execute(const cvec& in, cvec& out) const;

 private:
  std::size_t n_;
  fftw_plan plan_;
  fftw_complex* scratch_in_;
  fftw_complex* scratch_out_;
};

std::size_t next_pow2(std::size_t n);

/// Forward transform of a real series zero-padded to `n`.
cvec fft_real(const std::vector<double>& x, std::size_t n);

/// Unnormalised inverse transform.
cvec ifft(const cvec& X);

}  // namespace csirecip::detail
