#include "fft.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>

namespace csirecip::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftPlan::FftPlan(std::size_t n, bool forward) : n_(n) {
  std::lock_guard lock(planner_mutex());
  scratch_in_ = fftw_alloc_complex(n);
  scratch_out_ = fftw_alloc_complex(n);
  plan_ = fftw_plan_dft_1d(static_cast<int>(n), scratch_in_, scratch_out_,
                           forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan_);
  fftw_free(scratch_in_);
  fftw_free(scratch_out_);
}

void FftPlan::execute(const cvec& in, cvec& out) const {
  // The new-array execute interface requires the same alignment as at
  // planning time, which std::vector does not guarantee, so copy through
  // the plan's own buffers.
  std::memcpy(scratch_in_, in.data(), n_ * sizeof(fftw_complex));
  fftw_execute(plan_);
  out.resize(n_);
  std::memcpy(static_cast<void*>(out.data()), scratch_out_, n_ * sizeof(fftw_complex));
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

cvec fft_real(const std::vector<double>& x, std::size_t n) {
  cvec in(n, 0.0), out;
  std::copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(std::min(n, x.size())), in.begin());
  FftPlan(n, true).execute(in, out);
  return out;
}

cvec ifft(const cvec& X) {
  cvec out;
  FftPlan(X.size(), false).execute(X, out);
  return out;
}

}  // namespace csirecip::detail
