#include "fft.hpp"

#include <algorithm>
#include <mutex>

namespace pabf::detail {

namespace {
// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(std::size_t n)
    : n_(n), time_(fftw_buffer<double>(n)), freq_(fftw_buffer<fftw_complex>(n / 2 + 1)) {
  std::lock_guard lock(planner_mutex());
  const int len = static_cast<int>(n);
  fwd_.reset(fftw_plan_dft_r2c_1d(len, time_.get(), freq_.get(), FFTW_ESTIMATE));
  inv_.reset(fftw_plan_dft_c2r_1d(len, freq_.get(), time_.get(), FFTW_ESTIMATE));
}

void RealFft::forward(std::span<const double> x) {
  std::copy(x.begin(), x.end(), time_.get());
  fftw_execute(fwd_.get());
}

std::vector<double> RealFft::inverse() {
  // c2r destroys its input; callers reload before the next inverse.
  fftw_execute(inv_.get());
  std::vector<double> out(n_);
  const double scale = 1.0 / static_cast<double>(n_);
  for (std::size_t k = 0; k < n_; ++k) out[k] = time_[k] * scale;
  return out;
}

ComplexFft::ComplexFft(std::size_t n) : n_(n), buf_(fftw_buffer<fftw_complex>(n)) {
  std::lock_guard lock(planner_mutex());
  const int len = static_cast<int>(n);
  fwd_.reset(fftw_plan_dft_1d(len, buf_.get(), buf_.get(), FFTW_FORWARD, FFTW_ESTIMATE));
  inv_.reset(fftw_plan_dft_1d(len, buf_.get(), buf_.get(), FFTW_BACKWARD, FFTW_ESTIMATE));
}

}  // namespace pabf::detail
