#pragma once

// Thin RAII layer over FFTW plans for 1-D real and complex transforms.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace pabf::detail {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

template <typename T>
struct FftwDeleter {
  void operator()(T* p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter<T>>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
}

/// Forward/inverse real transform pair of fixed length. Not thread-safe.
class RealFft {
 public:
  explicit RealFft(std::size_t n);

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }

  // Loads `x` and transforms; the spectrum is then available via spectrum().
  void forward(std::span<const double> x);
  std::span<fftw_complex> spectrum() { return {freq_.get(), bins()}; }
  // Inverse of the current spectrum, scaled by 1/n.
  std::vector<double> inverse();

 private:
  std::size_t n_;
  FftwBuffer<double> time_;
  FftwBuffer<fftw_complex> freq_;
  Plan fwd_, inv_;
};

/// Complex transform pair of fixed length. Not thread-safe.
class ComplexFft {
 public:
  explicit ComplexFft(std::size_t n);

  std::size_t size() const { return n_; }
  std::span<fftw_complex> data() { return {buf_.get(), n_}; }
  void forward() { fftw_execute(fwd_.get()); }
  void inverse() { fftw_execute(inv_.get()); }

 private:
  std::size_t n_;
  FftwBuffer<fftw_complex> buf_;
  Plan fwd_, inv_;
};

}  // namespace pabf::detail
