#include "pabf/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "pabf/errors.hpp"

namespace pabf {

void FilterSpec::validate(double fs) const {
  if (!(pass_lo > 0.0 && pass_lo < pass_hi && pass_hi < fs / 2.0)) {
    throw ParameterError("filter: need 0 < pass_lo < pass_hi < fs/2 (got " +
                         std::to_string(pass_lo) + ", " + std::to_string(pass_hi) +
                         ", fs=" + std::to_string(fs) + ")");
  }
  if (!(tukey_alpha >= 0.0 && tukey_alpha <= 1.0)) {
    throw ParameterError("filter: tukey_alpha must lie in [0, 1]");
  }
}

FilterSpec simulation_filter() { return {4.5e6, 11.5e6, 0.5}; }
FilterSpec experimental_filter() { return {11.0e6, 19.0e6, 0.5}; }

double passband_gain(const FilterSpec& spec, double f) {
  f = std::abs(f);
  if (f < spec.pass_lo || f > spec.pass_hi) return 0.0;
  const double taper = 0.5 * spec.tukey_alpha * (spec.pass_hi - spec.pass_lo);
  if (taper <= 0.0) return 1.0;
  const double from_edge = std::min(f - spec.pass_lo, spec.pass_hi - f);
  if (from_edge >= taper) return 1.0;
  return 0.5 * (1.0 - std::cos(std::numbers::pi * from_edge / taper));
}

namespace {

// Filters `trace` in place through `fft`, which must match its length.
void apply_mask(detail::RealFft& fft, std::span<const double> gains, std::span<double> trace) {
  fft.forward(trace);
  auto spec = fft.spectrum();
  for (std::size_t k = 0; k < spec.size(); ++k) {
    spec[k][0] *= gains[k];
    spec[k][1] *= gains[k];
  }
  const auto out = fft.inverse();
  std::copy(out.begin(), out.end(), trace.begin());
}

std::vector<double> mask_gains(const FilterSpec& spec, double fs, std::size_t n) {
  std::vector<double> gains(n / 2 + 1);
  for (std::size_t k = 0; k < gains.size(); ++k) {
    gains[k] = passband_gain(spec, static_cast<double>(k) * fs / static_cast<double>(n));
  }
  gains[0] = 0.0;
  return gains;
}

void envelope_in_place(detail::ComplexFft& fft, std::span<double> trace) {
  const std::size_t n = trace.size();
  auto buf = fft.data();
  for (std::size_t k = 0; k < n; ++k) {
    buf[k][0] = trace[k];
    buf[k][1] = 0.0;
  }
  fft.forward();
  // One-sided spectrum: keep DC (and Nyquist for even n), double positives.
  const std::size_t half = n / 2;
  for (std::size_t k = 1; k < n; ++k) {
    double w = 0.0;
    if (k < (n + 1) / 2) {
      w = 2.0;
    } else if (n % 2 == 0 && k == half) {
      w = 1.0;
    }
    buf[k][0] *= w;
    buf[k][1] *= w;
  }
  fft.inverse();
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) trace[k] = std::hypot(buf[k][0], buf[k][1]) * scale;
}

}  // namespace

std::vector<double> bandpass_trace(std::span<const double> trace, const FilterSpec& spec,
                                   double fs) {
  spec.validate(fs);
  std::vector<double> out(trace.begin(), trace.end());
  if (out.empty()) return out;
  detail::RealFft fft(out.size());
  apply_mask(fft, mask_gains(spec, fs, out.size()), out);
  return out;
}

std::vector<double> envelope_trace(std::span<const double> trace) {
  std::vector<double> out(trace.begin(), trace.end());
  if (out.empty()) return out;
  detail::ComplexFft fft(out.size());
  envelope_in_place(fft, out);
  return out;
}

BeamformedImage bandpass(const BeamformedImage& image, const FilterSpec& spec, double fs) {
  if (image.stage != Stage::Raw) {
    throw ParameterError("bandpass: expected a raw image, got stage " +
                         std::string(to_string(image.stage)));
  }
  if (!image.grid.time_aligned) {
    throw ParameterError("bandpass: grid is not time-aligned (dz != c/fs); "
                         "filter frequencies would be meaningless");
  }
  spec.validate(fs);
  BeamformedImage out = image;
  out.stage = Stage::Filtered;
  const std::size_t nz = image.grid.nz;
  detail::RealFft fft(nz);
  const auto gains = mask_gains(spec, fs, nz);
  for (std::size_t ix = 0; ix < image.grid.nx; ++ix) apply_mask(fft, gains, out.column(ix));
  return out;
}

BeamformedImage envelope(const BeamformedImage& image) {
  if (image.stage != Stage::Raw && image.stage != Stage::Filtered) {
    throw ParameterError("envelope: expected a raw or filtered image, got stage " +
                         std::string(to_string(image.stage)));
  }
  BeamformedImage out = image;
  out.stage = Stage::Envelope;
  detail::ComplexFft fft(image.grid.nz);
  for (std::size_t ix = 0; ix < image.grid.nx; ++ix) envelope_in_place(fft, out.column(ix));
  return out;
}

BeamformedImage log_compress(const BeamformedImage& image, double dynamic_range_db) {
  if (image.stage != Stage::Envelope) {
    throw ParameterError("log_compress: expected an envelope image, got stage " +
                         std::string(to_string(image.stage)));
  }
  if (!(dynamic_range_db > 0.0)) throw ParameterError("log_compress: dynamic range must be > 0");
  const double peak = image.max_value();
  if (!(peak > 0.0)) throw DataError("log_compress: image is all zeros");
  BeamformedImage out = image;
  out.stage = Stage::LogCompressed;
  for (double& v : out.values) {
    const double db = v > 0.0 ? 20.0 * std::log10(v / peak) : -dynamic_range_db;
    v = std::max(db, -dynamic_range_db);
  }
  return out;
}

}  // namespace pabf
