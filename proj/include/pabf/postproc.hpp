#pragma once

#include <span>
#include <vector>

#include "pabf/image.hpp"

namespace pabf {

struct FilterSpec {
  double pass_lo = 4.5e6;  // Hz
  double pass_hi = 11.5e6; // Hz
  double tukey_alpha = 0.5;

  void validate(double fs) const;
};

/// 4.5-11.5 MHz, for the 4 MHz simulation probe.
FilterSpec simulation_filter();
/// 11-19 MHz, for the 8.5 MHz experimental probe.
FilterSpec experimental_filter();

/// Zero-phase mask gain at frequency |f|: 0 outside [pass_lo, pass_hi],
/// raised-cosine over the outer alpha/2 of the band on each edge, 1 between.
double passband_gain(const FilterSpec& spec, double f);

/// Filters one fs-rate trace in the frequency domain. The DC bin is zeroed.
std::vector<double> bandpass_trace(std::span<const double> trace, const FilterSpec& spec,
                                   double fs);

/// Magnitude of the analytic signal of one trace.
std::vector<double> envelope_trace(std::span<const double> trace);

/// Column-wise band-pass. Requires a raw image on a time-aligned grid.
BeamformedImage bandpass(const BeamformedImage& image, const FilterSpec& spec, double fs);

/// Column-wise analytic-signal magnitude of a raw or filtered image.
BeamformedImage envelope(const BeamformedImage& image);

/// v -> max(20 log10(v / max), -dynamic_range_db).
BeamformedImage log_compress(const BeamformedImage& image, double dynamic_range_db);

}  // namespace pabf
