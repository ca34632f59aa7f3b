#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pabf/geometry.hpp"
#include "pabf/image.hpp"
#include "pabf/phantom.hpp"
#include "pabf/postproc.hpp"

namespace pabf {

enum class Method { DAS, DMAS, NL };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);  // "das" | "dmas" | "nl"

/// True when the output must be band-passed before display: DMAS (the
/// filtered-DMAS convention) and NL with even p (sign lost by the power).
bool filter_required(Method method, int p);

struct BeamformerSpec {
  Method method = Method::DAS;
  int p = 1;  // NL only
  bool apply_filter = false;
  FilterSpec filter;

  /// Spec with apply_filter = filter_required(method, p).
  static BeamformerSpec make(Method method, int p = 1, FilterSpec filter = simulation_filter());

  void validate() const;
  std::string label() const;  // "DAS", "DMAS", "NL_3"
};

/// sign(x) * |x|^(1/p).
double signed_root(double x, int p);

/// x^p for integer p >= 0.
double int_pow(double x, int p);

// Per-pixel kernels over the already-delayed channel samples x_i(k - D_i).
double das_kernel(std::span<const double> delayed);
double dmas_kernel(std::span<const double> delayed);
double nl_kernel(std::span<const double> delayed, int p);
double nl2_decomposition_kernel(std::span<const double> delayed);

/// Pixel-loop parallelism. Results are bit-identical for any value.
struct BeamformOptions {
  unsigned threads = 1;
};

BeamformedImage das(const RFFrame& frame, const DelayTable& delays, BeamformOptions opts = {});
BeamformedImage dmas(const RFFrame& frame, const DelayTable& delays, BeamformOptions opts = {});
BeamformedImage nl_p(const RFFrame& frame, const DelayTable& delays, int p,
                     BeamformOptions opts = {});
BeamformedImage nl2_decomposition(const RFFrame& frame, const DelayTable& delays,
                                  BeamformOptions opts = {});

/// Dispatches on spec.method; returns the raw (unfiltered) image.
BeamformedImage beamform(const RFFrame& frame, const DelayTable& delays,
                         const BeamformerSpec& spec, BeamformOptions opts = {});

/// Fixed-shift trace form: y(k) = combine_i x_i(k - shifts[i]) for
/// k in [0, num_samples). Out-of-range reads are zero.
std::vector<double> beamform_trace(const RFFrame& frame, std::span<const std::int64_t> shifts,
                                   const BeamformerSpec& spec);

/// Analytic per-pixel operation count: M for DAS and NL, M(M-1)/2 for DMAS.
std::uint64_t ops_per_pixel(Method method, std::size_t num_elements);

}  // namespace pabf
