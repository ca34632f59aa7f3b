#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pabf/geometry.hpp"

namespace pabf {

struct PointTarget {
  double x = 0.0;  // m
  double z = 0.0;  // m, > 0
  double amplitude = 1.0;
};

struct PhantomSpec {
  std::vector<PointTarget> targets;
  std::optional<double> noise_snr_db;  // nullopt: no noise
  std::uint64_t rng_seed = 1;

  void validate() const;
};

/// Six pairs at 25..50 mm (4 mm lateral / 5 mm axial spacing) plus single
/// targets at 32.5 and 42.5 mm, all unit amplitude.
PhantomSpec default_phantom(std::optional<double> noise_snr_db = 30.0, std::uint64_t seed = 1);

/// Four point "wires" between 5 and 15 mm depth.
PhantomSpec wire_phantom(std::optional<double> noise_snr_db, std::uint64_t seed = 1);

/// Multichannel RF data, channel-major: samples[i * num_samples + k] = x_i(k).
struct RFFrame {
  ArrayGeometry geom;
  std::size_t num_samples = 0;
  std::vector<double> samples;

  RFFrame() = default;
  RFFrame(ArrayGeometry g, std::size_t ns)
      : geom(std::move(g)), num_samples(ns), samples(geom.num_elements * ns, 0.0) {}

  std::size_t num_channels() const { return geom.num_elements; }
  double& at(std::size_t channel, std::size_t k) { return samples[channel * num_samples + k]; }
  double at(std::size_t channel, std::size_t k) const {
    return samples[channel * num_samples + k];
  }
  std::span<const double> channel(std::size_t i) const {
    return {samples.data() + i * num_samples, num_samples};
  }
  std::span<double> channel(std::size_t i) {
    return {samples.data() + i * num_samples, num_samples};
  }
  double rms() const;
};

/// Zero-phase Gaussian-modulated cosine at f0 whose -6 dB fractional
/// bandwidth equals geom.fractional_bandwidth. Peak value 1 at t = 0.
double pulse_wavelet(const ArrayGeometry& geom, double t);

/// Standard deviation (s) of the wavelet's Gaussian envelope.
double wavelet_sigma(const ArrayGeometry& geom);

struct SimulationResult {
  RFFrame frame;
  std::vector<std::string> warnings;  // e.g. arrivals truncated by num_samples
};

/// Spherical-wave forward model:
///   x_i(k) = sum_t a_t / r_it * wavelet(k / fs - r_it / c)
/// followed by add_noise() when the phantom carries a noise level.
SimulationResult simulate_frame(const ArrayGeometry& geom, const PhantomSpec& phantom,
                                std::size_t num_samples);

/// Samples needed to hold the farthest arrival plus the wavelet tail.
std::size_t required_samples(const ArrayGeometry& geom, const PhantomSpec& phantom);

/// Adds i.i.d. N(0, sigma^2) with sigma = rms(frame) * 10^(-snr_db / 20).
/// A non-finite snr_db (+inf) leaves the frame unchanged.
RFFrame add_noise(RFFrame frame, double snr_db, std::uint64_t seed);

/// Counter-based standard normal: a pure function of (seed, index).
double counter_normal(std::uint64_t seed, std::uint64_t index);

}  // namespace pabf
