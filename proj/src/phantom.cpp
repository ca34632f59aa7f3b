#include "pabf/phantom.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "pabf/errors.hpp"

namespace pabf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in (0, 1], 53 bits.
double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t h = splitmix64(splitmix64(seed) ^ splitmix64(counter + 0x632be59bd9b4e019ULL));
  return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
}

// Wavelet support beyond which the envelope is below 1e-14.
constexpr double kTailSigmas = 8.0;

}  // namespace

void PhantomSpec::validate() const {
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (!(targets[t].z > 0.0)) {
      throw ParameterError("phantom: target " + std::to_string(t) + " must have z > 0");
    }
    if (!(targets[t].amplitude > 0.0)) {
      throw ParameterError("phantom: target " + std::to_string(t) + " must have amplitude > 0");
    }
  }
}

PhantomSpec default_phantom(std::optional<double> noise_snr_db, std::uint64_t seed) {
  PhantomSpec spec;
  for (int k = 0; k < 6; ++k) {
    const double z = 25.0e-3 + 5.0e-3 * k;
    spec.targets.push_back({-2.0e-3, z, 1.0});
    spec.targets.push_back({2.0e-3, z, 1.0});
  }
  spec.targets.push_back({0.0, 32.5e-3, 1.0});
  spec.targets.push_back({0.0, 42.5e-3, 1.0});
  spec.noise_snr_db = noise_snr_db;
  spec.rng_seed = seed;
  return spec;
}

PhantomSpec wire_phantom(std::optional<double> noise_snr_db, std::uint64_t seed) {
  PhantomSpec spec;
  spec.targets = {
      {-3.0e-3, 6.0e-3, 1.0},
      {3.0e-3, 7.1e-3, 1.0},
      {-2.0e-3, 11.3e-3, 1.0},
      {2.5e-3, 14.0e-3, 1.0},
  };
  spec.noise_snr_db = noise_snr_db;
  spec.rng_seed = seed;
  return spec;
}

double RFFrame::rms() const {
  if (samples.empty()) return 0.0;
  long double acc = 0.0L;
  for (double v : samples) acc += static_cast<long double>(v) * v;
  return static_cast<double>(std::sqrt(acc / static_cast<long double>(samples.size())));
}

double wavelet_sigma(const ArrayGeometry& geom) {
  // Gaussian spectrum exp(-df^2 / (2 s_f^2)) drops to one half at
  // df = s_f * sqrt(2 ln 2); the full -6 dB width is bw * f0.
  const double sigma_f = geom.fractional_bandwidth * geom.center_freq /
                         (2.0 * std::sqrt(2.0 * std::numbers::ln2));
  return 1.0 / (2.0 * std::numbers::pi * sigma_f);
}

double pulse_wavelet(const ArrayGeometry& geom, double t) {
  const double s = wavelet_sigma(geom);
  return std::exp(-0.5 * (t * t) / (s * s)) * std::cos(2.0 * std::numbers::pi * geom.center_freq * t);
}

std::size_t required_samples(const ArrayGeometry& geom, const PhantomSpec& phantom) {
  double r_max = 0.0;
  for (const auto& tg : phantom.targets) {
    for (double ex : geom.element_x) r_max = std::max(r_max, std::hypot(tg.x - ex, tg.z));
  }
  const double t_max = r_max / geom.sound_speed + kTailSigmas * wavelet_sigma(geom);
  return static_cast<std::size_t>(std::ceil(t_max * geom.sampling_freq)) + 1;
}

SimulationResult simulate_frame(const ArrayGeometry& geom, const PhantomSpec& phantom,
                                std::size_t num_samples) {
  geom.validate();
  phantom.validate();
  if (num_samples < 1) throw ParameterError("simulate: num_samples must be >= 1");

  SimulationResult out{RFFrame(geom, num_samples), {}};
  const double fs = geom.sampling_freq;
  const double c = geom.sound_speed;
  const double support = kTailSigmas * wavelet_sigma(geom);

  for (std::size_t t = 0; t < phantom.targets.size(); ++t) {
    const auto& tg = phantom.targets[t];
    std::size_t truncated = 0;
    for (std::size_t i = 0; i < geom.num_elements; ++i) {
      const double r = std::hypot(tg.x - geom.element_x[i], tg.z);
      const double arrival = r / c;
      if ((arrival + support) * fs >= static_cast<double>(num_samples)) ++truncated;
      const double gain = tg.amplitude / r;
      const auto k_lo = static_cast<std::ptrdiff_t>(std::floor((arrival - support) * fs));
      const auto k_hi = static_cast<std::ptrdiff_t>(std::ceil((arrival + support) * fs));
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(k_lo, 0);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(k_hi, static_cast<std::ptrdiff_t>(num_samples) - 1);
      for (std::ptrdiff_t k = lo; k <= hi; ++k) {
        out.frame.at(i, static_cast<std::size_t>(k)) +=
            gain * pulse_wavelet(geom, static_cast<double>(k) / fs - arrival);
      }
    }
    if (truncated > 0) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "target %zu (x=%.4g m, z=%.4g m): arrival truncated on %zu of %zu channels",
                    t, tg.x, tg.z, truncated, geom.num_elements);
      out.warnings.emplace_back(msg);
    }
  }

  if (phantom.noise_snr_db) {
    out.frame = add_noise(std::move(out.frame), *phantom.noise_snr_db, phantom.rng_seed);
  }
  return out;
}

double counter_normal(std::uint64_t seed, std::uint64_t index) {
  // Box-Muller on two counter-derived uniforms.
  const double u1 = counter_uniform(seed, 2 * index);
  const double u2 = counter_uniform(seed, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RFFrame add_noise(RFFrame frame, double snr_db, std::uint64_t seed) {
  if (frame.samples.empty()) throw ParameterError("add_noise: empty frame");
  if (std::isinf(snr_db) && snr_db > 0) return frame;
  if (std::isnan(snr_db)) throw ParameterError("add_noise: snr_db is NaN");
  const double rms = frame.rms();
  if (!(rms > 0.0)) {
    throw DataError("add_noise: frame is all zeros, noise level relative to its RMS is undefined");
  }
  const double sigma = rms * std::pow(10.0, -snr_db / 20.0);
  for (std::size_t n = 0; n < frame.samples.size(); ++n) {
    frame.samples[n] += sigma * counter_normal(seed, n);
  }
  return frame;
}

}  // namespace pabf
