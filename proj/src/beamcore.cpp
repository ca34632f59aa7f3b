#include "pabf/beamcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "pabf/errors.hpp"

namespace pabf {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::DAS: return "das";
    case Method::DMAS: return "dmas";
    case Method::NL: return "nl";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "das" || name == "DAS") return Method::DAS;
  if (name == "dmas" || name == "DMAS") return Method::DMAS;
  if (name == "nl" || name == "NL") return Method::NL;
  throw ParameterError("unknown method '" + std::string(name) + "' (expected das, dmas or nl)");
}

bool filter_required(Method method, int p) {
  return method == Method::DMAS || (method == Method::NL && p % 2 == 0);
}

BeamformerSpec BeamformerSpec::make(Method method, int p, FilterSpec filter) {
  BeamformerSpec s;
  s.method = method;
  s.p = method == Method::NL ? p : 1;
  s.apply_filter = filter_required(method, s.p);
  s.filter = filter;
  return s;
}

void BeamformerSpec::validate() const {
  if (method == Method::NL && p < 1) {
    throw ParameterError("beamformer: p must be >= 1 for NL (got " + std::to_string(p) + ")");
  }
  if (filter_required(method, p) && !apply_filter) {
    throw ParameterError("beamformer: " + label() +
                         " output must be band-pass filtered (apply_filter=false rejected)");
  }
}

std::string BeamformerSpec::label() const {
  switch (method) {
    case Method::DAS: return "DAS";
    case Method::DMAS: return "DMAS";
    case Method::NL: return "NL_" + std::to_string(p);
  }
  return "?";
}

double signed_root(double x, int p) {
  if (p < 1) throw ParameterError("signed_root: p must be >= 1");
  switch (p) {
    case 1: return x;
    case 2: return std::copysign(std::sqrt(std::abs(x)), x);
    default: break;
  }
  const double a = std::abs(x);
  double r = p == 3 ? std::cbrt(a) : std::pow(a, 1.0 / p);
  // libm roots can be one ulp off; take the neighbour whose power lands closest
  // so exact roots (cbrt(27) = 3) come out exact.
  double best = std::abs(int_pow(r, p) - a);
  for (double c : {std::nextafter(r, 0.0), std::nextafter(r, HUGE_VAL)}) {
    const double err = std::abs(int_pow(c, p) - a);
    if (err < best) {
      best = err;
      r = c;
    }
  }
  return std::copysign(r, x);
}

double int_pow(double x, int p) {
  double result = 1.0;
  double base = x;
  for (unsigned e = static_cast<unsigned>(p); e != 0; e >>= 1) {
    if (e & 1U) result *= base;
    base *= base;
  }
  return result;
}

namespace {

// Neumaier summation. Channel sums can cancel to near zero, and the NL_2
// identity check compares such pixels relatively.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  // a*b folded in with its exact rounding error
  void add_product(double a, double b) {
    const double prod = a * b;
    add(prod);
    carry += std::fma(a, b, -prod);
  }
  double value() const { return sum + carry; }
};

}  // namespace

double das_kernel(std::span<const double> delayed) {
  CompensatedSum acc;
  for (double v : delayed) acc.add(v);
  return acc.value();
}

double dmas_kernel(std::span<const double> delayed) {
  const std::size_t m = delayed.size();
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double xi = delayed[i];
    for (std::size_t j = i + 1; j < m; ++j) {
      const double prod = xi * delayed[j];
      sum += std::copysign(std::sqrt(std::abs(prod)), prod);
    }
  }
  return sum;
}

double nl_kernel(std::span<const double> delayed, int p) {
  CompensatedSum acc;
  for (double v : delayed) acc.add(signed_root(v, p));
  return int_pow(acc.value() / static_cast<double>(delayed.size()), p);
}

double nl2_decomposition_kernel(std::span<const double> delayed) {
  const std::size_t m = delayed.size();
  std::vector<double> roots(m);
  for (std::size_t i = 0; i < m; ++i) roots[i] = signed_root(delayed[i], 2);
  // squares plus doubled cross terms, accumulated without losing the
  // cancellation between them
  CompensatedSum acc;
  for (double r : roots) acc.add_product(r, r);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) acc.add_product(2.0 * roots[i], roots[j]);
  }
  const double m2 = static_cast<double>(m) * static_cast<double>(m);
  return acc.value() / m2;
}

namespace {

void check_dims(const RFFrame& frame, const DelayTable& delays) {
  if (delays.num_elements() != frame.num_channels()) {
    throw ParameterError("beamform: delay table has " + std::to_string(delays.num_elements()) +
                         " elements but frame has " + std::to_string(frame.num_channels()) +
                         " channels");
  }
  if (frame.samples.size() != frame.num_channels() * frame.num_samples) {
    throw ParameterError("beamform: frame sample buffer does not match M x Ns");
  }
}

void require_pairs(const RFFrame& frame, const char* what) {
  if (frame.num_channels() < 2) {
    throw ParameterError(std::string(what) + ": needs at least 2 channels (no pairs with M=1)");
  }
}

// Runs `pixel_fn(gathered, pixel)` over every pixel, splitting the lateral
// columns across threads. `data` is a channel-major M x Ns buffer.
template <typename PixelFn>
BeamformedImage gather_map(std::span<const double> data, std::size_t num_samples,
                           const DelayTable& delays, BeamformOptions opts, PixelFn pixel_fn) {
  const ImageGrid& grid = delays.grid();
  BeamformedImage image(grid, Stage::Raw);
  const std::size_t m = delays.num_elements();
  const auto ns = static_cast<std::int64_t>(num_samples);

  auto run_columns = [&](std::size_t ix_begin, std::size_t ix_end) {
    std::vector<double> gathered(m);
    for (std::size_t ix = ix_begin; ix < ix_end; ++ix) {
      for (std::size_t iz = 0; iz < grid.nz; ++iz) {
        const std::size_t pixel = grid.index(iz, ix);
        const auto row = delays.row(pixel);
        for (std::size_t i = 0; i < m; ++i) {
          const std::int64_t k = row[i];
          gathered[i] = (k >= 0 && k < ns) ? data[i * num_samples + static_cast<std::size_t>(k)]
                                           : 0.0;
        }
        image.values[pixel] = pixel_fn(std::span<const double>(gathered));
      }
    }
  };

  const unsigned threads = std::max(1U, std::min<unsigned>(opts.threads, static_cast<unsigned>(grid.nx)));
  if (threads == 1) {
    run_columns(0, grid.nx);
    return image;
  }
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = grid.nx * t / threads;
    const std::size_t end = grid.nx * (t + 1) / threads;
    workers.emplace_back(run_columns, begin, end);
  }
  return image;
}

}  // namespace

BeamformedImage das(const RFFrame& frame, const DelayTable& delays, BeamformOptions opts) {
  check_dims(frame, delays);
  return gather_map(frame.samples, frame.num_samples, delays, opts,
                    [](std::span<const double> g) { return das_kernel(g); });
}

BeamformedImage dmas(const RFFrame& frame, const DelayTable& delays, BeamformOptions opts) {
  check_dims(frame, delays);
  require_pairs(frame, "dmas");
  return gather_map(frame.samples, frame.num_samples, delays, opts,
                    [](std::span<const double> g) { return dmas_kernel(g); });
}

BeamformedImage nl_p(const RFFrame& frame, const DelayTable& delays, int p, BeamformOptions opts) {
  check_dims(frame, delays);
  if (p < 1) throw ParameterError("nl_p: p must be >= 1 (got " + std::to_string(p) + ")");
  // The root is per-sample, so it is taken once over the frame and the
  // pixel loop reduces to a delay-and-sum of the rooted channels.
  std::vector<double> rooted(frame.samples.size());
  std::transform(frame.samples.begin(), frame.samples.end(), rooted.begin(),
                 [p](double v) { return signed_root(v, p); });
  const auto m = static_cast<double>(frame.num_channels());
  return gather_map(rooted, frame.num_samples, delays, opts,
                    [m, p](std::span<const double> g) { return int_pow(das_kernel(g) / m, p); });
}

BeamformedImage nl2_decomposition(const RFFrame& frame, const DelayTable& delays,
                                  BeamformOptions opts) {
  check_dims(frame, delays);
  require_pairs(frame, "nl2_decomposition");
  return gather_map(frame.samples, frame.num_samples, delays, opts,
                    [](std::span<const double> g) { return nl2_decomposition_kernel(g); });
}

BeamformedImage beamform(const RFFrame& frame, const DelayTable& delays,
                         const BeamformerSpec& spec, BeamformOptions opts) {
  spec.validate();
  switch (spec.method) {
    case Method::DAS: return das(frame, delays, opts);
    case Method::DMAS: return dmas(frame, delays, opts);
    case Method::NL: return nl_p(frame, delays, spec.p, opts);
  }
  throw ParameterError("beamform: unknown method");
}

std::vector<double> beamform_trace(const RFFrame& frame, std::span<const std::int64_t> shifts,
                                   const BeamformerSpec& spec) {
  const std::size_t m = frame.num_channels();
  if (shifts.size() != m) throw ParameterError("beamform_trace: need one shift per channel");
  if (spec.method == Method::DMAS) require_pairs(frame, "dmas");
  if (spec.method == Method::NL && spec.p < 1) throw ParameterError("beamform_trace: p must be >= 1");
  const auto ns = static_cast<std::int64_t>(frame.num_samples);
  std::vector<double> out(frame.num_samples);
  std::vector<double> gathered(m);
  for (std::int64_t k = 0; k < ns; ++k) {
    for (std::size_t i = 0; i < m; ++i) {
      const std::int64_t idx = k - shifts[i];
      gathered[i] = (idx >= 0 && idx < ns) ? frame.at(i, static_cast<std::size_t>(idx)) : 0.0;
    }
    switch (spec.method) {
      case Method::DAS: out[k] = das_kernel(gathered); break;
      case Method::DMAS: out[k] = dmas_kernel(gathered); break;
      case Method::NL: out[k] = nl_kernel(gathered, spec.p); break;
    }
  }
  return out;
}

std::uint64_t ops_per_pixel(Method method, std::size_t num_elements) {
  const auto m = static_cast<std::uint64_t>(num_elements);
  return method == Method::DMAS ? m * (m - 1) / 2 : m;
}

}  // namespace pabf
