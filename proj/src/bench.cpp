#include "pabf/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "pabf/errors.hpp"
#include "pabf/io.hpp"
#include "pabf/phantom.hpp"

namespace pabf {

ImageGrid bench_grid(const ArrayGeometry& geom) {
  const double z0 = 30.0e-3;
  return build_grid(geom, -10.0e-3, 10.0e-3, z0, z0 + 256 * geom.sample_spacing(), 256);
}

std::vector<BenchResult> run_bench(const std::vector<BeamformerSpec>& methods,
                                   const std::vector<std::size_t>& element_counts,
                                   const ImageGrid& grid, BenchOptions opts) {
  if (opts.repeats < 3) throw ParameterError("bench: repeats must be >= 3");
  for (std::size_t m : element_counts) {
    if (m < 2) throw ParameterError("bench: element counts must be >= 2");
  }
  for (const auto& spec : methods) spec.validate();

  const ArrayGeometry base = simulation_probe();
  std::vector<BenchResult> results;
  for (std::size_t m : element_counts) {
    const ArrayGeometry geom = ArrayGeometry::centered(
        m, base.pitch, base.center_freq, base.fractional_bandwidth, base.sampling_freq,
        base.sound_speed);
    const ImageGrid g = build_grid(geom, grid.x_min, grid.x_max, grid.z_min, grid.z_max, grid.nx);
    const PhantomSpec phantom = default_phantom(30.0, opts.seed);
    const RFFrame frame = simulate_frame(geom, phantom, required_samples(geom, phantom)).frame;
    const DelayTable delays = compute_delays(geom, g);

    for (const auto& spec : methods) {
      std::vector<double> seconds;
      seconds.reserve(opts.repeats);
      double sink = 0.0;
      for (std::size_t r = 0; r < opts.repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        const BeamformedImage img = beamform(frame, delays, spec, {opts.threads});
        const auto t1 = std::chrono::steady_clock::now();
        sink += img.values[img.values.size() / 2];
        seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
      }
      (void)sink;
      std::sort(seconds.begin(), seconds.end());
      const std::size_t n = seconds.size();
      const double median = n % 2 ? seconds[n / 2] : 0.5 * (seconds[n / 2 - 1] + seconds[n / 2]);

      BenchResult res;
      res.method = spec.method;
      if (spec.method == Method::NL) res.p = spec.p;
      res.num_elements = m;
      res.grid_pixels = g.pixels();
      res.repeats = opts.repeats;
      res.median_seconds = std::max(median, 1e-9);
      res.ops_per_pixel = ops_per_pixel(spec.method, m);
      res.threads = opts.threads;
      results.push_back(res);
    }
  }
  return results;
}

double loglog_slope(const std::vector<double>& m, const std::vector<double>& seconds) {
  if (m.size() != seconds.size() || m.size() < 2) {
    throw ParameterError("loglog_slope: need at least two matched points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double x = std::log(m[i]);
    const double y = std::log(seconds[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string bench_csv(const std::vector<BenchResult>& results) {
  std::ostringstream o;
  o << "method,p,M,pixels,median_seconds,ops_per_pixel\n";
  for (const auto& r : results) {
    o << to_string(r.method);
    if (r.threads > 1) o << "+parallel" << r.threads;
    o << "," << (r.p ? std::to_string(*r.p) : std::string()) << ","
      << r.num_elements << "," << r.grid_pixels << "," << io::format_double(r.median_seconds)
      << "," << r.ops_per_pixel << "\n";
  }
  return o.str();
}

}  // namespace pabf
