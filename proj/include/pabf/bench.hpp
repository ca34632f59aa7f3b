#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pabf/beamcore.hpp"
#include "pabf/geometry.hpp"

namespace pabf {

struct BenchResult {
  Method method = Method::DAS;
  std::optional<int> p;  // NL only
  std::size_t num_elements = 0;
  std::size_t grid_pixels = 0;
  std::size_t repeats = 0;
  double median_seconds = 0.0;
  std::uint64_t ops_per_pixel = 0;
  unsigned threads = 1;
};

struct BenchOptions {
  std::size_t repeats = 3;
  std::uint64_t seed = 1;
  // 1 is the reported mode; anything else is labeled parallel in the CSV.
  unsigned threads = 1;
};

/// Times the raw beamforming step (no post-processing) for every
/// (method, M) pair. The array for each M is the simulation probe's
/// pitch/frequencies with M elements, imaged over `grid`'s extents.
std::vector<BenchResult> run_bench(const std::vector<BeamformerSpec>& methods,
                                   const std::vector<std::size_t>& element_counts,
                                   const ImageGrid& grid, BenchOptions opts = {});

/// 256 x 256 grid over the default phantom's region.
ImageGrid bench_grid(const ArrayGeometry& geom);

/// Least-squares slope of log(seconds) against log(M).
double loglog_slope(const std::vector<double>& m, const std::vector<double>& seconds);

/// CSV with header: method,p,M,pixels,median_seconds,ops_per_pixel
std::string bench_csv(const std::vector<BenchResult>& results);

}  // namespace pabf
