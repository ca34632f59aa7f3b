#include "pabf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pabf/errors.hpp"

namespace pabf {

ArrayGeometry ArrayGeometry::linear(std::size_t num_elements, double pitch, double first_x,
                                    double center_freq, double fractional_bandwidth,
                                    double sampling_freq, double sound_speed) {
  ArrayGeometry g;
  g.num_elements = num_elements;
  g.pitch = pitch;
  g.center_freq = center_freq;
  g.fractional_bandwidth = fractional_bandwidth;
  g.sampling_freq = sampling_freq;
  g.sound_speed = sound_speed;
  g.element_x.resize(num_elements);
  for (std::size_t i = 0; i < num_elements; ++i) {
    g.element_x[i] = first_x + static_cast<double>(i) * pitch;
  }
  g.validate();
  return g;
}

ArrayGeometry ArrayGeometry::centered(std::size_t num_elements, double pitch, double center_freq,
                                      double fractional_bandwidth, double sampling_freq,
                                      double sound_speed) {
  const double first_x = -0.5 * static_cast<double>(num_elements - 1) * pitch;
  return linear(num_elements, pitch, first_x, center_freq, fractional_bandwidth, sampling_freq,
                sound_speed);
}

void ArrayGeometry::validate() const {
  if (num_elements < 1) throw ParameterError("geometry: num_elements must be >= 1");
  if (!(pitch > 0.0)) throw ParameterError("geometry: pitch must be > 0");
  if (element_x.size() != num_elements) {
    throw ParameterError("geometry: element_x has " + std::to_string(element_x.size()) +
                         " entries, expected " + std::to_string(num_elements));
  }
  for (std::size_t i = 1; i < num_elements; ++i) {
    const double step = element_x[i] - element_x[i - 1];
    if (!(step > 0.0) || std::abs(step - pitch) > 1e-9 * std::max(1.0, pitch) + 1e-12) {
      throw ParameterError("geometry: element_x must be uniformly spaced by pitch");
    }
  }
  if (!(center_freq > 0.0)) throw ParameterError("geometry: center_freq must be > 0");
  if (!(fractional_bandwidth > 0.0 && fractional_bandwidth < 2.0)) {
    throw ParameterError("geometry: fractional_bandwidth must lie in (0, 2)");
  }
  if (!(sound_speed > 0.0)) throw ParameterError("geometry: sound_speed must be > 0");
  const double band_top = center_freq * (1.0 + fractional_bandwidth / 2.0);
  if (!(sampling_freq > 2.0 * band_top)) {
    throw ParameterError("geometry: sampling_freq " + std::to_string(sampling_freq) +
                         " Hz is below Nyquist for the transducer band (needs > " +
                         std::to_string(2.0 * band_top) + " Hz)");
  }
}

ArrayGeometry simulation_probe() {
  return ArrayGeometry::centered(128, 0.3e-3, 4.0e6, 0.77, 50.0e6, 1540.0);
}

ArrayGeometry experimental_probe() {
  return ArrayGeometry::centered(128, 0.3e-3, 8.5e6, 0.95, 40.0e6, 1540.0);
}

void ImageGrid::validate() const {
  if (nx < 1 || nz < 1) throw ParameterError("grid: nx and nz must be >= 1");
  if (nx == 1 ? x_min > x_max : !(x_min < x_max)) {
    throw ParameterError("grid: x_min must be < x_max (equal only for a single scanline)");
  }
  if (!(z_min >= 0.0 && z_min < z_max)) throw ParameterError("grid: need 0 <= z_min < z_max");
  if (!(dz > 0.0)) throw ParameterError("grid: dz must be > 0");
}

ImageGrid build_grid(const ArrayGeometry& geom, double x_min, double x_max, double z_min,
                     double z_max, std::size_t nx) {
  geom.validate();
  ImageGrid g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.z_min = z_min;
  g.z_max = z_max;
  g.nx = nx;
  g.dz = geom.sample_spacing();
  g.dx = nx > 1 ? (x_max - x_min) / static_cast<double>(nx - 1) : 0.0;
  g.time_aligned = true;
  if (!(z_min >= 0.0 && z_min < z_max)) throw ParameterError("grid: need 0 <= z_min < z_max");
  // Slack keeps an exact multiple of dz from rounding up to an extra row.
  const double rows = (z_max - z_min) / g.dz;
  g.nz = static_cast<std::size_t>(std::ceil(rows - 1e-9));
  g.validate();
  return g;
}

DelayTable::DelayTable(ImageGrid grid, std::size_t num_elements, std::vector<std::int32_t> delays)
    : grid_(grid), num_elements_(num_elements), delays_(std::move(delays)) {
  if (delays_.size() != grid_.pixels() * num_elements_) {
    throw ParameterError("delay table: size does not match grid pixels x elements");
  }
}

std::int32_t DelayTable::max_delay() const {
  return delays_.empty() ? 0 : *std::max_element(delays_.begin(), delays_.end());
}

DelayTable compute_delays(const ArrayGeometry& geom, const ImageGrid& grid) {
  geom.validate();
  grid.validate();
  const std::size_t m = geom.num_elements;
  const double samples_per_meter = geom.sampling_freq / geom.sound_speed;
  std::vector<std::int32_t> delays(grid.pixels() * m);
  for (std::size_t ix = 0; ix < grid.nx; ++ix) {
    const double px = grid.x(ix);
    for (std::size_t iz = 0; iz < grid.nz; ++iz) {
      const double pz = grid.z(iz);
      std::int32_t* row = delays.data() + grid.index(iz, ix) * m;
      for (std::size_t i = 0; i < m; ++i) {
        const double dist = std::hypot(px - geom.element_x[i], pz);
        row[i] = static_cast<std::int32_t>(std::lround(dist * samples_per_meter));
      }
    }
  }
  return DelayTable(grid, m, std::move(delays));
}

}  // namespace pabf
