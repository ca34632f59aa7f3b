#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pabf {

/// Linear transducer array lying on the z = 0 line.
struct ArrayGeometry {
  std::size_t num_elements = 0;
  double pitch = 0.0;               // m
  std::vector<double> element_x;    // m, strictly increasing
  double center_freq = 0.0;         // Hz
  double fractional_bandwidth = 0;  // -6 dB bandwidth / center_freq
  double sampling_freq = 0.0;       // Hz
  double sound_speed = 0.0;         // m/s

  /// Uniform array of `num_elements` elements, `first_x` is the lateral
  /// position of element 0.
  static ArrayGeometry linear(std::size_t num_elements, double pitch, double first_x,
                              double center_freq, double fractional_bandwidth,
                              double sampling_freq, double sound_speed);

  /// Same as linear() but centered on x = 0.
  static ArrayGeometry centered(std::size_t num_elements, double pitch, double center_freq,
                                double fractional_bandwidth, double sampling_freq,
                                double sound_speed);

  /// Throws ParameterError when an invariant is violated.
  void validate() const;

  double sample_spacing() const { return sound_speed / sampling_freq; }
};

/// 128 elements, 0.3 mm pitch, 4 MHz, 77 % bandwidth, 50 MHz, 1540 m/s.
ArrayGeometry simulation_probe();

/// 128 elements over 3.85 cm, 8.5 MHz, 95 % bandwidth, 40 MHz, 1540 m/s.
ArrayGeometry experimental_probe();

struct ImageGrid {
  double x_min = 0, x_max = 0;
  double z_min = 0, z_max = 0;
  std::size_t nx = 0, nz = 0;
  double dx = 0, dz = 0;
  // True when dz == c / fs, i.e. each column is an fs-rate time-series.
  bool time_aligned = false;

  double x(std::size_t ix) const { return x_min + static_cast<double>(ix) * dx; }
  double z(std::size_t iz) const { return z_min + static_cast<double>(iz) * dz; }
  std::size_t pixels() const { return nx * nz; }
  // Column-major pixel index (axial samples of a column are contiguous).
  std::size_t index(std::size_t iz, std::size_t ix) const { return ix * nz + iz; }

  void validate() const;
};

/// Time-aligned grid: dz = c / fs, nz = ceil((z_max - z_min) / dz).
ImageGrid build_grid(const ArrayGeometry& geom, double x_min, double x_max, double z_min,
                     double z_max, std::size_t nx);

/// Integer sample index of the one-way time of flight from every pixel to
/// every element.
class DelayTable {
 public:
  DelayTable() = default;
  DelayTable(ImageGrid grid, std::size_t num_elements, std::vector<std::int32_t> delays);

  const ImageGrid& grid() const { return grid_; }
  std::size_t num_elements() const { return num_elements_; }
  std::size_t num_pixels() const { return grid_.pixels(); }

  std::span<const std::int32_t> row(std::size_t pixel) const {
    return {delays_.data() + pixel * num_elements_, num_elements_};
  }
  std::int32_t at(std::size_t pixel, std::size_t element) const {
    return delays_[pixel * num_elements_ + element];
  }
  std::int32_t max_delay() const;

 private:
  ImageGrid grid_;
  std::size_t num_elements_ = 0;
  std::vector<std::int32_t> delays_;
};

/// delay(pixel, i) = round(fs * |pixel - element_i| / c).
DelayTable compute_delays(const ArrayGeometry& geom, const ImageGrid& grid);

}  // namespace pabf
