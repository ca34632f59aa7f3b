#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pabf/geometry.hpp"

namespace pabf {

enum class Stage : std::uint8_t { Raw = 0, Filtered = 1, Envelope = 2, LogCompressed = 3 };

std::string_view to_string(Stage s);

/// Beamformer output on an axial x lateral grid, stored column-major so that
/// each lateral column (an axial time-series) is contiguous.
struct BeamformedImage {
  ImageGrid grid;
  std::vector<double> values;
  Stage stage = Stage::Raw;

  BeamformedImage() = default;
  BeamformedImage(const ImageGrid& g, Stage s) : grid(g), values(g.pixels(), 0.0), stage(s) {}

  double& at(std::size_t iz, std::size_t ix) { return values[grid.index(iz, ix)]; }
  double at(std::size_t iz, std::size_t ix) const { return values[grid.index(iz, ix)]; }
  std::span<double> column(std::size_t ix) { return {values.data() + ix * grid.nz, grid.nz}; }
  std::span<const double> column(std::size_t ix) const {
    return {values.data() + ix * grid.nz, grid.nz};
  }
  double max_value() const;
};

}  // namespace pabf
