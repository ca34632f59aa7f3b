#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "pabf/beamcore.hpp"
#include "pabf/geometry.hpp"
#include "pabf/phantom.hpp"
#include "pabf/postproc.hpp"

namespace pabf {

struct GridExtent {
  double x_min = -10.0e-3, x_max = 10.0e-3;
  double z_min = 20.0e-3, z_max = 55.0e-3;
  std::size_t nx = 401;
};

enum class FilterMode { Auto, On, Off };

struct RunConfig {
  std::string preset = "simulation";
  ArrayGeometry geometry;
  GridExtent grid;
  std::size_t num_samples = 0;  // 0: derive from the phantom
  PhantomSpec phantom;
  Method method = Method::DAS;
  int p = 1;
  FilterMode filter_mode = FilterMode::Auto;
  FilterSpec filter;
  double dynamic_range_db = 60.0;
  std::string out = "out";

  /// Beamformer spec honoring filter_mode (Auto: filter where required).
  BeamformerSpec beamformer() const;
  BeamformerSpec beamformer(Method m, int p_value) const;
  ImageGrid image_grid() const;
  std::size_t samples() const;
  void validate() const;
};

RunConfig simulation_config();
RunConfig experimental_config();

/// Parses a flat `key = value` file. '#' starts a comment. Unknown or
/// repeated keys (other than `target`) are errors; messages carry
/// "<source>:<line>:".
RunConfig parse_config(std::string_view text, std::string_view source = "config");
RunConfig load_config(const std::string& path);

/// The documented key set, one `key = value` line each, for the defaults of
/// the given preset.
std::string dump_config(const RunConfig& cfg);

}  // namespace pabf
