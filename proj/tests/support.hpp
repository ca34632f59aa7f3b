#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pabf/beamcore.hpp"
#include "pabf/geometry.hpp"
#include "pabf/image.hpp"
#include "pabf/phantom.hpp"

namespace testsupport {

inline pabf::ArrayGeometry small_array(std::size_t m) {
  return pabf::ArrayGeometry::centered(m, 0.3e-3, 4.0e6, 0.77, 50.0e6, 1540.0);
}

// Frame whose channel i holds rows[i].
inline pabf::RFFrame frame_of(const std::vector<std::vector<double>>& rows) {
  pabf::RFFrame f(small_array(rows.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k) f.at(i, k) = rows[i][k];
  return f;
}

inline pabf::RFFrame random_frame(std::size_t m, std::size_t ns, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  pabf::RFFrame f(small_array(m), ns);
  for (double& v : f.samples) v = u(rng);
  return f;
}

// Single-column grid of `nz` pixels; geometry-free, for hand-made tables.
inline pabf::ImageGrid column_grid(std::size_t nz) {
  pabf::ImageGrid g;
  g.x_min = g.x_max = 0.0;
  g.z_min = 0.0;
  g.z_max = static_cast<double>(nz) * 1e-4;
  g.nx = 1;
  g.nz = nz;
  g.dx = 0.0;
  g.dz = 1e-4;
  return g;
}

// Pixel k of the column reads sample k + shift[i] of channel i.
inline pabf::DelayTable shifted_table(std::size_t nz, const std::vector<std::int32_t>& shift) {
  std::vector<std::int32_t> d;
  for (std::size_t k = 0; k < nz; ++k)
    for (auto s : shift) d.push_back(static_cast<std::int32_t>(k) + s);
  return {column_grid(nz), shift.size(), std::move(d)};
}

inline pabf::DelayTable random_table(std::size_t nz, std::size_t m, std::int32_t max_delay,
                                     std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int32_t> u(0, max_delay);
  std::vector<std::int32_t> d(nz * m);
  for (auto& v : d) v = u(rng);
  return {column_grid(nz), m, std::move(d)};
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace testsupport
