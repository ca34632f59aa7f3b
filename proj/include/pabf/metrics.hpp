#pragma once

#include <limits>
#include <vector>

#include "pabf/image.hpp"
#include "pabf/phantom.hpp"

namespace pabf {

/// Axis-aligned rectangle in meters.
struct Roi {
  double x_lo = 0, x_hi = 0;
  double z_lo = 0, z_hi = 0;

  void validate() const;
  bool overlaps(const Roi& other) const;
};

/// One row of a log-compressed image.
struct LateralProfile {
  double depth = 0.0;          // m, the z of the extracted row
  std::vector<double> x;       // m
  std::vector<double> value_db;
};

/// 20 log10((max - min over target) / std over noise) on envelope data.
double snr(const BeamformedImage& image, const Roi& target, const Roi& noise);

/// Row of a log-compressed image nearest to `depth`.
LateralProfile lateral_profile(const BeamformedImage& image, double depth);

/// Width between the -6 dB crossings on either side of the local maximum
/// nearest to peak_x, linearly interpolated.
double fwhm(const LateralProfile& profile, double peak_x);

/// Highest level (dB relative to the main-lobe peak) outside the main lobe
/// and within `reach` of it. The main lobe runs from the peak to the first
/// null on each side, capped at 2 * fwhm.
double sidelobe_level(const LateralProfile& profile, double peak_x,
                      double reach = std::numeric_limits<double>::infinity());

/// Half the lateral distance from `target` to the nearest target in another
/// column; keeps neighbouring targets out of a sidelobe search.
double sidelobe_reach(const PointTarget& target, const PhantomSpec& phantom);

/// Target ROI of +/- half_width around a point target, and a noise ROI at the
/// same depth band whose lateral range is clear of every phantom target.
struct RoiPair {
  Roi target;
  Roi noise;
};
RoiPair default_rois(const PointTarget& target, const PhantomSpec& phantom, const ImageGrid& grid,
                     double half_width = 1.5e-3);

}  // namespace pabf
