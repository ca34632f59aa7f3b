#include "pabf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pabf/errors.hpp"

namespace pabf {

namespace {

// Half amplitude in dB.
const double kHalfMaxDb = 20.0 * std::log10(0.5);

std::vector<double> roi_values(const BeamformedImage& image, const Roi& roi) {
  std::vector<double> out;
  const ImageGrid& g = image.grid;
  for (std::size_t ix = 0; ix < g.nx; ++ix) {
    const double x = g.x(ix);
    if (x < roi.x_lo || x > roi.x_hi) continue;
    for (std::size_t iz = 0; iz < g.nz; ++iz) {
      const double z = g.z(iz);
      if (z >= roi.z_lo && z <= roi.z_hi) out.push_back(image.at(iz, ix));
    }
  }
  return out;
}

// Index of the local maximum reached by climbing from the sample nearest x0.
std::size_t climb_to_peak(const LateralProfile& p, double x0) {
  if (p.x.empty()) throw DataError("profile is empty");
  std::size_t i = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < p.x.size(); ++k) {
    const double d = std::abs(p.x[k] - x0);
    if (d < best) {
      best = d;
      i = k;
    }
  }
  const auto& v = p.value_db;
  for (;;) {
    if (i + 1 < v.size() && v[i + 1] > v[i] && (i == 0 || v[i + 1] >= v[i - 1])) {
      ++i;
    } else if (i > 0 && v[i - 1] > v[i]) {
      --i;
    } else {
      return i;
    }
  }
}

double crossing(double x_in, double v_in, double x_out, double v_out, double level) {
  return x_in + (level - v_in) * (x_out - x_in) / (v_out - v_in);
}

}  // namespace

void Roi::validate() const {
  if (!(x_lo < x_hi && z_lo < z_hi)) throw ParameterError("roi: need x_lo < x_hi and z_lo < z_hi");
}

bool Roi::overlaps(const Roi& o) const {
  return x_lo <= o.x_hi && o.x_lo <= x_hi && z_lo <= o.z_hi && o.z_lo <= z_hi;
}

double snr(const BeamformedImage& image, const Roi& target, const Roi& noise) {
  if (image.stage != Stage::Envelope) {
    throw ParameterError("snr: expected an envelope image, got stage " +
                         std::string(to_string(image.stage)));
  }
  target.validate();
  noise.validate();
  if (target.overlaps(noise)) throw ParameterError("snr: target and noise ROIs must be disjoint");

  const auto sig = roi_values(image, target);
  const auto bg = roi_values(image, noise);
  if (sig.empty()) throw DataError("snr: target ROI does not intersect the grid");
  if (bg.size() < 2) throw DataError("snr: noise ROI covers fewer than two pixels");

  const auto [lo, hi] = std::minmax_element(sig.begin(), sig.end());
  const double p_signal = *hi - *lo;

  double mean = 0.0;
  for (double v : bg) mean += v;
  mean /= static_cast<double>(bg.size());
  double ss = 0.0;
  for (double v : bg) ss += (v - mean) * (v - mean);
  const double p_noise = std::sqrt(ss / static_cast<double>(bg.size() - 1));
  if (!(p_noise > 0.0)) throw DataError("snr: noise ROI has zero standard deviation");
  return 20.0 * std::log10(p_signal / p_noise);
}

LateralProfile lateral_profile(const BeamformedImage& image, double depth) {
  if (image.stage != Stage::LogCompressed) {
    throw ParameterError("lateral_profile: expected a log-compressed image, got stage " +
                         std::string(to_string(image.stage)));
  }
  const ImageGrid& g = image.grid;
  const double z_last = g.z(g.nz - 1);
  if (depth < g.z_min - 0.5 * g.dz || depth > z_last + 0.5 * g.dz) {
    throw DataError("lateral_profile: depth " + std::to_string(depth) + " m is outside the grid");
  }
  const double pos = std::round((depth - g.z_min) / g.dz);
  const auto iz = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(g.nz - 1)));
  LateralProfile p;
  p.depth = g.z(iz);
  p.x.resize(g.nx);
  p.value_db.resize(g.nx);
  for (std::size_t ix = 0; ix < g.nx; ++ix) {
    p.x[ix] = g.x(ix);
    p.value_db[ix] = image.at(iz, ix);
  }
  return p;
}

double fwhm(const LateralProfile& profile, double peak_x) {
  if (profile.x.size() != profile.value_db.size()) throw DataError("fwhm: ragged profile");
  const std::size_t ip = climb_to_peak(profile, peak_x);
  const auto& v = profile.value_db;
  const auto& x = profile.x;
  const double level = v[ip] + kHalfMaxDb;

  std::size_t l = ip;
  while (l > 0 && v[l - 1] >= level) --l;
  if (l == 0) throw DataError("fwhm: left half-maximum crossing not found");
  std::size_t r = ip;
  while (r + 1 < v.size() && v[r + 1] >= level) ++r;
  if (r + 1 == v.size()) throw DataError("fwhm: right half-maximum crossing not found");

  const double x_left = crossing(x[l], v[l], x[l - 1], v[l - 1], level);
  const double x_right = crossing(x[r], v[r], x[r + 1], v[r + 1], level);
  return x_right - x_left;
}

double sidelobe_level(const LateralProfile& profile, double peak_x, double reach) {
  const double width = fwhm(profile, peak_x);
  const std::size_t ip = climb_to_peak(profile, peak_x);
  const auto& v = profile.value_db;
  const auto& x = profile.x;
  const double x0 = x[ip];

  // Main lobe: past the half-maximum crossings, then out to the first null
  // on each side, but never beyond 2 * FWHM.
  const double level = v[ip] + kHalfMaxDb;
  std::size_t l = ip;
  while (l > 0 && v[l - 1] >= level) --l;
  while (l > 0 && v[l - 1] <= v[l] && x0 - x[l - 1] <= 2.0 * width) --l;
  std::size_t r = ip;
  while (r + 1 < v.size() && v[r + 1] >= level) ++r;
  while (r + 1 < v.size() && v[r + 1] <= v[r] && x[r + 1] - x0 <= 2.0 * width) ++r;

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (k >= l && k <= r) continue;
    if (std::abs(x[k] - x0) > reach) continue;
    best = std::max(best, v[k]);
  }
  if (!std::isfinite(best)) {
    throw DataError("sidelobe_level: exclusion window covers the whole profile");
  }
  return best - v[ip];
}

double sidelobe_reach(const PointTarget& target, const PhantomSpec& phantom) {
  double nearest = std::numeric_limits<double>::infinity();
  for (const auto& t : phantom.targets) {
    const double dx = std::abs(t.x - target.x);
    if (dx > 1e-9) nearest = std::min(nearest, dx);
  }
  return 0.5 * nearest;
}

RoiPair default_rois(const PointTarget& target, const PhantomSpec& phantom, const ImageGrid& grid,
                     double half_width) {
  RoiPair out;
  out.target = {target.x - half_width, target.x + half_width, target.z - half_width,
                target.z + half_width};

  double x_left = target.x, x_right = target.x;
  for (const auto& t : phantom.targets) {
    x_left = std::min(x_left, t.x);
    x_right = std::max(x_right, t.x);
  }
  const double clearance = 2.0 * half_width;
  const double width = 2.0 * half_width;
  // Prefer the right side; fall back to the left.
  Roi noise{x_right + clearance, std::min(x_right + clearance + width, grid.x_max),
            out.target.z_lo, out.target.z_hi};
  if (noise.x_hi - noise.x_lo < 0.5 * width) {
    noise.x_hi = x_left - clearance;
    noise.x_lo = std::max(x_left - clearance - width, grid.x_min);
  }
  if (noise.x_hi - noise.x_lo < 0.5 * width) {
    throw ParameterError("default_rois: grid too narrow for a noise ROI clear of all targets");
  }
  out.noise = noise;
  return out;
}

}  // namespace pabf
