#pragma once

// File formats. All binary formats are little-endian.
//
// PARF (RF frame):
//   "PARF" u32 version=1 u32 M u32 Ns f64 fs_hz f64 c_mps f64 pitch_m
//   f64 first_element_x_m, then M*Ns f32 samples, channel-major.
//
// PAIM (image):
//   "PAIM" u32 version=1 u32 nx u32 nz f64 x0_m f64 z0_m f64 dx_m f64 dz_m
//   u8 stage, then nx*nz f32 values, column-major.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pabf/image.hpp"
#include "pabf/phantom.hpp"

namespace pabf::io {

struct ParfHeader {
  std::uint32_t num_elements = 0;
  std::uint32_t num_samples = 0;
  double sampling_freq = 0;
  double sound_speed = 0;
  double pitch = 0;
  double first_element_x = 0;
};

std::vector<std::uint8_t> encode_parf(const RFFrame& frame);
/// Geometry fields not carried by PARF (f0, bandwidth) are taken from `base`.
RFFrame decode_parf(const std::vector<std::uint8_t>& bytes, const ArrayGeometry& base);
ParfHeader decode_parf_header(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> encode_paim(const BeamformedImage& image);
BeamformedImage decode_paim(const std::vector<std::uint8_t>& bytes);

/// 8-bit binary PGM (P5) of a log-compressed image; [-dr, 0] dB -> [0, 255].
std::vector<std::uint8_t> encode_pgm(const BeamformedImage& image, double dynamic_range_db);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
/// Writes via a temporary sibling then renames, so a failed write leaves no
/// partial output behind.
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
void write_text(const std::filesystem::path& path, const std::string& text);

/// FNV-1a 64-bit, printed as a frame checksum.
std::uint64_t checksum(const std::vector<std::uint8_t>& bytes);

/// Shortest round-trip decimal representation with '.' separator.
std::string format_double(double v);

}  // namespace pabf::io
