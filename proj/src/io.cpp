#include "pabf/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <system_error>

#include "pabf/errors.hpp"

namespace pabf::io {

static_assert(std::endian::native == std::endian::little, "formats assume a little-endian host");

namespace {

constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  template <typename T>
  void put(T v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void magic(const char (&m)[5]) { bytes_.insert(bytes_.end(), m, m + 4); }
  void reserve(std::size_t n) { bytes_.reserve(n); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  Reader(const std::vector<std::uint8_t>& bytes, const char* what) : bytes_(bytes), what_(what) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void expect_magic(const char (&m)[5]) {
    need(4);
    if (std::memcmp(bytes_.data() + pos_, m, 4) != 0) {
      throw DataError(std::string(what_) + ": bad magic (expected \"" + m + "\")");
    }
    pos_ += 4;
  }
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw DataError(std::string(what_) + ": truncated file");
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  const char* what_;
  std::size_t pos_ = 0;
};

ParfHeader read_parf_header(Reader& r) {
  r.expect_magic("PARF");
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) throw DataError("PARF: unsupported version " + std::to_string(version));
  ParfHeader h;
  h.num_elements = r.get<std::uint32_t>();
  h.num_samples = r.get<std::uint32_t>();
  h.sampling_freq = r.get<double>();
  h.sound_speed = r.get<double>();
  h.pitch = r.get<double>();
  h.first_element_x = r.get<double>();
  return h;
}

}  // namespace

std::vector<std::uint8_t> encode_parf(const RFFrame& frame) {
  Writer w;
  w.reserve(48 + frame.samples.size() * 4);
  w.magic("PARF");
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(frame.num_channels()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(frame.num_samples));
  w.put<double>(frame.geom.sampling_freq);
  w.put<double>(frame.geom.sound_speed);
  w.put<double>(frame.geom.pitch);
  w.put<double>(frame.geom.element_x.empty() ? 0.0 : frame.geom.element_x.front());
  for (double v : frame.samples) w.put<float>(static_cast<float>(v));
  return w.take();
}

ParfHeader decode_parf_header(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes, "PARF");
  return read_parf_header(r);
}

RFFrame decode_parf(const std::vector<std::uint8_t>& bytes, const ArrayGeometry& base) {
  Reader r(bytes, "PARF");
  const ParfHeader h = read_parf_header(r);
  const std::size_t count = static_cast<std::size_t>(h.num_elements) * h.num_samples;
  if (r.remaining() != count * sizeof(float)) {
    throw DataError("PARF: payload holds " + std::to_string(r.remaining()) + " bytes, header implies " +
                    std::to_string(count * sizeof(float)));
  }
  ArrayGeometry g;
  try {
    g = ArrayGeometry::linear(h.num_elements, h.pitch, h.first_element_x, base.center_freq,
                              base.fractional_bandwidth, h.sampling_freq, h.sound_speed);
  } catch (const ParameterError& e) {
    throw DataError(std::string("PARF: invalid header geometry: ") + e.what());
  }
  RFFrame frame(std::move(g), h.num_samples);
  for (double& v : frame.samples) v = r.get<float>();
  return frame;
}

std::vector<std::uint8_t> encode_paim(const BeamformedImage& image) {
  const ImageGrid& g = image.grid;
  Writer w;
  w.reserve(49 + image.values.size() * 4);
  w.magic("PAIM");
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(g.nx));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(g.nz));
  w.put<double>(g.x_min);
  w.put<double>(g.z_min);
  w.put<double>(g.dx);
  w.put<double>(g.dz);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(image.stage));
  for (double v : image.values) w.put<float>(static_cast<float>(v));
  return w.take();
}

BeamformedImage decode_paim(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes, "PAIM");
  r.expect_magic("PAIM");
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) throw DataError("PAIM: unsupported version " + std::to_string(version));
  ImageGrid g;
  g.nx = r.get<std::uint32_t>();
  g.nz = r.get<std::uint32_t>();
  g.x_min = r.get<double>();
  g.z_min = r.get<double>();
  g.dx = r.get<double>();
  g.dz = r.get<double>();
  g.x_max = g.x_min + g.dx * static_cast<double>(g.nx > 0 ? g.nx - 1 : 0);
  g.z_max = g.z_min + g.dz * static_cast<double>(g.nz);
  // Time alignment cannot be known without the acquisition geometry.
  g.time_aligned = false;
  const auto tag = r.get<std::uint8_t>();
  if (tag > static_cast<std::uint8_t>(Stage::LogCompressed)) {
    throw DataError("PAIM: unknown stage tag " + std::to_string(tag));
  }
  try {
    g.validate();
  } catch (const ParameterError& e) {
    throw DataError(std::string("PAIM: invalid grid: ") + e.what());
  }
  const std::size_t count = g.pixels();
  if (r.remaining() != count * sizeof(float)) {
    throw DataError("PAIM: payload size does not match nx*nz");
  }
  BeamformedImage image(g, static_cast<Stage>(tag));
  for (double& v : image.values) v = r.get<float>();
  return image;
}

std::vector<std::uint8_t> encode_pgm(const BeamformedImage& image, double dynamic_range_db) {
  if (image.stage != Stage::LogCompressed) {
    throw ParameterError("pgm: expected a log-compressed image");
  }
  const ImageGrid& g = image.grid;
  const std::string header = "P5\n" + std::to_string(g.nx) + " " + std::to_string(g.nz) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + g.pixels());
  // Rows top (shallow) to bottom, columns left to right.
  for (std::size_t iz = 0; iz < g.nz; ++iz) {
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
      const double db = std::clamp(image.at(iz, ix), -dynamic_range_db, 0.0);
      const double level = std::round((db + dynamic_range_db) / dynamic_range_db * 255.0);
      out.push_back(static_cast<std::uint8_t>(level));
    }
  }
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw DataError("short write to '" + path.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataError("cannot move output into place at '" + path.string() + "': " + ec.message());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::uint64_t checksum(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace pabf::io
