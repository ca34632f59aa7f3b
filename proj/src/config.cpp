#include "pabf/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "pabf/errors.hpp"
#include "pabf/io.hpp"

namespace pabf {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v) {
  double out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ParameterError("expected a number, got '" + v + "'");
  }
  return out;
}

long long to_int(const std::string& v) {
  long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ParameterError("expected an integer, got '" + v + "'");
  }
  return out;
}

std::size_t to_count(const std::string& v) {
  const long long n = to_int(v);
  if (n < 0) throw ParameterError("expected a non-negative integer, got '" + v + "'");
  return static_cast<std::size_t>(n);
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

struct Entry {
  std::string key;
  std::string value;
  int line;
};

// Geometry keys are collected and applied together so the element
// positions can be rebuilt consistently.
struct GeometryDraft {
  std::size_t elements;
  double pitch;
  std::optional<double> first_x;
  double f0, bw, fs, c;
};

}  // namespace

RunConfig simulation_config() {
  RunConfig cfg;
  cfg.preset = "simulation";
  cfg.geometry = simulation_probe();
  cfg.grid = GridExtent{};
  cfg.phantom = default_phantom(30.0, 1);
  cfg.filter = simulation_filter();
  cfg.dynamic_range_db = 60.0;
  return cfg;
}

RunConfig experimental_config() {
  RunConfig cfg;
  cfg.preset = "experimental";
  cfg.geometry = experimental_probe();
  cfg.grid = GridExtent{-8.0e-3, 8.0e-3, 3.0e-3, 18.0e-3, 321};
  cfg.phantom = wire_phantom(0.0, 1);
  cfg.filter = experimental_filter();
  cfg.dynamic_range_db = 70.0;
  return cfg;
}

BeamformerSpec RunConfig::beamformer() const { return beamformer(method, p); }

BeamformerSpec RunConfig::beamformer(Method m, int p_value) const {
  BeamformerSpec s = BeamformerSpec::make(m, p_value, filter);
  if (filter_mode == FilterMode::On) s.apply_filter = true;
  if (filter_mode == FilterMode::Off) s.apply_filter = false;
  return s;
}

ImageGrid RunConfig::image_grid() const {
  return build_grid(geometry, grid.x_min, grid.x_max, grid.z_min, grid.z_max, grid.nx);
}

std::size_t RunConfig::samples() const {
  if (num_samples > 0) return num_samples;
  // Cover the phantom and the deepest image row seen from the farthest element.
  const double reach = std::hypot(std::max(std::abs(grid.x_min - geometry.element_x.front()),
                                           std::abs(grid.x_max - geometry.element_x.back())),
                                  grid.z_max);
  const auto for_grid = static_cast<std::size_t>(std::ceil(reach / geometry.sample_spacing())) + 1;
  return std::max(required_samples(geometry, phantom), for_grid);
}

void RunConfig::validate() const {
  geometry.validate();
  phantom.validate();
  (void)image_grid();
  if (method == Method::NL && p < 1) throw ParameterError("p must be >= 1");
  if (filter_mode != FilterMode::Off || filter_required(method, p)) {
    filter.validate(geometry.sampling_freq);
  }
  beamformer().validate();
  if (!(dynamic_range_db > 0.0)) throw ParameterError("dynamic_range_db must be > 0");
}

RunConfig parse_config(std::string_view text, std::string_view source) {
  std::vector<Entry> entries;
  {
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      const auto hash = raw.find('#');
      const std::string line = trim(std::string_view(raw).substr(0, hash));
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ParameterError(std::string(source) + ":" + std::to_string(line_no) +
                             ": expected 'key = value'");
      }
      entries.push_back({trim(std::string_view(line).substr(0, eq)),
                         trim(std::string_view(line).substr(eq + 1)), line_no});
    }
  }
  auto fail = [&](const Entry& e, const std::string& msg) -> ParameterError {
    return ParameterError(std::string(source) + ":" + std::to_string(e.line) + ": " + e.key + ": " +
                          msg);
  };

  // The preset seeds every default, wherever it appears in the file.
  RunConfig cfg = simulation_config();
  for (const auto& e : entries) {
    if (e.key != "preset") continue;
    if (e.value == "simulation") {
      cfg = simulation_config();
    } else if (e.value == "experimental") {
      cfg = experimental_config();
    } else {
      throw fail(e, "unknown preset '" + e.value + "' (expected simulation or experimental)");
    }
  }

  GeometryDraft geo{cfg.geometry.num_elements, cfg.geometry.pitch, std::nullopt,
                    cfg.geometry.center_freq, cfg.geometry.fractional_bandwidth,
                    cfg.geometry.sampling_freq, cfg.geometry.sound_speed};
  std::vector<PointTarget> explicit_targets;
  std::set<std::string> seen;
  const Entry* last_geometry_entry = nullptr;
  const Entry* last_filter_entry = nullptr;

  for (const auto& e : entries) {
    if (e.key != "target" && !seen.insert(e.key).second) throw fail(e, "repeated key");
    try {
      if (e.key == "preset") {
      } else if (e.key == "elements") {
        geo.elements = to_count(e.value);
        last_geometry_entry = &e;
      } else if (e.key == "pitch_m") {
        geo.pitch = to_double(e.value);
        last_geometry_entry = &e;
      } else if (e.key == "first_element_x_m") {
        geo.first_x = to_double(e.value);
        last_geometry_entry = &e;
      } else if (e.key == "center_freq_hz") {
        geo.f0 = to_double(e.value);
        last_geometry_entry = &e;
      } else if (e.key == "fractional_bandwidth") {
        geo.bw = to_double(e.value);
        last_geometry_entry = &e;
      } else if (e.key == "sampling_freq_hz") {
        geo.fs = to_double(e.value);
        last_geometry_entry = &e;
      } else if (e.key == "sound_speed_mps") {
        geo.c = to_double(e.value);
        last_geometry_entry = &e;
      } else if (e.key == "num_samples") {
        cfg.num_samples = to_count(e.value);
      } else if (e.key == "grid_x_min_m") {
        cfg.grid.x_min = to_double(e.value);
      } else if (e.key == "grid_x_max_m") {
        cfg.grid.x_max = to_double(e.value);
      } else if (e.key == "grid_z_min_m") {
        cfg.grid.z_min = to_double(e.value);
      } else if (e.key == "grid_z_max_m") {
        cfg.grid.z_max = to_double(e.value);
      } else if (e.key == "grid_nx") {
        cfg.grid.nx = to_count(e.value);
      } else if (e.key == "phantom") {
        const auto noise = cfg.phantom.noise_snr_db;
        const auto seed = cfg.phantom.rng_seed;
        if (e.value == "default") {
          cfg.phantom.targets = default_phantom(noise, seed).targets;
        } else if (e.value == "wire") {
          cfg.phantom.targets = wire_phantom(noise, seed).targets;
        } else if (e.value == "none") {
          cfg.phantom.targets.clear();
        } else {
          throw ParameterError("unknown phantom '" + e.value + "' (expected default, wire or none)");
        }
      } else if (e.key == "target") {
        const auto parts = split(e.value, ',');
        if (parts.size() != 3) throw ParameterError("expected x_m,z_m,amplitude");
        PointTarget t{to_double(parts[0]), to_double(parts[1]), to_double(parts[2])};
        PhantomSpec probe{{t}, std::nullopt, 0};
        probe.validate();
        explicit_targets.push_back(t);
      } else if (e.key == "noise_snr_db") {
        if (e.value == "none") {
          cfg.phantom.noise_snr_db.reset();
        } else {
          cfg.phantom.noise_snr_db = to_double(e.value);
        }
      } else if (e.key == "seed") {
        cfg.phantom.rng_seed = static_cast<std::uint64_t>(to_count(e.value));
      } else if (e.key == "method") {
        cfg.method = parse_method(e.value);
      } else if (e.key == "p") {
        const long long p = to_int(e.value);
        if (p < 1 || p > 1000) throw ParameterError("p must be in [1, 1000]");
        cfg.p = static_cast<int>(p);
      } else if (e.key == "apply_filter") {
        if (e.value == "auto") {
          cfg.filter_mode = FilterMode::Auto;
        } else if (e.value == "true") {
          cfg.filter_mode = FilterMode::On;
        } else if (e.value == "false") {
          cfg.filter_mode = FilterMode::Off;
        } else {
          throw ParameterError("expected auto, true or false");
        }
      } else if (e.key == "filter_lo_hz") {
        cfg.filter.pass_lo = to_double(e.value);
        last_filter_entry = &e;
      } else if (e.key == "filter_hi_hz") {
        cfg.filter.pass_hi = to_double(e.value);
        last_filter_entry = &e;
      } else if (e.key == "tukey_alpha") {
        cfg.filter.tukey_alpha = to_double(e.value);
        last_filter_entry = &e;
      } else if (e.key == "dynamic_range_db") {
        cfg.dynamic_range_db = to_double(e.value);
        if (!(cfg.dynamic_range_db > 0.0)) throw ParameterError("must be > 0");
      } else if (e.key == "out") {
        if (e.value.empty()) throw ParameterError("empty path");
        cfg.out = e.value;
      } else {
        throw ParameterError("unknown key");
      }
    } catch (const ParameterError& err) {
      const std::string msg = err.what();
      if (msg.rfind(std::string(source) + ":", 0) == 0) throw;
      throw fail(e, msg);
    }
  }

  if (!explicit_targets.empty()) {
    // Explicit targets replace the preset phantom unless `phantom` was named.
    if (!seen.count("phantom")) cfg.phantom.targets.clear();
    cfg.phantom.targets.insert(cfg.phantom.targets.end(), explicit_targets.begin(),
                               explicit_targets.end());
  }

  try {
    if (geo.first_x) {
      cfg.geometry = ArrayGeometry::linear(geo.elements, geo.pitch, *geo.first_x, geo.f0, geo.bw,
                                           geo.fs, geo.c);
    } else {
      cfg.geometry = ArrayGeometry::centered(geo.elements, geo.pitch, geo.f0, geo.bw, geo.fs, geo.c);
    }
  } catch (const ParameterError& err) {
    if (last_geometry_entry) throw fail(*last_geometry_entry, err.what());
    throw;
  }
  try {
    cfg.validate();
  } catch (const ParameterError& err) {
    const std::string msg = err.what();
    if (last_filter_entry && msg.rfind("filter", 0) == 0) throw fail(*last_filter_entry, msg);
    throw ParameterError(std::string(source) + ": " + msg);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = io::read_file(path);
  } catch (const DataError& e) {
    throw ParameterError(e.what());
  }
  return parse_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                      path);
}

std::string dump_config(const RunConfig& cfg) {
  using io::format_double;
  std::ostringstream o;
  const auto& g = cfg.geometry;
  o << "preset = " << cfg.preset << "\n"
    << "elements = " << g.num_elements << "\n"
    << "pitch_m = " << format_double(g.pitch) << "\n"
    << "first_element_x_m = " << format_double(g.element_x.front()) << "\n"
    << "center_freq_hz = " << format_double(g.center_freq) << "\n"
    << "fractional_bandwidth = " << format_double(g.fractional_bandwidth) << "\n"
    << "sampling_freq_hz = " << format_double(g.sampling_freq) << "\n"
    << "sound_speed_mps = " << format_double(g.sound_speed) << "\n"
    << "num_samples = " << cfg.num_samples << "\n"
    << "grid_x_min_m = " << format_double(cfg.grid.x_min) << "\n"
    << "grid_x_max_m = " << format_double(cfg.grid.x_max) << "\n"
    << "grid_z_min_m = " << format_double(cfg.grid.z_min) << "\n"
    << "grid_z_max_m = " << format_double(cfg.grid.z_max) << "\n"
    << "grid_nx = " << cfg.grid.nx << "\n"
    << "phantom = none\n";
  for (const auto& t : cfg.phantom.targets) {
    o << "target = " << format_double(t.x) << "," << format_double(t.z) << ","
      << format_double(t.amplitude) << "\n";
  }
  o << "noise_snr_db = "
    << (cfg.phantom.noise_snr_db ? format_double(*cfg.phantom.noise_snr_db) : std::string("none"))
    << "\n"
    << "seed = " << cfg.phantom.rng_seed << "\n"
    << "method = " << to_string(cfg.method) << "\n"
    << "p = " << cfg.p << "\n"
    << "apply_filter = "
    << (cfg.filter_mode == FilterMode::Auto ? "auto" : cfg.filter_mode == FilterMode::On ? "true" : "false")
    << "\n"
    << "filter_lo_hz = " << format_double(cfg.filter.pass_lo) << "\n"
    << "filter_hi_hz = " << format_double(cfg.filter.pass_hi) << "\n"
    << "tukey_alpha = " << format_double(cfg.filter.tukey_alpha) << "\n"
    << "dynamic_range_db = " << format_double(cfg.dynamic_range_db) << "\n"
    << "out = " << cfg.out << "\n";
  return o.str();
}

}  // namespace pabf
