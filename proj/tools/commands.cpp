#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include "pabf/bench.hpp"
#include "pabf/errors.hpp"
#include "pabf/io.hpp"
#include "pabf/pipeline.hpp"

namespace pabf::cli {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

Roi roi_from(const std::vector<double>& v, const char* flag) {
  if (v.size() != 4) throw ParameterError(std::string(flag) + " expects x0,z0,x1,z1");
  Roi r{std::min(v[0], v[2]), std::max(v[0], v[2]), std::min(v[1], v[3]), std::max(v[1], v[3])};
  r.validate();
  return r;
}

bool same(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

void check_geometry(const io::ParfHeader& h, const ArrayGeometry& g) {
  auto mismatch = [](const std::string& field, const std::string& file, const std::string& cfg) {
    throw DataError("PARF " + field + " " + file + " does not match config " + field + " " + cfg);
  };
  if (h.num_elements != g.num_elements)
    mismatch("elements", std::to_string(h.num_elements), std::to_string(g.num_elements));
  if (!same(h.sampling_freq, g.sampling_freq))
    mismatch("sampling_freq_hz", io::format_double(h.sampling_freq), io::format_double(g.sampling_freq));
  if (!same(h.sound_speed, g.sound_speed))
    mismatch("sound_speed_mps", io::format_double(h.sound_speed), io::format_double(g.sound_speed));
  if (g.num_elements > 1 && !same(h.pitch, g.pitch))
    mismatch("pitch_m", io::format_double(h.pitch), io::format_double(g.pitch));
  if (!same(h.first_element_x, g.element_x.front()) &&
      std::abs(h.first_element_x - g.element_x.front()) > 1e-12)
    mismatch("first_element_x_m", io::format_double(h.first_element_x),
             io::format_double(g.element_x.front()));
}

RFFrame load_frame(const std::string& path, const RunConfig& cfg) {
  const auto bytes = io::read_file(path);
  check_geometry(io::decode_parf_header(bytes), cfg.geometry);
  return io::decode_parf(bytes, cfg.geometry);
}

void write_stages(const std::string& prefix, const StageImages& st, double dr) {
  io::write_file(prefix + "_raw.paim", io::encode_paim(st.raw));
  if (st.filtered) io::write_file(prefix + "_filtered.paim", io::encode_paim(*st.filtered));
  io::write_file(prefix + "_envelope.paim", io::encode_paim(st.envelope));
  io::write_file(prefix + "_log.paim", io::encode_paim(st.log));
  io::write_file(prefix + ".pgm", io::encode_pgm(st.log, dr));
}

std::string profile_csv(const LateralProfile& prof) {
  std::string out = "x_mm,value_db\n";
  for (std::size_t i = 0; i < prof.x.size(); ++i)
    out += fixed(prof.x[i] * 1e3, 4) + "," + fixed(prof.value_db[i], 4) + "\n";
  return out;
}

void write_profiles(const std::string& prefix, const BeamformedImage& log,
                    const std::vector<MetricTarget>& targets) {
  std::set<std::string> done;
  for (const auto& t : targets) {
    const std::string tag = fixed(t.point.z * 1e3, 3);
    if (!done.insert(tag).second) continue;
    try {
      io::write_text(prefix + "_profile_z" + tag + "mm.csv", profile_csv(lateral_profile(log, t.point.z)));
    } catch (const DataError& e) {
      std::cerr << "profile at " << tag << " mm: " << e.what() << "\n";
    }
  }
}

void report(const std::vector<MetricRow>& rows) {
  for (const auto& r : rows)
    for (const auto& e : r.errors) std::cerr << "depth " << fixed(r.depth * 1e3, 3) << " mm: " << e << "\n";
}

}  // namespace

RunConfig resolve_config(const Overrides& o) {
  RunConfig cfg = o.config_path.empty() ? simulation_config() : load_config(o.config_path);
  if (o.seed) cfg.phantom.rng_seed = *o.seed;
  if (o.method) cfg.method = parse_method(*o.method);
  if (o.p) cfg.p = *o.p;
  if (o.filter && o.no_filter) throw ParameterError("--filter and --no-filter are exclusive");
  if (o.filter) {
    if (o.filter->size() != 2) throw ParameterError("--filter expects LO_HZ,HI_HZ");
    cfg.filter.pass_lo = (*o.filter)[0];
    cfg.filter.pass_hi = (*o.filter)[1];
    cfg.filter_mode = FilterMode::On;
  }
  if (o.no_filter) cfg.filter_mode = FilterMode::Off;
  if (o.dynamic_range) cfg.dynamic_range_db = *o.dynamic_range;
  if (o.out) cfg.out = *o.out;
  cfg.validate();
  return cfg;
}

std::vector<MetricTarget> default_metric_targets(const PhantomSpec& phantom, const ImageGrid& grid) {
  std::vector<double> depths;
  for (const auto& t : phantom.targets)
    if (std::abs(t.x) > 1e-9) depths.push_back(t.z);
  std::sort(depths.begin(), depths.end());
  depths.erase(std::unique(depths.begin(), depths.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-9; }),
               depths.end());
  std::vector<MetricTarget> out;
  for (double z : depths) {
    const PointTarget* best = nullptr;
    for (const auto& t : phantom.targets)
      if (std::abs(t.z - z) < 1e-9 && (!best || t.x > best->x)) best = &t;
    MetricTarget m{*best, {}, sidelobe_reach(*best, phantom), {}};
    try {
      m.rois = default_rois(*best, phantom, grid);
    } catch (const ParameterError& e) {
      m.roi_error = e.what();
    }
    out.push_back(m);
  }
  return out;
}

MetricRow measure(const BeamformedImage& envelope, const BeamformedImage& log,
                  const MetricTarget& target, const std::string& method, std::optional<int> p) {
  MetricRow row;
  row.method = method;
  row.p = p;
  row.depth = target.point.z;
  try {
    if (!target.roi_error.empty()) throw ParameterError(target.roi_error);
    row.snr_db = snr(envelope, target.rois.target, target.rois.noise);
  } catch (const std::exception& e) {
    row.errors.push_back(std::string("snr: ") + e.what());
  }
  try {
    const LateralProfile prof = lateral_profile(log, target.point.z);
    try {
      row.fwhm_mm = fwhm(prof, target.point.x) * 1e3;
    } catch (const std::exception& e) {
      row.errors.push_back(std::string("fwhm: ") + e.what());
    }
    try {
      row.sidelobe_db = sidelobe_level(prof, target.point.x, target.reach);
    } catch (const std::exception& e) {
      row.errors.push_back(std::string("sidelobe: ") + e.what());
    }
  } catch (const std::exception& e) {
    row.errors.push_back(std::string("profile: ") + e.what());
  }
  return row;
}

std::string metrics_csv(const std::vector<MetricRow>& rows) {
  auto cell = [](const std::optional<double>& v) { return v ? fixed(*v, 4) : std::string("ERROR"); };
  std::string out = "method,p,depth_mm,snr_db,fwhm_mm,sidelobe_db\n";
  for (const auto& r : rows) {
    out += r.method + "," + (r.p ? std::to_string(*r.p) : std::string()) + "," + fixed(r.depth * 1e3, 3) +
           "," + cell(r.snr_db) + "," + cell(r.fwhm_mm) + "," + cell(r.sidelobe_db) + "\n";
  }
  return out;
}

int cmd_simulate(const SimulateArgs& a) {
  const RunConfig cfg = resolve_config(a.common);
  const std::string path = a.common.out ? *a.common.out : cfg.out + ".parf";
  SimulationResult sim = simulate_frame(cfg.geometry, cfg.phantom, cfg.samples());
  for (const auto& w : sim.warnings) std::cerr << "warning: " << w << "\n";
  const auto bytes = io::encode_parf(sim.frame);
  io::write_file(path, bytes);
  char sum[17];
  std::snprintf(sum, sizeof sum, "%016llx", static_cast<unsigned long long>(io::checksum(bytes)));
  std::cout << "wrote " << path << "\n"
            << "elements " << sim.frame.num_channels() << "\n"
            << "samples " << sim.frame.num_samples << "\n"
            << "sampling_freq_hz " << io::format_double(cfg.geometry.sampling_freq) << "\n"
            << "sound_speed_mps " << io::format_double(cfg.geometry.sound_speed) << "\n"
            << "targets " << cfg.phantom.targets.size() << "\n"
            << "noise_snr_db "
            << (cfg.phantom.noise_snr_db ? io::format_double(*cfg.phantom.noise_snr_db) : std::string("none"))
            << "\n"
            << "seed " << cfg.phantom.rng_seed << "\n"
            << "checksum " << sum << "\n";
  return 0;
}

int cmd_beamform(const BeamformArgs& a) {
  const RunConfig cfg = resolve_config(a.common);
  const BeamformerSpec spec = cfg.beamformer();
  const RFFrame frame = load_frame(a.in, cfg);
  const DelayTable delays = compute_delays(frame.geom, cfg.image_grid());
  const StageImages st = run_pipeline(frame, delays, spec, cfg.dynamic_range_db, {a.common.threads});
  write_stages(cfg.out, st, cfg.dynamic_range_db);
  std::cout << spec.label() << (spec.apply_filter ? " filtered " : " unfiltered ")
            << delays.grid().nx << "x" << delays.grid().nz << " -> " << cfg.out << "_*.paim\n";
  return 0;
}

int cmd_metrics(const MetricsArgs& a) {
  const RunConfig cfg = resolve_config(a.common);
  const BeamformedImage log = io::decode_paim(io::read_file(a.in));
  const BeamformedImage env = io::decode_paim(io::read_file(a.envelope));
  if (env.grid.nx != log.grid.nx || env.grid.nz != log.grid.nz)
    throw DataError("envelope image is " + std::to_string(env.grid.nx) + "x" + std::to_string(env.grid.nz) +
                    ", log image is " + std::to_string(log.grid.nx) + "x" + std::to_string(log.grid.nz));

  std::vector<MetricTarget> targets;
  if (a.target_roi) {
    const Roi t = roi_from(*a.target_roi, "--target-roi");
    const PointTarget centre{0.5 * (t.x_lo + t.x_hi), 0.5 * (t.z_lo + t.z_hi), 1.0};
    RoiPair rois = default_rois(centre, cfg.phantom, log.grid, 0.5 * (t.x_hi - t.x_lo));
    rois.target = t;
    if (a.noise_roi) rois.noise = roi_from(*a.noise_roi, "--noise-roi");
    if (rois.target.overlaps(rois.noise)) throw ParameterError("target and noise ROIs overlap");
    const double reach = sidelobe_reach(centre, cfg.phantom);
    if (a.depths) {
      for (double z : *a.depths) targets.push_back({{centre.x, z, 1.0}, rois, reach, {}});
    } else {
      targets.push_back({centre, rois, reach, {}});
    }
  } else {
    auto all = default_metric_targets(cfg.phantom, log.grid);
    if (a.depths) {
      std::vector<MetricTarget> picked;
      for (double z : *a.depths) {
        const MetricTarget* best = nullptr;
        for (const auto& t : all)
          if (!best || std::abs(t.point.z - z) < std::abs(best->point.z - z)) best = &t;
        if (!best) throw ParameterError("config phantom has no off-axis targets to measure");
        MetricTarget m = *best;
        m.point.z = z;
        picked.push_back(m);
      }
      all = std::move(picked);
    }
    targets = std::move(all);
    if (a.noise_roi) {
      const Roi n = roi_from(*a.noise_roi, "--noise-roi");
      for (auto& t : targets) {
        t.rois.noise = n;
        t.roi_error.clear();
      }
    }
  }

  const std::string method(to_string(cfg.method));
  const std::optional<int> p = cfg.method == Method::NL ? std::optional<int>(cfg.p) : std::nullopt;
  std::vector<MetricRow> rows;
  for (const auto& t : targets) rows.push_back(measure(env, log, t, method, p));
  report(rows);
  io::write_text(cfg.out + "_metrics.csv", metrics_csv(rows));
  write_profiles(cfg.out, log, targets);
  std::cout << metrics_csv(rows);
  return 0;
}

int cmd_sweep_p(const SweepArgs& a) {
  if (a.p_list.empty()) throw ParameterError("--p-list is empty");
  const RunConfig cfg = resolve_config(a.common);
  std::vector<BeamformerSpec> specs;
  for (int p : a.p_list) {
    BeamformerSpec s = cfg.beamformer(Method::NL, p);
    s.validate();
    specs.push_back(s);
  }
  RFFrame frame;
  if (a.in.empty()) {
    SimulationResult sim = simulate_frame(cfg.geometry, cfg.phantom, cfg.samples());
    for (const auto& w : sim.warnings) std::cerr << "warning: " << w << "\n";
    frame = std::move(sim.frame);
  } else {
    frame = load_frame(a.in, cfg);
  }
  const DelayTable delays = compute_delays(frame.geom, cfg.image_grid());
  const auto targets = default_metric_targets(cfg.phantom, delays.grid());

  std::vector<MetricRow> rows;
  for (const auto& spec : specs) {
    const StageImages st = run_pipeline(frame, delays, spec, cfg.dynamic_range_db, {a.common.threads});
    const std::string prefix = cfg.out + "_p" + std::to_string(spec.p);
    io::write_file(prefix + "_envelope.paim", io::encode_paim(st.envelope));
    io::write_file(prefix + "_log.paim", io::encode_paim(st.log));
    io::write_file(prefix + ".pgm", io::encode_pgm(st.log, cfg.dynamic_range_db));
    write_profiles(prefix, st.log, targets);
    for (const auto& t : targets) rows.push_back(measure(st.envelope, st.log, t, "nl", spec.p));
  }
  report(rows);
  io::write_text(cfg.out + "_sweep.csv", metrics_csv(rows));
  std::cout << metrics_csv(rows);
  return 0;
}

int cmd_bench(const BenchArgs& a) {
  if (a.repeats < 3) throw ParameterError("--repeats must be at least 3");
  for (auto m : a.elements)
    if (m < 2) throw ParameterError("--elements values must be at least 2");
  const RunConfig cfg = resolve_config(a.common);
  const int p = a.common.p.value_or(5);
  const std::vector<BeamformerSpec> specs{BeamformerSpec::make(Method::DAS), BeamformerSpec::make(Method::DMAS),
                                          BeamformerSpec::make(Method::NL, p)};
  BenchOptions opts;
  opts.repeats = a.repeats;
  opts.seed = cfg.phantom.rng_seed;
  opts.threads = a.common.threads;
  const auto results = run_bench(specs, a.elements, bench_grid(simulation_probe()), opts);
  const std::string csv = bench_csv(results);
  if (a.common.out) io::write_text(*a.common.out, csv);
  std::cout << csv;
  return 0;
}

}  // namespace pabf::cli
