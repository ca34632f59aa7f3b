// Python bindings. Arrays cross the boundary as float64 numpy copies:
// frames as (elements, samples), images as (nz, nx) with row 0 shallowest.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <limits>
#include <string>

#include "pabf/config.hpp"
#include "pabf/errors.hpp"
#include "pabf/io.hpp"
#include "pabf/metrics.hpp"
#include "pabf/pipeline.hpp"

namespace py = pybind11;
using namespace pabf;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> as_vector(const Array& a) {
  if (a.ndim() != 1) throw ParameterError("expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

Array image_array(const BeamformedImage& img) {
  const auto& g = img.grid;
  Array out({g.nz, g.nx});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t ix = 0; ix < g.nx; ++ix)
    for (std::size_t iz = 0; iz < g.nz; ++iz) v(iz, ix) = img.at(iz, ix);
  return out;
}

Array axis(std::size_t n, double start, double step) {
  Array out(n);
  auto v = out.mutable_unchecked<1>();
  for (std::size_t k = 0; k < n; ++k) v(k) = start + step * static_cast<double>(k);
  return out;
}

Roi roi_of(const std::tuple<double, double, double, double>& t) {
  return {std::get<0>(t), std::get<2>(t), std::get<1>(t), std::get<3>(t)};
}

LateralProfile profile_of(const Array& x, const Array& db) {
  LateralProfile p;
  p.x = as_vector(x);
  p.value_db = as_vector(db);
  if (p.x.size() != p.value_db.size()) throw ParameterError("x and value arrays differ in length");
  return p;
}

BeamformerSpec spec_for(const RunConfig& cfg, const std::optional<std::string>& method, std::optional<int> p) {
  const Method m = method ? parse_method(*method) : cfg.method;
  return cfg.beamformer(m, p.value_or(m == cfg.method ? cfg.p : 1));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Photoacoustic beamforming core";

  auto param_error = py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
  (void)param_error;

  py::class_<ImageGrid>(m, "Grid")
      .def_readonly("nx", &ImageGrid::nx)
      .def_readonly("nz", &ImageGrid::nz)
      .def_readonly("dx", &ImageGrid::dx)
      .def_readonly("dz", &ImageGrid::dz)
      .def_property_readonly("x", [](const ImageGrid& g) { return axis(g.nx, g.x_min, g.dx); })
      .def_property_readonly("z", [](const ImageGrid& g) { return axis(g.nz, g.z_min, g.dz); });

  py::class_<RunConfig>(m, "Config")
      .def(py::init(&simulation_config), "Simulation preset defaults")
      .def_static("experimental", &experimental_config)
      .def_static("parse", [](const std::string& text) { return parse_config(text, "<string>"); }, py::arg("text"))
      .def_static("load", &load_config, py::arg("path"))
      .def("dump", &dump_config)
      .def_readonly("preset", &RunConfig::preset)
      .def_property_readonly("elements", [](const RunConfig& c) { return c.geometry.num_elements; })
      .def_property_readonly("sampling_freq", [](const RunConfig& c) { return c.geometry.sampling_freq; })
      .def_property_readonly("center_freq", [](const RunConfig& c) { return c.geometry.center_freq; })
      .def_property_readonly("method", [](const RunConfig& c) { return std::string(to_string(c.method)); })
      .def_readonly("p", &RunConfig::p)
      .def_readwrite("dynamic_range_db", &RunConfig::dynamic_range_db)
      .def_property(
          "seed", [](const RunConfig& c) { return c.phantom.rng_seed; },
          [](RunConfig& c, std::uint64_t s) { c.phantom.rng_seed = s; })
      .def_property(
          "noise_snr_db", [](const RunConfig& c) { return c.phantom.noise_snr_db; },
          [](RunConfig& c, std::optional<double> v) { c.phantom.noise_snr_db = v; })
      .def_property_readonly("targets",
                             [](const RunConfig& c) {
                               py::list out;
                               for (const auto& t : c.phantom.targets) out.append(py::make_tuple(t.x, t.z, t.amplitude));
                               return out;
                             })
      .def("grid", &RunConfig::image_grid);

  py::class_<RFFrame>(m, "Frame")
      .def_static(
          "from_array",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a, const RunConfig& cfg) {
            if (a.ndim() != 2) throw ParameterError("frame array must be (elements, samples)");
            if (static_cast<std::size_t>(a.shape(0)) != cfg.geometry.num_elements)
              throw ParameterError("frame has " + std::to_string(a.shape(0)) + " channels, config has " +
                                   std::to_string(cfg.geometry.num_elements) + " elements");
            RFFrame f(cfg.geometry, static_cast<std::size_t>(a.shape(1)));
            std::copy(a.data(), a.data() + a.size(), f.samples.begin());
            return f;
          },
          py::arg("samples"), py::arg("config"))
      .def_property_readonly("num_channels", &RFFrame::num_channels)
      .def_readonly("num_samples", &RFFrame::num_samples)
      .def_property_readonly("samples",
                             [](const RFFrame& f) {
                               Array out({f.num_channels(), f.num_samples});
                               std::copy(f.samples.begin(), f.samples.end(), out.mutable_data());
                               return out;
                             })
      .def("rms", &RFFrame::rms);

  py::class_<DelayTable>(m, "DelayTable")
      .def_property_readonly("grid", &DelayTable::grid)
      .def_property_readonly("num_elements", &DelayTable::num_elements)
      .def("array", [](const DelayTable& t) {
        py::array_t<std::int32_t> out({t.num_pixels(), t.num_elements()});
        auto v = out.mutable_unchecked<2>();
        for (std::size_t px = 0; px < t.num_pixels(); ++px)
          for (std::size_t i = 0; i < t.num_elements(); ++i) v(px, i) = t.at(px, i);
        return out;
      });

  py::class_<BeamformedImage>(m, "Image")
      .def_readonly("grid", &BeamformedImage::grid)
      .def_property_readonly("stage", [](const BeamformedImage& i) { return std::string(to_string(i.stage)); })
      .def_property_readonly("values", &image_array);

  m.def(
      "simulate",
      [](const RunConfig& cfg) {
        SimulationResult r = simulate_frame(cfg.geometry, cfg.phantom, cfg.samples());
        return py::make_tuple(std::move(r.frame), r.warnings);
      },
      py::arg("config"), "Returns (frame, warnings).");
  m.def(
      "compute_delays", [](const RunConfig& cfg) { return compute_delays(cfg.geometry, cfg.image_grid()); },
      py::arg("config"));
  m.def(
      "beamform",
      [](const RFFrame& f, const DelayTable& t, const std::string& method, int p, unsigned threads) {
        BeamformerSpec s = BeamformerSpec::make(parse_method(method), p);
        py::gil_scoped_release release;
        return beamform(f, t, s, {threads});
      },
      py::arg("frame"), py::arg("delays"), py::arg("method") = "das", py::arg("p") = 1, py::arg("threads") = 1);
  m.def(
      "nl2_decomposition",
      [](const RFFrame& f, const DelayTable& t) { return nl2_decomposition(f, t); }, py::arg("frame"),
      py::arg("delays"));
  m.def(
      "pipeline",
      [](const RFFrame& f, const DelayTable& t, const RunConfig& cfg, std::optional<std::string> method,
         std::optional<int> p) {
        const BeamformerSpec s = spec_for(cfg, method, p);
        StageImages st = run_pipeline(f, t, s, cfg.dynamic_range_db);
        py::dict out;
        out["raw"] = std::move(st.raw);
        if (st.filtered) out["filtered"] = std::move(*st.filtered);
        out["envelope"] = std::move(st.envelope);
        out["log"] = std::move(st.log);
        return out;
      },
      py::arg("frame"), py::arg("delays"), py::arg("config"), py::arg("method") = py::none(),
      py::arg("p") = py::none(), "Stage images keyed raw / filtered / envelope / log.");

  m.def("signed_root", &signed_root, py::arg("x"), py::arg("p"));
  m.def("das_kernel", [](const Array& a) { return das_kernel(as_vector(a)); });
  m.def("dmas_kernel", [](const Array& a) { return dmas_kernel(as_vector(a)); });
  m.def("nl_kernel", [](const Array& a, int p) { return nl_kernel(as_vector(a), p); }, py::arg("delayed"), py::arg("p"));
  m.def("nl2_decomposition_kernel", [](const Array& a) { return nl2_decomposition_kernel(as_vector(a)); });
  m.def(
      "ops_per_pixel", [](const std::string& method, std::size_t elements) {
        return ops_per_pixel(parse_method(method), elements);
      });

  m.def(
      "bandpass", [](const BeamformedImage& img, const RunConfig& cfg) {
        return bandpass(img, cfg.filter, cfg.geometry.sampling_freq);
      },
      py::arg("image"), py::arg("config"));
  m.def("envelope", &envelope, py::arg("image"));
  m.def("log_compress", &log_compress, py::arg("image"), py::arg("dynamic_range_db"));

  m.def(
      "snr",
      [](const BeamformedImage& env, std::tuple<double, double, double, double> target,
         std::tuple<double, double, double, double> noise) { return snr(env, roi_of(target), roi_of(noise)); },
      py::arg("envelope"), py::arg("target"), py::arg("noise"),
      "ROIs are (x_lo, z_lo, x_hi, z_hi) in meters.");
  m.def(
      "lateral_profile",
      [](const BeamformedImage& img, double depth) {
        const LateralProfile p = lateral_profile(img, depth);
        return py::make_tuple(py::array_t<double>(p.x.size(), p.x.data()),
                              py::array_t<double>(p.value_db.size(), p.value_db.data()));
      },
      py::arg("log_image"), py::arg("depth"));
  m.def(
      "fwhm", [](const Array& x, const Array& db, double peak_x) { return fwhm(profile_of(x, db), peak_x); },
      py::arg("x"), py::arg("value_db"), py::arg("peak_x"));
  m.def(
      "sidelobe_level",
      [](const Array& x, const Array& db, double peak_x, double reach) {
        return sidelobe_level(profile_of(x, db), peak_x, reach);
      },
      py::arg("x"), py::arg("value_db"), py::arg("peak_x"),
      py::arg("reach") = std::numeric_limits<double>::infinity());

  m.def(
      "write_parf", [](const std::filesystem::path& p, const RFFrame& f) { io::write_file(p, io::encode_parf(f)); },
      py::arg("path"), py::arg("frame"));
  m.def(
      "read_parf",
      [](const std::filesystem::path& p, const RunConfig& cfg) {
        return io::decode_parf(io::read_file(p), cfg.geometry);
      },
      py::arg("path"), py::arg("config"));
  m.def(
      "write_paim",
      [](const std::filesystem::path& p, const BeamformedImage& img) { io::write_file(p, io::encode_paim(img)); },
      py::arg("path"), py::arg("image"));
  m.def(
      "read_paim", [](const std::filesystem::path& p) { return io::decode_paim(io::read_file(p)); },
      py::arg("path"));
  m.def(
      "checksum", [](const py::bytes& b) {
        const std::string s = b;
        return io::checksum(std::vector<std::uint8_t>(s.begin(), s.end()));
      },
      py::arg("data"));
}
