#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pabf/config.hpp"
#include "pabf/metrics.hpp"

namespace pabf::cli {

// Flags shared by the subcommands; unset optionals keep the config value.
struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;
  std::optional<int> p;
  std::optional<std::vector<double>> filter;  // lo, hi
  bool no_filter = false;
  std::optional<double> dynamic_range;
  std::optional<std::string> out;
  unsigned threads = 1;
};

RunConfig resolve_config(const Overrides& o);

struct SimulateArgs {
  Overrides common;
};

struct BeamformArgs {
  Overrides common;
  std::string in;
};

struct MetricsArgs {
  Overrides common;
  std::string in;        // log-compressed PAIM
  std::string envelope;  // envelope PAIM
  std::optional<std::vector<double>> target_roi;
  std::optional<std::vector<double>> noise_roi;
  std::optional<std::vector<double>> depths;
};

struct SweepArgs {
  Overrides common;
  std::string in;  // optional PARF; simulated from the config when empty
  std::vector<int> p_list;
};

struct BenchArgs {
  Overrides common;
  std::vector<std::size_t> elements{16, 32, 64, 128};
  std::size_t repeats = 3;
};

int cmd_simulate(const SimulateArgs& a);
int cmd_beamform(const BeamformArgs& a);
int cmd_metrics(const MetricsArgs& a);
int cmd_sweep_p(const SweepArgs& a);
int cmd_bench(const BenchArgs& a);

// One metrics row; nullopt cells are written as ERROR.
struct MetricRow {
  std::string method;
  std::optional<int> p;
  double depth = 0;
  std::optional<double> snr_db, fwhm_mm, sidelobe_db;
  std::vector<std::string> errors;
};

struct MetricTarget {
  PointTarget point;
  RoiPair rois;
  double reach = 0;
  std::string roi_error;  // set when no noise ROI fits; SNR is then reported as ERROR
};

// Targets evaluated by default: for each depth holding an off-axis target,
// the rightmost target at that depth.
std::vector<MetricTarget> default_metric_targets(const PhantomSpec& phantom, const ImageGrid& grid);

MetricRow measure(const BeamformedImage& envelope, const BeamformedImage& log,
                  const MetricTarget& target, const std::string& method, std::optional<int> p);

std::string metrics_csv(const std::vector<MetricRow>& rows);

}  // namespace pabf::cli
