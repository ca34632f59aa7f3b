#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "pabf/errors.hpp"

using namespace pabf::cli;

namespace {

void add_common(CLI::App* sub, Overrides& o, bool beamformer_flags) {
  sub->add_option("--config", o.config_path, "key = value config file");
  sub->add_option("--seed", o.seed, "phantom noise seed");
  sub->add_option("--out", o.out, "output path or prefix");
  if (!beamformer_flags) return;
  sub->add_option("--method", o.method, "das | dmas | nl")->check(CLI::IsMember({"das", "dmas", "nl"}));
  sub->add_option("--p", o.p, "NL root order");
  sub->add_option("--filter", o.filter, "band-pass LO_HZ,HI_HZ")->delimiter(',')->expected(2);
  sub->add_flag("--no-filter", o.no_filter, "skip the band-pass");
  sub->add_option("--dynamic-range", o.dynamic_range, "log display range, dB");
  sub->add_option("--threads", o.threads, "pixel-loop threads")->check(CLI::Range(1u, 256u));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pabf: linear-array photoacoustic beamforming (DAS, DMAS, NL_p)"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "simulate an RF frame (PARF)");
  add_common(s, sim.common, false);

  BeamformArgs bf;
  auto* b = app.add_subcommand("beamform", "beamform a PARF frame into PAIM stages and a PGM");
  add_common(b, bf.common, true);
  b->add_option("--in", bf.in, "input PARF")->required();

  MetricsArgs mt;
  auto* m = app.add_subcommand("metrics", "SNR, FWHM and sidelobe level from PAIM images");
  add_common(m, mt.common, true);
  m->add_option("--in", mt.in, "log-compressed PAIM")->required();
  m->add_option("--envelope", mt.envelope, "envelope PAIM")->required();
  m->add_option("--target-roi", mt.target_roi, "x0,z0,x1,z1 in meters")->delimiter(',')->expected(4);
  m->add_option("--noise-roi", mt.noise_roi, "x0,z0,x1,z1 in meters")->delimiter(',')->expected(4);
  m->add_option("--depths", mt.depths, "comma list of depths in meters")->delimiter(',');

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep-p", "NL_p over a list of p with shared delays");
  add_common(w, sw.common, true);
  w->add_option("--in", sw.in, "input PARF (simulated from the config when omitted)");
  w->add_option("--p-list", sw.p_list, "comma list of p")->delimiter(',')->required();

  BenchArgs bn;
  auto* n = app.add_subcommand("bench", "runtime of DAS, DMAS and NL_p against M");
  add_common(n, bn.common, false);
  n->add_option("--p", bn.common.p, "NL root order (default 5)");
  n->add_option("--elements", bn.elements, "comma list of M")->delimiter(',');
  n->add_option("--repeats", bn.repeats, "timed repeats per point");
  n->add_option("--threads", bn.common.threads, "pixel-loop threads; 1 is the reported mode")
      ->check(CLI::Range(1u, 256u));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*s) return cmd_simulate(sim);
    if (*b) return cmd_beamform(bf);
    if (*m) return cmd_metrics(mt);
    if (*w) return cmd_sweep_p(sw);
    if (*n) return cmd_bench(bn);
  } catch (const pabf::ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
