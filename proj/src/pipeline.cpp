#include "pabf/pipeline.hpp"

namespace pabf {

StageImages postprocess(BeamformedImage raw, const BeamformerSpec& spec, double fs,
                        double dynamic_range_db) {
  spec.validate();
  StageImages out;
  if (spec.apply_filter) {
    out.filtered = bandpass(raw, spec.filter, fs);
    out.envelope = envelope(*out.filtered);
  } else {
    out.envelope = envelope(raw);
  }
  out.log = log_compress(out.envelope, dynamic_range_db);
  out.raw = std::move(raw);
  return out;
}

StageImages run_pipeline(const RFFrame& frame, const DelayTable& delays,
                         const BeamformerSpec& spec, double dynamic_range_db,
                         BeamformOptions opts) {
  return postprocess(beamform(frame, delays, spec, opts), spec, frame.geom.sampling_freq,
                     dynamic_range_db);
}

}  // namespace pabf
