#pragma once

#include <optional>

#include "pabf/beamcore.hpp"
#include "pabf/image.hpp"

namespace pabf {

/// Every stage produced for one beamformer run.
struct StageImages {
  BeamformedImage raw;
  std::optional<BeamformedImage> filtered;
  BeamformedImage envelope;
  BeamformedImage log;
};

/// raw -> [bandpass] -> envelope -> log_compress.
StageImages postprocess(BeamformedImage raw, const BeamformerSpec& spec, double fs,
                        double dynamic_range_db);

StageImages run_pipeline(const RFFrame& frame, const DelayTable& delays,
                         const BeamformerSpec& spec, double dynamic_range_db,
                         BeamformOptions opts = {});

}  // namespace pabf
