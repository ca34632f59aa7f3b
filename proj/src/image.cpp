#include "pabf/image.hpp"

#include <algorithm>
#include <limits>

namespace pabf {

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Raw: return "raw";
    case Stage::Filtered: return "filtered";
    case Stage::Envelope: return "envelope";
    case Stage::LogCompressed: return "log_compressed";
  }
  return "unknown";
}

double BeamformedImage::max_value() const {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  return *std::max_element(values.begin(), values.end());
}

}  // namespace pabf
