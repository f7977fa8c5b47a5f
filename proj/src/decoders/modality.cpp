#include "cellbench/decoders/modality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cellbench::decoders {

HsvMeans mean_saturation_value(const DenseMap& rgb) {
  if (rgb.channel_count() != 3) throw std::invalid_argument("HSV needs a 3-channel image");
  double s_sum = 0.0;
  double v_sum = 0.0;
  const RealMap& r = rgb.channel(0);
  const RealMap& g = rgb.channel(1);
  const RealMap& b = rgb.channel(2);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double hi = std::max({r[i], g[i], b[i]});
    const double lo = std::min({r[i], g[i], b[i]});
    v_sum += hi;
    s_sum += hi > 0.0 ? (hi - lo) / hi : 0.0;
  }
  const auto n = static_cast<double>(r.size());
  return {s_sum / n, v_sum / n};
}

int classify_modality_group(const DenseMap& image, double cell_area_hint) {
  const int channels = image.channel_count();
  if (channels != 1 && channels != 3) {
    throw std::invalid_argument("modality grouping needs a 1- or 3-channel image, got " +
                                std::to_string(channels));
  }
  for (int k = 0; k < channels; ++k) {
    for (const double v : image.channel(k)) {
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("intensities must lie in [0, 1]");
    }
  }
  if (channels == 1) return 1;
  const HsvMeans m = mean_saturation_value(image);
  if (m.saturation > kGroupMinMeanSaturation && m.value >= kGroupMinMeanValue &&
      m.value <= kGroupMaxMeanValue) {
    return 2;
  }
  if (cell_area_hint > kGroupLargeCellArea) return 3;
  return 4;
}

}  // namespace cellbench::decoders
