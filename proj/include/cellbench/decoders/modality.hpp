#pragma once

#include "cellbench/grid.hpp"

namespace cellbench::decoders {

/// Thresholds of the intensity-based image grouping.
inline constexpr double kGroupMinMeanSaturation = 0.1;
inline constexpr double kGroupMinMeanValue = 0.1;
inline constexpr double kGroupMaxMeanValue = 0.6;
inline constexpr double kGroupLargeCellArea = 8000.0;

struct HsvMeans {
  double saturation = 0.0;
  double value = 0.0;
};

/// Mean HSV saturation and value of an RGB image with intensities in [0, 1].
HsvMeans mean_saturation_value(const DenseMap& rgb);

/// Routes an image to one of four groups:
///   1  single-channel image
///   2  RGB with mean S > 0.1 and mean V in [0.1, 0.6]
///   3  other RGB with mean cell area above 8000 pixels
///   4  everything else
/// `cell_area_hint` is the caller's estimate of mean pixels per cell.
int classify_modality_group(const DenseMap& image, double cell_area_hint);

}  // namespace cellbench::decoders
