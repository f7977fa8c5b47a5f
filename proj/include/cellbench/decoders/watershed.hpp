#pragma once

#include "cellbench/grid.hpp"

namespace cellbench::decoders {

/// Priority flood from marker pixels over 4-connected foreground, lowest
/// elevation first (FIFO among equal elevations). Each foreground pixel takes
/// the label of the first basin that reaches it; foreground components
/// without a marker stay 0.
LabelMap marker_watershed(const RealMap& elevation, const LabelMap& markers, const Mask& foreground);

/// Exact Euclidean distance from each foreground pixel to the nearest
/// background pixel (pixels beyond the image edge do not count as background).
RealMap distance_transform(const Mask& foreground);

/// Markers at local maxima of `score` inside `foreground`: a pixel qualifies
/// when it is positive and no pixel within Chebyshev radius `min_distance`
/// exceeds it. Qualifying plateau pixels that touch are merged into one marker.
LabelMap peak_markers(const RealMap& score, const Mask& foreground, int min_distance = 2);

}  // namespace cellbench::decoders
