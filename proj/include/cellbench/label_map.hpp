#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "cellbench/grid.hpp"

namespace cellbench {

/// Cells smaller than this are dropped during dataset curation and decoding.
inline constexpr std::size_t kMinCellPixels = 15;
/// Images with fewer cells than this fail quality control.
inline constexpr std::size_t kMinCellsPerImage = 5;

struct ImageMeta {
  std::string path;
  int channels = 1;
  std::size_t pixel_count = 0;
};

struct QcReport {
  std::size_t cell_count = 0;
  std::size_t removed_small_cells = 0;
  bool passed = false;
  std::vector<std::string> reasons;
};

/// Sorted distinct nonzero labels.
std::vector<Label> instance_ids(const LabelMap& map);
std::size_t instance_count(const LabelMap& map);
/// Pixel count per nonzero label.
std::map<Label, std::size_t> instance_areas(const LabelMap& map);

/// Splits every label into its 4-connected components and renumbers them
/// 1..K in raster order of each component's first pixel.
LabelMap relabel_connected(const LabelMap& map);

/// Renames labels to 1..K in raster order of first appearance without
/// splitting or merging any instance.
LabelMap renumber_consecutive(const LabelMap& map);

/// 4-connected components of a binary mask, labelled 1..K in raster order.
LabelMap label_components(const Mask& mask);

/// Clears every instance with at least one pixel in the outermost frame.
LabelMap remove_boundary_cells(const LabelMap& map);

/// Clears every instance with fewer than `min_pixels` pixels.
LabelMap filter_small_cells(const LabelMap& map, std::size_t min_pixels = kMinCellPixels);

/// Small-cell removal followed by the minimum cell-count rule.
QcReport qc_image(const LabelMap& map);

Mask foreground_mask(const LabelMap& map);

}  // namespace cellbench
