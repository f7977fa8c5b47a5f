#pragma once

#include <cstddef>

#include "cellbench/grid.hpp"
#include "cellbench/label_map.hpp"

namespace cellbench::decoders {

/// Per-pixel gradient flows (unit vectors inside cells, zero elsewhere) plus
/// a cell-probability channel.
struct FlowField {
  RealMap flow_y;
  RealMap flow_x;
  RealMap cell_prob;

  int height() const noexcept { return cell_prob.height(); }
  int width() const noexcept { return cell_prob.width(); }
  void validate() const;

  DenseMap to_dense() const;
  static FlowField from_dense(const DenseMap& map);
};

/// Builds flows by diffusing heat from each cell's median pixel inside the
/// cell mask and taking the normalized gradient of log(1 + heat).
FlowField encode_flow_field(const LabelMap& map);

struct FlowDecodeOptions {
  double prob_threshold = 0.5;
  std::size_t n_iter = 200;
  double step_size = 1.0;
  /// Decoded cells smaller than this are dropped; 0 keeps everything.
  std::size_t min_cell_pixels = kMinCellPixels;
};

/// Advects every foreground pixel along the flow, clusters the final
/// positions into sinks, and labels each pixel with its sink.
LabelMap decode_flow_field(const FlowField& field, const FlowDecodeOptions& options = {});

}  // namespace cellbench::decoders
