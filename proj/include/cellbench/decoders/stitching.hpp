#pragma once

#include <vector>

#include "cellbench/grid.hpp"

namespace cellbench::decoders {

enum class Importance { gaussian, uniform };

struct TileSpec {
  int tile_size = 256;
  int overlap = 64;
  Importance importance = Importance::gaussian;

  void validate() const;
  /// Gaussian width: tile_size / 8.
  double sigma() const noexcept { return tile_size / 8.0; }
};

struct Tile {
  int row = 0;  // canvas position of the tile's top-left pixel
  int col = 0;
  DenseMap data;
};

/// Weight of each tile pixel. The gaussian peaks at the tile center and
/// decays with sigma = tile_size / 8.
RealMap importance_map(int tile_height, int tile_width, const TileSpec& tiling);

/// Top-left corners of a grid of tiles with stride tile_size - overlap; the
/// last tile in each direction is snapped to the canvas edge.
std::vector<std::pair<int, int>> tile_origins(int height, int width, const TileSpec& tiling);

/// Importance-weighted average of overlapping tiles on a height x width
/// canvas. Tile pixels outside the canvas are ignored; every canvas pixel must
/// be covered by at least one tile.
DenseMap stitch_sliding_window(const std::vector<Tile>& tiles, const TileSpec& tiling, int height,
                               int width);

}  // namespace cellbench::decoders
