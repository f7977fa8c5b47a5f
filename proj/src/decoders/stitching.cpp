#include "cellbench/decoders/stitching.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cellbench::decoders {

namespace {

std::vector<int> axis_origins(int extent, int tile, int stride) {
  std::vector<int> out;
  if (extent <= tile) return {0};
  for (int o = 0; o + tile < extent; o += stride) out.push_back(o);
  out.push_back(extent - tile);
  return out;
}

}  // namespace

void TileSpec::validate() const {
  if (tile_size < 1) throw std::invalid_argument("tile_size must be positive");
  if (overlap < 0 || overlap >= tile_size) {
    throw std::invalid_argument("overlap must satisfy 0 <= overlap < tile_size");
  }
}

RealMap importance_map(int tile_height, int tile_width, const TileSpec& tiling) {
  tiling.validate();
  RealMap w(tile_height, tile_width, 1.0);
  if (tiling.importance == Importance::uniform) return w;
  const double cy = (tile_height - 1) / 2.0;
  const double cx = (tile_width - 1) / 2.0;
  const double two_s2 = 2.0 * tiling.sigma() * tiling.sigma();
  for (int r = 0; r < tile_height; ++r) {
    for (int c = 0; c < tile_width; ++c) {
      const double d2 = (r - cy) * (r - cy) + (c - cx) * (c - cx);
      w(r, c) = std::exp(-d2 / two_s2);
    }
  }
  // keep every weight strictly positive so each covered pixel has mass
  double floor_weight = 1.0;
  for (const double v : w) {
    if (v > 0.0) floor_weight = std::min(floor_weight, v);
  }
  for (double& v : w) v = std::max(v, floor_weight);
  return w;
}

std::vector<std::pair<int, int>> tile_origins(int height, int width, const TileSpec& tiling) {
  tiling.validate();
  const int stride = tiling.tile_size - tiling.overlap;
  std::vector<std::pair<int, int>> out;
  for (const int r : axis_origins(height, tiling.tile_size, stride)) {
    for (const int c : axis_origins(width, tiling.tile_size, stride)) out.emplace_back(r, c);
  }
  return out;
}

DenseMap stitch_sliding_window(const std::vector<Tile>& tiles, const TileSpec& tiling, int height,
                               int width) {
  tiling.validate();
  if (tiles.empty()) throw std::invalid_argument("no tiles to stitch");
  const int channels = tiles.front().data.channel_count();
  DenseMap sum(height, width, channels);
  RealMap mass(height, width);
  for (const Tile& t : tiles) {
    if (t.data.channel_count() != channels) {
      throw std::invalid_argument("tiles disagree on channel count");
    }
    const RealMap weight = importance_map(t.data.height(), t.data.width(), tiling);
    for (int r = 0; r < t.data.height(); ++r) {
      const int y = t.row + r;
      if (y < 0 || y >= height) continue;
      for (int c = 0; c < t.data.width(); ++c) {
        const int x = t.col + c;
        if (x < 0 || x >= width) continue;
        const double wgt = weight(r, c);
        mass(y, x) += wgt;
        for (int k = 0; k < channels; ++k) sum.channel(k)(y, x) += wgt * t.data.channel(k)(r, c);
      }
    }
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double m = mass(y, x);
      if (m <= 0.0) {
        throw std::invalid_argument("uncovered pixel (" + std::to_string(y) + ", " +
                                    std::to_string(x) + ")");
      }
      for (int k = 0; k < channels; ++k) sum.channel(k)(y, x) /= m;
    }
  }
  return sum;
}

}  // namespace cellbench::decoders
