#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cellbench/grid.hpp"

namespace cellbench::decoders {

/// Sub-pixel position; pixel (r, c) has its center at row r, col c.
struct Point {
  double row = 0.0;
  double col = 0.0;
};

/// Pixel set on the unbounded integer lattice, stored as a bitmap over its
/// bounding box. Coordinates may be negative.
class PixelMask {
 public:
  PixelMask() = default;
  PixelMask(int row0, int col0, int height, int width);
  static PixelMask single(int row, int col);

  bool empty() const noexcept { return area_ == 0; }
  std::size_t area() const noexcept { return area_; }
  int row0() const noexcept { return row0_; }
  int col0() const noexcept { return col0_; }
  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }

  bool test(int row, int col) const noexcept;
  void set(int row, int col);

  /// Adds every pixel enclosed by the mask (4-connected background regions
  /// that cannot reach the bounding-box frame).
  void fill_holes();

 private:
  int row0_ = 0;
  int col0_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> bits_;
  std::size_t area_ = 0;
};

/// Scanline fill of a closed polygon: a pixel belongs to the polygon when its
/// center lies inside under the even-odd rule, with edges treated half-open
/// in the row direction (a rightward ray from the center crosses edge
/// (a, b) iff (a.row > y) != (b.row > y) and the crossing lies right of it).
PixelMask rasterize_polygon(std::span<const Point> vertices);

double mask_iou(const PixelMask& a, const PixelMask& b);

/// Writes the mask's pixels into `canvas` with `label`, skipping pixels that
/// are outside the canvas or already labelled. Returns the pixels written.
std::size_t paint(const PixelMask& mask, Label label, LabelMap& canvas);

}  // namespace cellbench::decoders
