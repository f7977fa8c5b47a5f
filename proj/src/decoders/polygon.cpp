#include "cellbench/decoders/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cellbench::decoders {

PixelMask::PixelMask(int row0, int col0, int height, int width)
    : row0_(row0), col0_(col0), height_(height), width_(width) {
  if (height < 0 || width < 0) throw std::invalid_argument("negative mask extent");
  bits_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), 0);
}

PixelMask PixelMask::single(int row, int col) {
  PixelMask m(row, col, 1, 1);
  m.set(row, col);
  return m;
}

bool PixelMask::test(int row, int col) const noexcept {
  const int r = row - row0_;
  const int c = col - col0_;
  if (r < 0 || c < 0 || r >= height_ || c >= width_) return false;
  return bits_[static_cast<std::size_t>(r) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(c)] != 0;
}

void PixelMask::set(int row, int col) {
  const int r = row - row0_;
  const int c = col - col0_;
  if (r < 0 || c < 0 || r >= height_ || c >= width_) {
    throw std::out_of_range("pixel outside mask bounding box");
  }
  auto& bit = bits_[static_cast<std::size_t>(r) * static_cast<std::size_t>(width_) +
                    static_cast<std::size_t>(c)];
  if (bit == 0) {
    bit = 1;
    ++area_;
  }
}

void PixelMask::fill_holes() {
  if (height_ == 0 || width_ == 0) return;
  const auto w = static_cast<std::size_t>(width_);
  std::vector<std::uint8_t> outside(bits_.size(), 0);
  std::vector<std::size_t> stack;
  auto seed = [&](int r, int c) {
    const std::size_t i = static_cast<std::size_t>(r) * w + static_cast<std::size_t>(c);
    if (bits_[i] == 0 && outside[i] == 0) {
      outside[i] = 1;
      stack.push_back(i);
    }
  };
  for (int c = 0; c < width_; ++c) {
    seed(0, c);
    seed(height_ - 1, c);
  }
  for (int r = 0; r < height_; ++r) {
    seed(r, 0);
    seed(r, width_ - 1);
  }
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const int r = static_cast<int>(i / w);
    const int c = static_cast<int>(i % w);
    if (r > 0) seed(r - 1, c);
    if (r + 1 < height_) seed(r + 1, c);
    if (c > 0) seed(r, c - 1);
    if (c + 1 < width_) seed(r, c + 1);
  }
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] == 0 && outside[i] == 0) {
      bits_[i] = 1;
      ++area_;
    }
  }
}

PixelMask rasterize_polygon(std::span<const Point> vertices) {
  if (vertices.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  double min_r = std::numeric_limits<double>::infinity();
  double max_r = -min_r;
  double min_c = min_r;
  double max_c = -min_r;
  for (const Point& p : vertices) {
    if (!std::isfinite(p.row) || !std::isfinite(p.col)) {
      throw std::invalid_argument("polygon vertex is not finite");
    }
    min_r = std::min(min_r, p.row);
    max_r = std::max(max_r, p.row);
    min_c = std::min(min_c, p.col);
    max_c = std::max(max_c, p.col);
  }
  const int r0 = static_cast<int>(std::ceil(min_r));
  const int r1 = static_cast<int>(std::floor(max_r));
  const int c0 = static_cast<int>(std::ceil(min_c));
  const int c1 = static_cast<int>(std::floor(max_c));
  if (r1 < r0 || c1 < c0) return PixelMask{};
  PixelMask mask(r0, c0, r1 - r0 + 1, c1 - c0 + 1);
  std::vector<double> crossings;
  const std::size_t n = vertices.size();
  for (int row = r0; row <= r1; ++row) {
    const auto y = static_cast<double>(row);
    crossings.clear();
    for (std::size_t k = 0; k < n; ++k) {
      const Point& a = vertices[k];
      const Point& b = vertices[(k + 1) % n];
      if ((a.row > y) != (b.row > y)) {
        crossings.push_back((b.col - a.col) * (y - a.row) / (b.row - a.row) + a.col);
      }
    }
    std::sort(crossings.begin(), crossings.end());
    // pixel col is inside iff an odd number of crossings lie strictly right of it
    std::size_t left = 0;  // crossings <= col
    for (int col = c0; col <= c1; ++col) {
      const auto x = static_cast<double>(col);
      while (left < crossings.size() && crossings[left] <= x) ++left;
      if ((crossings.size() - left) % 2 == 1) mask.set(row, col);
    }
  }
  if (mask.empty()) return PixelMask{};
  return mask;
}

double mask_iou(const PixelMask& a, const PixelMask& b) {
  if (a.empty() && b.empty()) return 0.0;
  const int r0 = std::max(a.row0(), b.row0());
  const int r1 = std::min(a.row0() + a.height(), b.row0() + b.height());
  const int c0 = std::max(a.col0(), b.col0());
  const int c1 = std::min(a.col0() + a.width(), b.col0() + b.width());
  std::size_t inter = 0;
  for (int r = r0; r < r1; ++r) {
    for (int c = c0; c < c1; ++c) {
      if (a.test(r, c) && b.test(r, c)) ++inter;
    }
  }
  const std::size_t uni = a.area() + b.area() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::size_t paint(const PixelMask& mask, Label label, LabelMap& canvas) {
  std::size_t written = 0;
  const int r0 = std::max(mask.row0(), 0);
  const int r1 = std::min(mask.row0() + mask.height(), canvas.height());
  const int c0 = std::max(mask.col0(), 0);
  const int c1 = std::min(mask.col0() + mask.width(), canvas.width());
  for (int r = r0; r < r1; ++r) {
    for (int c = c0; c < c1; ++c) {
      if (mask.test(r, c) && canvas(r, c) == 0) {
        canvas(r, c) = label;
        ++written;
      }
    }
  }
  return written;
}

}  // namespace cellbench::decoders
