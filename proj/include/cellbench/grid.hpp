#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cellbench {

/// Dense row-major 2D grid. Every per-pixel map in the library (instance
/// labels, masks, elevations, probabilities) is one of these.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid(int height, int width, T fill = T{}) : height_(height), width_(width) {
    check_dims(height, width);
    data_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill);
  }

  Grid(int height, int width, std::vector<T> data)
      : height_(height), width_(width), data_(std::move(data)) {
    check_dims(height, width);
    if (data_.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
      throw std::invalid_argument("grid data size does not match " + std::to_string(height) +
                                  "x" + std::to_string(width));
    }
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(int row, int col) { return data_[index(row, col)]; }
  const T& operator()(int row, int col) const { return data_[index(row, col)]; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  bool contains(int row, int col) const noexcept {
    return row >= 0 && row < height_ && col >= 0 && col < width_;
  }

  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  template <typename U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return height_ == other.height() && width_ == other.width();
  }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  static void check_dims(int height, int width) {
    if (height < 1 || width < 1) {
      throw std::invalid_argument("grid dimensions must be at least 1x1, got " +
                                  std::to_string(height) + "x" + std::to_string(width));
    }
  }

  int height_;
  int width_;
  std::vector<T> data_;
};

using Label = std::uint32_t;

/// Instance label map: 0 is background, k > 0 is instance k.
using LabelMap = Grid<Label>;
using Mask = Grid<std::uint8_t>;
using RealMap = Grid<double>;

/// Stack of equally sized real-valued channels (network outputs, RGB images,
/// stitched tiles).
class DenseMap {
 public:
  DenseMap(int height, int width, int channels) {
    if (channels < 1) throw std::invalid_argument("dense map needs at least one channel");
    channels_.assign(static_cast<std::size_t>(channels), RealMap(height, width));
  }

  explicit DenseMap(std::vector<RealMap> channels) : channels_(std::move(channels)) {
    if (channels_.empty()) throw std::invalid_argument("dense map needs at least one channel");
    for (const auto& c : channels_) {
      if (!c.same_shape(channels_.front())) {
        throw std::invalid_argument("dense map channels differ in shape");
      }
    }
  }

  int height() const noexcept { return channels_.front().height(); }
  int width() const noexcept { return channels_.front().width(); }
  int channel_count() const noexcept { return static_cast<int>(channels_.size()); }

  RealMap& channel(int c) { return channels_.at(static_cast<std::size_t>(c)); }
  const RealMap& channel(int c) const { return channels_.at(static_cast<std::size_t>(c)); }

  friend bool operator==(const DenseMap&, const DenseMap&) = default;

 private:
  std::vector<RealMap> channels_;
};

}  // namespace cellbench
