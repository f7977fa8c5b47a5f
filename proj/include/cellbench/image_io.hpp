#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "cellbench/grid.hpp"
#include "cellbench/label_map.hpp"

namespace cellbench {

class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads an 8/16-bit single-channel PNG or TIFF. Pixel values are taken
/// verbatim as instance ids; no connected-component splitting happens here.
LabelMap load_label_map(const std::filesystem::path& path);

/// Writes a 16-bit single-channel PNG. Labels above 65535 are rejected.
void write_label_map_png(const std::filesystem::path& path, const LabelMap& map);

ImageMeta read_image_meta(const std::filesystem::path& path);

/// Loads a 1- or 3-channel image as RGB-ordered channels scaled to [0, 1]
/// by the bit depth's maximum value.
DenseMap load_intensity_image(const std::filesystem::path& path);

}  // namespace cellbench
