#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cellbench/grid.hpp"

namespace cellbench {

/// On-disk dense map: one line of JSON header, a newline, then planar
/// little-endian float32 samples (channel-major, then row-major).
///
///   {"format":"cellbench-dense","version":1,"kind":"flow","height":H,
///    "width":W,"channels":C,"channel_names":[...],"dtype":"float32",
///    "layout":"planar"}
struct DenseFile {
  std::string kind;
  std::vector<std::string> channel_names;
  DenseMap map;
};

inline constexpr int kDenseFormatVersion = 1;

void write_dense_file(const std::filesystem::path& path, const DenseFile& file);
DenseFile read_dense_file(const std::filesystem::path& path);

}  // namespace cellbench
