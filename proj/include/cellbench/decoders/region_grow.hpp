#pragma once

#include <cstddef>

#include "cellbench/grid.hpp"

namespace cellbench::decoders {

struct RegionGrowResult {
  LabelMap labels;
  /// Foreground pixels no region could reach (isolated unlabeled components).
  std::size_t unassigned_pixels = 0;
};

/// Seeded region growing: unlabeled foreground pixels are absorbed layer by
/// layer from every region frontier at once. A pixel reached by several
/// regions in the same layer takes the smallest of their labels.
RegionGrowResult region_grow_assign(const LabelMap& map, const Mask& foreground);

}  // namespace cellbench::decoders
