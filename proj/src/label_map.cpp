#include "cellbench/label_map.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <unordered_map>
#include <stdexcept>

namespace cellbench {

namespace {

constexpr std::array<std::array<int, 2>, 4> kNeighbors4{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

// Flood-fills the 4-connected region of pixels for which `same(from, to)` holds.
template <typename Grid_, typename Same>
LabelMap label_regions(const Grid_& input, Same same) {
  LabelMap out(input.height(), input.width());
  std::vector<std::size_t> stack;
  Label next = 0;
  for (int r = 0; r < input.height(); ++r) {
    for (int c = 0; c < input.width(); ++c) {
      if (input(r, c) == 0 || out(r, c) != 0) continue;
      const Label id = ++next;
      out(r, c) = id;
      stack.push_back(input.index(r, c));
      while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        const int pr = static_cast<int>(i / static_cast<std::size_t>(input.width()));
        const int pc = static_cast<int>(i % static_cast<std::size_t>(input.width()));
        for (const auto& [dr, dc] : kNeighbors4) {
          const int nr = pr + dr;
          const int nc = pc + dc;
          if (!input.contains(nr, nc) || out(nr, nc) != 0) continue;
          if (input(nr, nc) == 0 || !same(input(pr, pc), input(nr, nc))) continue;
          out(nr, nc) = id;
          stack.push_back(input.index(nr, nc));
        }
      }
    }
  }
  return out;
}

LabelMap clear_labels(const LabelMap& map, const std::set<Label>& doomed) {
  LabelMap out = map;
  if (doomed.empty()) return out;
  for (auto& v : out) {
    if (v != 0 && doomed.contains(v)) v = 0;
  }
  return out;
}

}  // namespace

std::vector<Label> instance_ids(const LabelMap& map) {
  std::vector<Label> ids;
  for (const auto& [id, area] : instance_areas(map)) ids.push_back(id);
  return ids;
}

std::size_t instance_count(const LabelMap& map) { return instance_areas(map).size(); }

std::map<Label, std::size_t> instance_areas(const LabelMap& map) {
  std::map<Label, std::size_t> areas;
  for (const Label v : map) {
    if (v != 0) ++areas[v];
  }
  return areas;
}

LabelMap relabel_connected(const LabelMap& map) {
  return label_regions(map, [](Label a, Label b) { return a == b; });
}

LabelMap renumber_consecutive(const LabelMap& map) {
  std::unordered_map<Label, Label> rename;
  LabelMap out(map.height(), map.width());
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map[i] == 0) continue;
    const auto [it, inserted] = rename.emplace(map[i], static_cast<Label>(rename.size() + 1));
    out[i] = it->second;
  }
  return out;
}

LabelMap label_components(const Mask& mask) {
  return label_regions(mask, [](std::uint8_t, std::uint8_t) { return true; });
}

LabelMap remove_boundary_cells(const LabelMap& map) {
  std::set<Label> touching;
  const int h = map.height();
  const int w = map.width();
  for (int c = 0; c < w; ++c) {
    touching.insert(map(0, c));
    touching.insert(map(h - 1, c));
  }
  for (int r = 0; r < h; ++r) {
    touching.insert(map(r, 0));
    touching.insert(map(r, w - 1));
  }
  touching.erase(0);
  return clear_labels(map, touching);
}

LabelMap filter_small_cells(const LabelMap& map, std::size_t min_pixels) {
  if (min_pixels < 1) throw std::invalid_argument("min_pixels must be at least 1");
  std::set<Label> small;
  for (const auto& [id, area] : instance_areas(map)) {
    if (area < min_pixels) small.insert(id);
  }
  return clear_labels(map, small);
}

QcReport qc_image(const LabelMap& map) {
  const std::size_t before = instance_count(map);
  const LabelMap filtered = filter_small_cells(map, kMinCellPixels);
  QcReport report;
  report.cell_count = instance_count(filtered);
  report.removed_small_cells = before - report.cell_count;
  report.passed = report.cell_count >= kMinCellsPerImage;
  if (!report.passed) {
    report.reasons.push_back("fewer than " + std::to_string(kMinCellsPerImage) + " cells");
  }
  return report;
}

Mask foreground_mask(const LabelMap& map) {
  Mask mask(map.height(), map.width());
  for (std::size_t i = 0; i < map.size(); ++i) mask[i] = map[i] != 0 ? 1 : 0;
  return mask;
}

}  // namespace cellbench
