#include "cellbench/decoders/region_grow.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cellbench::decoders {

RegionGrowResult region_grow_assign(const LabelMap& map, const Mask& foreground) {
  if (!map.same_shape(foreground)) throw std::invalid_argument("region grow inputs differ in shape");
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map[i] != 0 && foreground[i] == 0) {
      throw std::invalid_argument("labelled pixel outside foreground");
    }
  }
  RegionGrowResult result{map, 0};
  LabelMap& out = result.labels;
  const int h = map.height();
  const int w = map.width();
  auto best_neighbor = [&](int r, int c) {
    Label best = 0;
    const int nbr[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
    for (const auto& [nr, nc] : nbr) {
      if (!out.contains(nr, nc)) continue;
      const Label v = out(nr, nc);
      if (v != 0 && (best == 0 || v < best)) best = v;
    }
    return best;
  };

  std::vector<std::uint8_t> queued(out.size(), 0);
  std::vector<std::size_t> frontier;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (foreground(r, c) != 0 && out(r, c) == 0 && best_neighbor(r, c) != 0) {
        frontier.push_back(out.index(r, c));
        queued[out.index(r, c)] = 1;
      }
    }
  }
  std::vector<Label> assigned;
  std::vector<std::size_t> next;
  while (!frontier.empty()) {
    // Labels for the whole layer are decided before any is written.
    assigned.clear();
    for (const std::size_t i : frontier) {
      assigned.push_back(best_neighbor(static_cast<int>(i / static_cast<std::size_t>(w)),
                                       static_cast<int>(i % static_cast<std::size_t>(w))));
    }
    for (std::size_t k = 0; k < frontier.size(); ++k) out[frontier[k]] = assigned[k];
    next.clear();
    for (const std::size_t i : frontier) {
      const int r = static_cast<int>(i / static_cast<std::size_t>(w));
      const int c = static_cast<int>(i % static_cast<std::size_t>(w));
      const int nbr[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
      for (const auto& [nr, nc] : nbr) {
        if (!out.contains(nr, nc)) continue;
        const std::size_t j = out.index(nr, nc);
        if (foreground[j] == 0 || out[j] != 0 || queued[j] != 0) continue;
        queued[j] = 1;
        next.push_back(j);
      }
    }
    std::swap(frontier, next);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (foreground[i] != 0 && out[i] == 0) ++result.unassigned_pixels;
  }
  return result;
}

}  // namespace cellbench::decoders
