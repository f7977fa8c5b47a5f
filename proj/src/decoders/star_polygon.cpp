#include "cellbench/decoders/star_polygon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace cellbench::decoders {

namespace {

std::vector<std::size_t> score_order(const std::vector<StarPolygon>& polys) {
  std::vector<std::size_t> order(polys.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return polys[a].score > polys[b].score;
  });
  return order;
}

}  // namespace

void StarPolygon::validate() const {
  if (radii.size() < 3) throw std::invalid_argument("star polygon needs at least 3 rays");
  for (const double r : radii) {
    if (!std::isfinite(r) || r < 0.0) {
      throw std::invalid_argument("star polygon radii must be finite and non-negative");
    }
  }
  if (!std::isfinite(center.row) || !std::isfinite(center.col)) {
    throw std::invalid_argument("star polygon center must be finite");
  }
}

std::vector<Point> star_vertices(const StarPolygon& poly) {
  poly.validate();
  const std::size_t k = poly.radii.size();
  std::vector<Point> v(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(k);
    v[i] = {poly.center.row + poly.radii[i] * std::cos(theta),
            poly.center.col + poly.radii[i] * std::sin(theta)};
  }
  return v;
}

PixelMask rasterize_star(const StarPolygon& poly) {
  poly.validate();
  const bool degenerate =
      std::all_of(poly.radii.begin(), poly.radii.end(), [](double r) { return r == 0.0; });
  if (degenerate) {
    return PixelMask::single(static_cast<int>(std::lround(poly.center.row)),
                             static_cast<int>(std::lround(poly.center.col)));
  }
  const auto vertices = star_vertices(poly);
  return rasterize_polygon(vertices);
}

LabelMap rasterize_star_polygons(const std::vector<StarPolygon>& polys, int height, int width) {
  LabelMap canvas(height, width);
  Label next = 1;
  for (const std::size_t i : score_order(polys)) {
    if (paint(rasterize_star(polys[i]), next, canvas) > 0) ++next;
  }
  return canvas;
}

std::vector<StarPolygon> polygon_nms(const std::vector<StarPolygon>& polys, double iou_threshold) {
  for (const auto& p : polys) {
    if (!(p.score >= 0.0 && p.score <= 1.0)) {
      throw std::invalid_argument("polygon scores must lie in [0, 1]");
    }
  }
  std::vector<StarPolygon> kept;
  std::vector<PixelMask> kept_masks;
  for (const std::size_t i : score_order(polys)) {
    PixelMask mask = rasterize_star(polys[i]);
    const bool suppressed = std::any_of(kept_masks.begin(), kept_masks.end(), [&](const auto& m) {
      return mask_iou(mask, m) > iou_threshold;
    });
    if (suppressed) continue;
    kept.push_back(polys[i]);
    kept_masks.push_back(std::move(mask));
  }
  return kept;
}

}  // namespace cellbench::decoders
