#pragma once

#include <vector>

#include "cellbench/decoders/polygon.hpp"
#include "cellbench/grid.hpp"

namespace cellbench::decoders {

/// Star-convex cell shape: radial distances from `center` along K rays at
/// angles 2*pi*k/K.
struct StarPolygon {
  Point center;
  std::vector<double> radii;
  double score = 1.0;

  void validate() const;
};

/// Vertex k sits at center + radii[k] * (cos theta_k, sin theta_k) in (row, col).
std::vector<Point> star_vertices(const StarPolygon& poly);

/// Pixel set of one polygon; an all-zero radius vector yields the rounded
/// center pixel.
PixelMask rasterize_star(const StarPolygon& poly);

/// Paints polygons in descending score order (input order on ties) with
/// consecutive labels; a pixel keeps the first label that reaches it.
LabelMap rasterize_star_polygons(const std::vector<StarPolygon>& polys, int height, int width);

/// Greedy suppression by descending score: a candidate is dropped when its
/// rasterized IoU with any kept polygon exceeds `iou_threshold`. Survivors
/// are returned in that processing order.
std::vector<StarPolygon> polygon_nms(const std::vector<StarPolygon>& polys,
                                     double iou_threshold = 0.5);

}  // namespace cellbench::decoders
