#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "cellbench/decoders/fourier.hpp"
#include "cellbench/decoders/star_polygon.hpp"

namespace cellbench::decoders {

// Polygon sets:
//   {"kind":"star_polygons","version":1,"height":H,"width":W,
//    "polygons":[{"center":[row,col],"radii":[...],"score":s}, ...]}
// Contour sets:
//   {"kind":"fourier_contours","version":1,"height":H,"width":W,
//    "contours":[{"a0":x,"c0":y,"harmonics":[[a,b,c,d], ...],
//                 "score":s,"uncertainty":u}, ...]}
// height/width are optional canvas dimensions.

template <typename Shape>
struct ShapeSet {
  std::vector<Shape> shapes;
  std::optional<int> height;
  std::optional<int> width;
};

nlohmann::json to_json(const ShapeSet<StarPolygon>& set);
nlohmann::json to_json(const ShapeSet<FourierContour>& set);

ShapeSet<StarPolygon> star_polygons_from_json(const nlohmann::json& doc);
ShapeSet<FourierContour> fourier_contours_from_json(const nlohmann::json& doc);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace cellbench::decoders
