#include "cellbench/decoders/shape_io.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

namespace cellbench::decoders {

namespace {

constexpr int kShapeFormatVersion = 1;

template <typename Shape>
void put_dims(nlohmann::json& doc, const ShapeSet<Shape>& set) {
  if (set.height) doc["height"] = *set.height;
  if (set.width) doc["width"] = *set.width;
}

template <typename Shape>
void get_dims(const nlohmann::json& doc, ShapeSet<Shape>& set) {
  if (doc.contains("height")) set.height = doc.at("height").get<int>();
  if (doc.contains("width")) set.width = doc.at("width").get<int>();
}

void expect_kind(const nlohmann::json& doc, const std::string& kind) {
  if (!doc.is_object() || doc.value("kind", "") != kind) {
    throw std::invalid_argument("expected a '" + kind + "' document");
  }
}

}  // namespace

nlohmann::json to_json(const ShapeSet<StarPolygon>& set) {
  nlohmann::json doc = {{"kind", "star_polygons"}, {"version", kShapeFormatVersion}};
  put_dims(doc, set);
  auto& arr = doc["polygons"] = nlohmann::json::array();
  for (const StarPolygon& p : set.shapes) {
    arr.push_back({{"center", {p.center.row, p.center.col}}, {"radii", p.radii}, {"score", p.score}});
  }
  return doc;
}

nlohmann::json to_json(const ShapeSet<FourierContour>& set) {
  nlohmann::json doc = {{"kind", "fourier_contours"}, {"version", kShapeFormatVersion}};
  put_dims(doc, set);
  auto& arr = doc["contours"] = nlohmann::json::array();
  for (const FourierContour& c : set.shapes) {
    nlohmann::json harmonics = nlohmann::json::array();
    for (const Harmonic& h : c.harmonics) harmonics.push_back({h.a, h.b, h.c, h.d});
    arr.push_back({{"a0", c.a0},
                   {"c0", c.c0},
                   {"harmonics", harmonics},
                   {"score", c.score},
                   {"uncertainty", c.uncertainty}});
  }
  return doc;
}

ShapeSet<StarPolygon> star_polygons_from_json(const nlohmann::json& doc) {
  expect_kind(doc, "star_polygons");
  ShapeSet<StarPolygon> set;
  get_dims(doc, set);
  for (const auto& item : doc.at("polygons")) {
    StarPolygon p;
    const auto& center = item.at("center");
    p.center = {center.at(0).get<double>(), center.at(1).get<double>()};
    p.radii = item.at("radii").get<std::vector<double>>();
    p.score = item.value("score", 1.0);
    p.validate();
    set.shapes.push_back(std::move(p));
  }
  return set;
}

ShapeSet<FourierContour> fourier_contours_from_json(const nlohmann::json& doc) {
  expect_kind(doc, "fourier_contours");
  ShapeSet<FourierContour> set;
  get_dims(doc, set);
  for (const auto& item : doc.at("contours")) {
    FourierContour c;
    c.a0 = item.at("a0").get<double>();
    c.c0 = item.at("c0").get<double>();
    for (const auto& h : item.value("harmonics", nlohmann::json::array())) {
      if (!h.is_array() || h.size() != 4) {
        throw std::invalid_argument("each harmonic must be [a, b, c, d]");
      }
      c.harmonics.push_back({h[0].get<double>(), h[1].get<double>(), h[2].get<double>(),
                             h[3].get<double>()});
    }
    c.score = item.value("score", 1.0);
    c.uncertainty = item.value("uncertainty", 0.0);
    c.validate();
    set.shapes.push_back(std::move(c));
  }
  return set;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("invalid JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace cellbench::decoders
