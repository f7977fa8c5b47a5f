#include "cellbench/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "cellbench/atomic_file.hpp"

namespace cellbench {

namespace {

cv::Mat read_unchanged(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw ImageIoError("unreadable file: " + path.string());
  }
  cv::Mat img;
  try {
    img = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception& e) {
    throw ImageIoError("unreadable file: " + path.string() + " (" + e.what() + ")");
  }
  if (img.empty()) throw ImageIoError("unreadable file: " + path.string());
  return img;
}

}  // namespace

LabelMap load_label_map(const std::filesystem::path& path) {
  const cv::Mat img = read_unchanged(path);
  if (img.channels() != 1) {
    throw ImageIoError("multi-channel label image: " + path.string());
  }
  LabelMap map(img.rows, img.cols);
  switch (img.depth()) {
    case CV_8U:
      for (int r = 0; r < img.rows; ++r) {
        const auto* row = img.ptr<std::uint8_t>(r);
        for (int c = 0; c < img.cols; ++c) map(r, c) = row[c];
      }
      break;
    case CV_16U:
      for (int r = 0; r < img.rows; ++r) {
        const auto* row = img.ptr<std::uint16_t>(r);
        for (int c = 0; c < img.cols; ++c) map(r, c) = row[c];
      }
      break;
    case CV_8S:
    case CV_16S:
      throw ImageIoError("signed label image: " + path.string());
    default:
      throw ImageIoError("bit depth > 16: " + path.string());
  }
  return map;
}

void write_label_map_png(const std::filesystem::path& path, const LabelMap& map) {
  cv::Mat img(map.height(), map.width(), CV_16UC1);
  for (int r = 0; r < map.height(); ++r) {
    auto* row = img.ptr<std::uint16_t>(r);
    for (int c = 0; c < map.width(); ++c) {
      const Label v = map(r, c);
      if (v > 0xFFFF) throw ImageIoError("label exceeds 16-bit range: " + std::to_string(v));
      row[c] = static_cast<std::uint16_t>(v);
    }
  }
  std::vector<std::uint8_t> bytes;
  if (!cv::imencode(".png", img, bytes)) {
    throw ImageIoError("PNG encoding failed for " + path.string());
  }
  write_file_atomic(path, std::string(bytes.begin(), bytes.end()));
}

ImageMeta read_image_meta(const std::filesystem::path& path) {
  const cv::Mat img = read_unchanged(path);
  return ImageMeta{path.string(), img.channels(),
                   static_cast<std::size_t>(img.rows) * static_cast<std::size_t>(img.cols)};
}

DenseMap load_intensity_image(const std::filesystem::path& path) {
  cv::Mat img = read_unchanged(path);
  double scale = 1.0;
  switch (img.depth()) {
    case CV_8U: scale = 255.0; break;
    case CV_16U: scale = 65535.0; break;
    case CV_32F:
    case CV_64F: scale = 1.0; break;
    default: throw ImageIoError("unsupported intensity bit depth: " + path.string());
  }
  if (img.channels() == 4) {  // drop alpha
    std::vector<cv::Mat> planes;
    cv::split(img, planes);
    planes.pop_back();
    cv::merge(planes, img);
  }
  const int channels = img.channels();
  if (channels != 1 && channels != 3) {
    throw ImageIoError("intensity image must have 1 or 3 channels: " + path.string());
  }
  cv::Mat as_double;
  img.convertTo(as_double, CV_MAKETYPE(CV_64F, channels), 1.0 / scale);
  DenseMap out(img.rows, img.cols, channels);
  for (int r = 0; r < img.rows; ++r) {
    const auto* row = as_double.ptr<double>(r);
    for (int c = 0; c < img.cols; ++c) {
      for (int k = 0; k < channels; ++k) {
        // OpenCV stores BGR; expose RGB.
        const int dst = channels == 3 ? 2 - k : k;
        out.channel(dst)(r, c) = row[c * channels + k];
      }
    }
  }
  return out;
}

}  // namespace cellbench
