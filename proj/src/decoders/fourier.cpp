#include "cellbench/decoders/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace cellbench::decoders {

void FourierContour::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  bool ok = finite(a0) && finite(c0) && finite(score) && finite(uncertainty);
  for (const Harmonic& h : harmonics) ok = ok && finite(h.a) && finite(h.b) && finite(h.c) && finite(h.d);
  if (!ok) throw std::invalid_argument("fourier contour has non-finite coefficients");
  if (uncertainty < 0.0) throw std::invalid_argument("contour uncertainty must be non-negative");
}

std::vector<Point> sample_contour(const FourierContour& contour, std::size_t samples) {
  contour.validate();
  if (samples < kMinContourSamples) {
    throw std::invalid_argument("need at least " + std::to_string(kMinContourSamples) +
                                " samples per contour");
  }
  std::vector<Point> pts(samples);
  for (std::size_t m = 0; m < samples; ++m) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(samples);
    double x = contour.a0;
    double y = contour.c0;
    for (std::size_t k = 1; k <= contour.harmonics.size(); ++k) {
      const Harmonic& h = contour.harmonics[k - 1];
      const double kt = static_cast<double>(k) * t;
      const double ck = std::cos(kt);
      const double sk = std::sin(kt);
      x += h.a * ck + h.b * sk;
      y += h.c * ck + h.d * sk;
    }
    pts[m] = {y, x};
  }
  return pts;
}

PixelMask rasterize_contour(const FourierContour& contour, std::size_t samples) {
  const auto pts = sample_contour(contour, samples);
  PixelMask mask = rasterize_polygon(pts);
  if (mask.empty()) {
    double row = 0.0;
    double col = 0.0;
    for (const Point& p : pts) {
      row += p.row;
      col += p.col;
    }
    const auto n = static_cast<double>(pts.size());
    return PixelMask::single(static_cast<int>(std::lround(row / n)),
                             static_cast<int>(std::lround(col / n)));
  }
  // even-odd leaves self-overlapping lobes empty
  mask.fill_holes();
  return mask;
}

std::vector<std::size_t> contour_nms(const std::vector<FourierContour>& contours,
                                     std::size_t samples, double iou_threshold) {
  std::vector<std::size_t> order(contours.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (contours[a].score != contours[b].score) return contours[a].score > contours[b].score;
    return contours[a].uncertainty < contours[b].uncertainty;
  });
  std::vector<std::size_t> kept;
  std::vector<PixelMask> kept_masks;
  for (const std::size_t i : order) {
    PixelMask mask = rasterize_contour(contours[i], samples);
    const bool suppressed = std::any_of(kept_masks.begin(), kept_masks.end(), [&](const auto& m) {
      return mask_iou(mask, m) > iou_threshold;
    });
    if (suppressed) continue;
    kept.push_back(i);
    kept_masks.push_back(std::move(mask));
  }
  return kept;
}

LabelMap decode_fourier_contours(const std::vector<FourierContour>& contours, int height, int width,
                                 const ContourDecodeOptions& options) {
  LabelMap canvas(height, width);
  Label next = 1;
  for (const std::size_t i :
       contour_nms(contours, options.samples_per_contour, options.nms_iou_threshold)) {
    if (paint(rasterize_contour(contours[i], options.samples_per_contour), next, canvas) > 0) {
      ++next;
    }
  }
  return canvas;
}

}  // namespace cellbench::decoders
