#pragma once

#include <cstddef>
#include <vector>

#include "cellbench/decoders/polygon.hpp"
#include "cellbench/grid.hpp"

namespace cellbench::decoders {

struct Harmonic {
  double a = 0.0;  // cos term of x (column)
  double b = 0.0;  // sin term of x
  double c = 0.0;  // cos term of y (row)
  double d = 0.0;  // sin term of y
};

/// Closed contour as a truncated Fourier series:
///   x(t) = a0 + sum_k (a_k cos kt + b_k sin kt)
///   y(t) = c0 + sum_k (c_k cos kt + d_k sin kt)
/// where x is the column and y the row coordinate.
struct FourierContour {
  double a0 = 0.0;
  double c0 = 0.0;
  std::vector<Harmonic> harmonics;  // harmonics[k - 1] holds order k
  double score = 1.0;
  double uncertainty = 0.0;

  std::size_t order() const noexcept { return harmonics.size(); }
  void validate() const;
};

inline constexpr std::size_t kMinContourSamples = 8;

/// Points at t = 2*pi*m/M for m = 0..M-1.
std::vector<Point> sample_contour(const FourierContour& contour, std::size_t samples);

/// Rasterizes the sampled polyline and fills its interior. A contour whose
/// fill covers no pixel center collapses to the pixel nearest its mean point.
PixelMask rasterize_contour(const FourierContour& contour, std::size_t samples);

struct ContourDecodeOptions {
  std::size_t samples_per_contour = 64;
  double nms_iou_threshold = 0.5;
};

/// Uncertainty-aware NMS order: score descending, then uncertainty ascending,
/// then input order. Returns the indices of the surviving contours.
std::vector<std::size_t> contour_nms(const std::vector<FourierContour>& contours,
                                     std::size_t samples, double iou_threshold);

LabelMap decode_fourier_contours(const std::vector<FourierContour>& contours, int height, int width,
                                 const ContourDecodeOptions& options = {});

}  // namespace cellbench::decoders
