#include "cellbench/decoders/watershed.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "cellbench/label_map.hpp"

namespace cellbench::decoders {

namespace {

struct QueueEntry {
  double elevation;
  std::uint64_t order;  // insertion counter, keeps equal elevations FIFO
  std::size_t index;

  bool operator>(const QueueEntry& o) const {
    return elevation != o.elevation ? elevation > o.elevation : order > o.order;
  }
};

// Squared 1D distance transform of a sampled function: lower envelope of the
// parabolas rooted at the finite samples.
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<std::size_t>& v,
            std::vector<double>& z) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const std::size_t n = f.size();
  auto intersect = [&](std::size_t q, std::size_t p) {
    const auto qd = static_cast<double>(q);
    const auto pd = static_cast<double>(p);
    return ((f[q] + qd * qd) - (f[p] + pd * pd)) / (2.0 * (qd - pd));
  };
  std::size_t k = 0;
  bool started = false;
  for (std::size_t q = 0; q < n; ++q) {
    if (f[q] == inf) continue;
    if (!started) {
      started = true;
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      continue;
    }
    double s = intersect(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  if (!started) {
    std::fill(d.begin(), d.end(), inf);
    return;
  }
  std::size_t j = 0;
  for (std::size_t q = 0; q < n; ++q) {
    while (z[j + 1] < static_cast<double>(q)) ++j;
    const double dq = static_cast<double>(q) - static_cast<double>(v[j]);
    d[q] = dq * dq + f[v[j]];
  }
}

}  // namespace

LabelMap marker_watershed(const RealMap& elevation, const LabelMap& markers, const Mask& foreground) {
  if (!elevation.same_shape(markers) || !elevation.same_shape(foreground)) {
    throw std::invalid_argument("watershed inputs differ in shape");
  }
  LabelMap out(markers.height(), markers.width());
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> queue;
  std::uint64_t order = 0;
  for (std::size_t i = 0; i < markers.size(); ++i) {
    if (markers[i] == 0) continue;
    if (foreground[i] == 0) throw std::invalid_argument("marker outside foreground");
    out[i] = markers[i];
    queue.push({elevation[i], order++, i});
  }
  const auto w = static_cast<std::size_t>(markers.width());
  while (!queue.empty()) {
    const QueueEntry top = queue.top();
    queue.pop();
    const int r = static_cast<int>(top.index / w);
    const int c = static_cast<int>(top.index % w);
    const int nbr[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
    for (const auto& [nr, nc] : nbr) {
      if (!out.contains(nr, nc)) continue;
      const std::size_t j = out.index(nr, nc);
      if (foreground[j] == 0 || out[j] != 0) continue;
      out[j] = out[top.index];
      queue.push({elevation[j], order++, j});
    }
  }
  return out;
}

RealMap distance_transform(const Mask& foreground) {
  const int h = foreground.height();
  const int w = foreground.width();
  constexpr double inf = std::numeric_limits<double>::infinity();
  RealMap sq(h, w);
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = foreground[i] != 0 ? inf : 0.0;

  const int n = std::max(h, w);
  std::vector<double> f;
  std::vector<double> d;
  std::vector<std::size_t> v(static_cast<std::size_t>(n));
  std::vector<double> z(static_cast<std::size_t>(n) + 1);
  f.resize(static_cast<std::size_t>(h));
  d.resize(static_cast<std::size_t>(h));
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) f[static_cast<std::size_t>(r)] = sq(r, c);
    edt_1d(f, d, v, z);
    for (int r = 0; r < h; ++r) sq(r, c) = d[static_cast<std::size_t>(r)];
  }
  f.resize(static_cast<std::size_t>(w));
  d.resize(static_cast<std::size_t>(w));
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) f[static_cast<std::size_t>(c)] = sq(r, c);
    edt_1d(f, d, v, z);
    for (int c = 0; c < w; ++c) sq(r, c) = d[static_cast<std::size_t>(c)];
  }
  for (double& x : sq) x = std::sqrt(x);
  return sq;
}

LabelMap peak_markers(const RealMap& score, const Mask& foreground, int min_distance) {
  if (!score.same_shape(foreground)) throw std::invalid_argument("peak inputs differ in shape");
  if (min_distance < 1) throw std::invalid_argument("min_distance must be at least 1");
  Mask peaks(score.height(), score.width());
  for (int r = 0; r < score.height(); ++r) {
    for (int c = 0; c < score.width(); ++c) {
      if (foreground(r, c) == 0 || !(score(r, c) > 0.0)) continue;
      bool is_peak = true;
      for (int dr = -min_distance; dr <= min_distance && is_peak; ++dr) {
        for (int dc = -min_distance; dc <= min_distance; ++dc) {
          if (score.contains(r + dr, c + dc) && score(r + dr, c + dc) > score(r, c)) {
            is_peak = false;
            break;
          }
        }
      }
      peaks(r, c) = is_peak ? 1 : 0;
    }
  }
  return label_components(peaks);
}

}  // namespace cellbench::decoders
