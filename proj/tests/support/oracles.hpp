#pragma once

// Brute-force reference implementations used by unit and acceptance tests.
// They share no code with the library beyond the Grid container.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "cellbench/decoders/polygon.hpp"
#include "cellbench/grid.hpp"

namespace oracle {

using cellbench::Label;
using cellbench::LabelMap;

inline std::vector<Label> labels_of(const LabelMap& m) {
  std::set<Label> s;
  for (const Label v : m) {
    if (v != 0) s.insert(v);
  }
  return {s.begin(), s.end()};
}

inline LabelMap drop_border_labels(const LabelMap& m) {
  std::set<Label> touching;
  for (int r = 0; r < m.height(); ++r) {
    for (int c = 0; c < m.width(); ++c) {
      if (r == 0 || c == 0 || r == m.height() - 1 || c == m.width() - 1) touching.insert(m(r, c));
    }
  }
  LabelMap out = m;
  for (auto& v : out) {
    if (touching.contains(v)) v = 0;
  }
  return out;
}

inline double pixel_iou(const LabelMap& gt, Label g, const LabelMap& pred, Label p) {
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const bool a = gt[i] == g;
    const bool b = pred[i] == p;
    inter += a && b;
    uni += a || b;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

struct BruteMatch {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::vector<std::pair<Label, Label>> pairs;  // sorted by gt label
  double f1 = 0.0;
};

/// Maximum-cardinality one-to-one matching over pairs whose IoU clears the
/// threshold, found by exhaustive search. Among maximum matchings the one with
/// the largest summed IoU is kept.
inline BruteMatch brute_force_match(const LabelMap& gt, const LabelMap& pred, double threshold, bool strict) {
  const auto gl = labels_of(gt);
  const auto pl = labels_of(pred);
  std::vector<std::vector<double>> iou(gl.size(), std::vector<double>(pl.size()));
  for (std::size_t i = 0; i < gl.size(); ++i) {
    for (std::size_t j = 0; j < pl.size(); ++j) iou[i][j] = pixel_iou(gt, gl[i], pred, pl[j]);
  }
  auto ok = [&](double v) { return strict ? v > threshold : v >= threshold; };

  std::vector<int> assign(gl.size(), -1);
  std::vector<int> best = assign;
  std::size_t best_count = 0;
  double best_sum = -1.0;
  std::vector<bool> used(pl.size(), false);
  std::function<void(std::size_t, std::size_t, double)> search = [&](std::size_t i, std::size_t count, double sum) {
    if (i == gl.size()) {
      if (count > best_count || (count == best_count && sum > best_sum)) {
        best_count = count;
        best_sum = sum;
        best = assign;
      }
      return;
    }
    search(i + 1, count, sum);
    for (std::size_t j = 0; j < pl.size(); ++j) {
      if (used[j] || !ok(iou[i][j])) continue;
      used[j] = true;
      assign[i] = static_cast<int>(j);
      search(i + 1, count + 1, sum + iou[i][j]);
      assign[i] = -1;
      used[j] = false;
    }
  };
  search(0, 0, 0.0);

  BruteMatch out;
  for (std::size_t i = 0; i < gl.size(); ++i) {
    if (best[i] >= 0) out.pairs.emplace_back(gl[i], pl[static_cast<std::size_t>(best[i])]);
  }
  out.tp = best_count;
  out.fp = pl.size() - best_count;
  out.fn = gl.size() - best_count;
  const double precision = out.tp + out.fp == 0 ? 0.0 : static_cast<double>(out.tp) / static_cast<double>(out.tp + out.fp);
  const double recall = out.tp + out.fn == 0 ? 0.0 : static_cast<double>(out.tp) / static_cast<double>(out.tp + out.fn);
  out.f1 = precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
  return out;
}

/// One-sided upper-tail Wilcoxon p-value by enumerating all 2^n sign patterns
/// of the nonzero differences (average ranks for tied magnitudes).
inline double wilcoxon_enumerated_p(const std::vector<double>& diffs) {
  std::vector<double> d;
  for (const double v : diffs) {
    if (v != 0.0) d.push_back(v);
  }
  const std::size_t n = d.size();
  std::vector<long> doubled(n);
  for (std::size_t i = 0; i < n; ++i) {
    long below = 0;
    long equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::fabs(d[j]) < std::fabs(d[i])) ++below;
      if (std::fabs(d[j]) == std::fabs(d[i])) ++equal;
    }
    doubled[i] = 2 * below + equal + 1;  // 2 * (below + (equal + 1) / 2)
  }
  long observed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] > 0) observed += doubled[i];
  }
  std::uint64_t hits = 0;
  const std::uint64_t patterns = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    long w = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1U) w += doubled[i];
    }
    hits += w >= observed;
  }
  return static_cast<double>(hits) / static_cast<double>(patterns);
}

/// Even-odd point-in-polygon test at a pixel centre.
inline bool point_in_polygon(const std::vector<cellbench::decoders::Point>& v, double y, double x) {
  bool inside = false;
  const std::size_t n = v.size();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& a = v[k];
    const auto& b = v[(k + 1) % n];
    if ((a.row > y) != (b.row > y)) {
      const double xc = (b.col - a.col) * (y - a.row) / (b.row - a.row) + a.col;
      if (xc > x) inside = !inside;
    }
  }
  return inside;
}

/// Random map with up to `max_cells` axis-aligned rectangles or discs painted
/// in sequence (later shapes overwrite earlier ones).
inline LabelMap random_label_map(std::mt19937_64& rng, int h, int w, int max_cells) {
  LabelMap m(h, w);
  std::uniform_int_distribution<int> count(0, max_cells);
  std::uniform_int_distribution<int> shape(0, 1);
  const int k = count(rng);
  for (int label = 1; label <= k; ++label) {
    std::uniform_int_distribution<int> rr(0, h - 1);
    std::uniform_int_distribution<int> cc(0, w - 1);
    std::uniform_int_distribution<int> size(1, std::max(2, std::min(h, w) / 3));
    const int r0 = rr(rng);
    const int c0 = cc(rng);
    const int s = size(rng);
    const bool disc = shape(rng) == 1;
    for (int r = std::max(0, r0 - s); r <= std::min(h - 1, r0 + s); ++r) {
      for (int c = std::max(0, c0 - s); c <= std::min(w - 1, c0 + s); ++c) {
        if (disc && (r - r0) * (r - r0) + (c - c0) * (c - c0) > s * s) continue;
        m(r, c) = static_cast<Label>(label);
      }
    }
  }
  return m;
}

/// Prediction derived from `gt`: each cell is shifted by up to `max_shift`
/// pixels, some are dropped, labels are permuted, and a spurious blob may be
/// added.
inline LabelMap perturbed_prediction(std::mt19937_64& rng, const LabelMap& gt, int max_shift) {
  LabelMap out(gt.height(), gt.width());
  const auto labels = labels_of(gt);
  std::vector<Label> perm(labels.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<Label>(i + 1);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::uniform_int_distribution<int> shift(-max_shift, max_shift);
  std::bernoulli_distribution drop(0.15);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (drop(rng)) continue;
    const int dr = shift(rng);
    const int dc = shift(rng);
    for (int r = 0; r < gt.height(); ++r) {
      for (int c = 0; c < gt.width(); ++c) {
        if (gt(r, c) != labels[i]) continue;
        const int nr = r + dr;
        const int nc = c + dc;
        if (nr >= 0 && nc >= 0 && nr < gt.height() && nc < gt.width()) out(nr, nc) = perm[i] + 10;
      }
    }
  }
  if (std::bernoulli_distribution(0.3)(rng)) {
    std::uniform_int_distribution<int> rr(0, gt.height() - 4);
    std::uniform_int_distribution<int> cc(0, gt.width() - 4);
    const int r0 = rr(rng);
    const int c0 = cc(rng);
    for (int r = r0; r < r0 + 4; ++r) {
      for (int c = c0; c < c0 + 4; ++c) out(r, c) = 99;
    }
  }
  return out;
}

/// Map of non-overlapping discs on a jittered grid, for flow round trips.
inline LabelMap disc_grid(std::mt19937_64& rng, int h, int w, int spacing) {
  LabelMap m(h, w);
  std::uniform_real_distribution<double> jitter(-1.5, 1.5);
  std::uniform_real_distribution<double> radius(spacing * 0.25, spacing * 0.42);
  std::uniform_real_distribution<double> aspect(0.75, 1.0);
  Label label = 0;
  for (int cy = spacing / 2; cy + spacing / 2 <= h; cy += spacing) {
    for (int cx = spacing / 2; cx + spacing / 2 <= w; cx += spacing) {
      ++label;
      const double y0 = cy + jitter(rng);
      const double x0 = cx + jitter(rng);
      const double ry = radius(rng);
      const double rx = ry * aspect(rng);
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          const double dy = (r - y0) / ry;
          const double dx = (c - x0) / rx;
          if (dy * dy + dx * dx <= 1.0) m(r, c) = label;
        }
      }
    }
  }
  return m;
}

}  // namespace oracle
