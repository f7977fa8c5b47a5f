#include "cellbench/decoders/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

namespace cellbench::decoders {

namespace {

struct CellPixels {
  std::vector<int> rows;
  std::vector<int> cols;
};

double median_of(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Heat diffusion from the median pixel of one cell; writes unit flows into `field`.
void encode_cell(const CellPixels& px, FlowField& field) {
  const auto [rmin, rmax] = std::minmax_element(px.rows.begin(), px.rows.end());
  const auto [cmin, cmax] = std::minmax_element(px.cols.begin(), px.cols.end());
  const int row0 = *rmin - 1;
  const int col0 = *cmin - 1;
  const int lh = *rmax - *rmin + 3;
  const int lw = *cmax - *cmin + 3;
  const double mr = median_of(px.rows);
  const double mc = median_of(px.cols);
  std::size_t center = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < px.rows.size(); ++i) {
    const double d = (px.rows[i] - mr) * (px.rows[i] - mr) + (px.cols[i] - mc) * (px.cols[i] - mc);
    if (d < best) {
      best = d;
      center = i;
    }
  }
  const int cr = px.rows[center] - row0;
  const int cc = px.cols[center] - col0;
  const int n_iter = 2 * ((*rmax - *rmin) + (*cmax - *cmin));

  // Only cell pixels are updated, so heat outside the cell stays 0.
  RealMap heat(lh, lw);
  RealMap next(lh, lw);
  for (int t = 0; t < n_iter; ++t) {
    heat(cr, cc) += 1.0;
    for (std::size_t i = 0; i < px.rows.size(); ++i) {
      const int r = px.rows[i] - row0;
      const int c = px.cols[i] - col0;
      double s = 0.0;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) s += heat(r + dr, c + dc);
      }
      next(r, c) = s / 9.0;
    }
    std::swap(heat, next);
  }
  for (double& v : heat) v = std::log1p(v);
  for (std::size_t i = 0; i < px.rows.size(); ++i) {
    const int r = px.rows[i] - row0;
    const int c = px.cols[i] - col0;
    const double dy = heat(r + 1, c) - heat(r - 1, c);
    const double dx = heat(r, c + 1) - heat(r, c - 1);
    const double norm = std::hypot(dy, dx);
    const double scale = norm > 0.0 ? 1.0 / norm : 0.0;
    field.flow_y(px.rows[i], px.cols[i]) = dy * scale;
    field.flow_x(px.rows[i], px.cols[i]) = dx * scale;
  }
}

double bilinear(const RealMap& m, double row, double col) {
  const int r0 = std::clamp(static_cast<int>(std::floor(row)), 0, m.height() - 1);
  const int c0 = std::clamp(static_cast<int>(std::floor(col)), 0, m.width() - 1);
  const int r1 = std::min(r0 + 1, m.height() - 1);
  const int c1 = std::min(c0 + 1, m.width() - 1);
  const double fr = std::clamp(row - r0, 0.0, 1.0);
  const double fc = std::clamp(col - c0, 0.0, 1.0);
  return (1 - fr) * ((1 - fc) * m(r0, c0) + fc * m(r0, c1)) +
         fr * ((1 - fc) * m(r1, c0) + fc * m(r1, c1));
}

LabelMap finish(const LabelMap& raw, std::size_t min_cell_pixels) {
  const LabelMap kept = min_cell_pixels > 1 ? filter_small_cells(raw, min_cell_pixels) : raw;
  return renumber_consecutive(kept);
}

}  // namespace

void FlowField::validate() const {
  if (!flow_y.same_shape(cell_prob) || !flow_x.same_shape(cell_prob)) {
    throw std::invalid_argument("flow field channels differ in shape");
  }
  for (std::size_t i = 0; i < cell_prob.size(); ++i) {
    if (!std::isfinite(flow_y[i]) || !std::isfinite(flow_x[i]) || !std::isfinite(cell_prob[i])) {
      throw std::invalid_argument("non-finite flow values");
    }
  }
}

DenseMap FlowField::to_dense() const { return DenseMap({flow_y, flow_x, cell_prob}); }

FlowField FlowField::from_dense(const DenseMap& map) {
  if (map.channel_count() != 3) {
    throw std::invalid_argument("flow field needs 3 channels (flow_y, flow_x, cell_prob)");
  }
  return FlowField{map.channel(0), map.channel(1), map.channel(2)};
}

FlowField encode_flow_field(const LabelMap& map) {
  FlowField field{RealMap(map.height(), map.width()), RealMap(map.height(), map.width()),
                  RealMap(map.height(), map.width())};
  std::map<Label, CellPixels> cells;
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      const Label v = map(r, c);
      if (v == 0) continue;
      field.cell_prob(r, c) = 1.0;
      auto& px = cells[v];
      px.rows.push_back(r);
      px.cols.push_back(c);
    }
  }
  for (const auto& [label, px] : cells) encode_cell(px, field);
  return field;
}

LabelMap decode_flow_field(const FlowField& field, const FlowDecodeOptions& options) {
  field.validate();
  const int h = field.height();
  const int w = field.width();
  Mask fg(h, w);
  bool any_flow = false;
  for (std::size_t i = 0; i < fg.size(); ++i) {
    fg[i] = field.cell_prob[i] > options.prob_threshold ? 1 : 0;
    if (fg[i] != 0 && (field.flow_y[i] != 0.0 || field.flow_x[i] != 0.0)) any_flow = true;
  }
  if (!any_flow) return finish(label_components(fg), options.min_cell_pixels);

  struct Walker {
    int row, col;
    double y, x;
  };
  std::vector<Walker> walkers;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (fg(r, c) != 0) walkers.push_back({r, c, static_cast<double>(r), static_cast<double>(c)});
    }
  }
  for (std::size_t it = 0; it < options.n_iter; ++it) {
    for (Walker& p : walkers) {
      const double dy = bilinear(field.flow_y, p.y, p.x);
      const double dx = bilinear(field.flow_x, p.y, p.x);
      p.y = std::clamp(p.y + options.step_size * dy, 0.0, static_cast<double>(h - 1));
      p.x = std::clamp(p.x + options.step_size * dx, 0.0, static_cast<double>(w - 1));
    }
  }

  // Sinks: 8-connected clusters of occupied final positions.
  Mask occupied(h, w);
  for (const Walker& p : walkers) {
    occupied(static_cast<int>(std::lround(p.y)), static_cast<int>(std::lround(p.x))) = 1;
  }
  LabelMap sinks(h, w);
  Label next = 0;
  std::vector<std::pair<int, int>> stack;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (occupied(r, c) == 0 || sinks(r, c) != 0) continue;
      sinks(r, c) = ++next;
      stack.emplace_back(r, c);
      while (!stack.empty()) {
        const auto [pr, pc] = stack.back();
        stack.pop_back();
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int nr = pr + dr;
            const int nc = pc + dc;
            if (!occupied.contains(nr, nc) || occupied(nr, nc) == 0 || sinks(nr, nc) != 0) continue;
            sinks(nr, nc) = next;
            stack.emplace_back(nr, nc);
          }
        }
      }
    }
  }
  LabelMap out(h, w);
  for (const Walker& p : walkers) {
    out(p.row, p.col) = sinks(static_cast<int>(std::lround(p.y)), static_cast<int>(std::lround(p.x)));
  }
  return finish(out, options.min_cell_pixels);
}

}  // namespace cellbench::decoders
