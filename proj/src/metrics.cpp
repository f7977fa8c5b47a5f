#include "cellbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "cellbench/label_map.hpp"

namespace cellbench {

namespace {

void check_same_shape(const LabelMap& gt, const LabelMap& pred) {
  if (!gt.same_shape(pred)) {
    throw std::invalid_argument("dimension mismatch: gt " + std::to_string(gt.height()) + "x" +
                                std::to_string(gt.width()) + " vs pred " +
                                std::to_string(pred.height()) + "x" + std::to_string(pred.width()));
  }
}

double ratio_or_zero(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

std::string to_string(BoundaryMode mode) {
  switch (mode) {
    case BoundaryMode::both: return "both";
    case BoundaryMode::gt_only: return "gt";
    case BoundaryMode::none: return "none";
  }
  return "both";
}

BoundaryMode parse_boundary_mode(const std::string& text) {
  if (text == "both") return BoundaryMode::both;
  if (text == "gt" || text == "gt_only") return BoundaryMode::gt_only;
  if (text == "none") return BoundaryMode::none;
  throw std::invalid_argument("unknown boundary mode '" + text + "'");
}

void MatchConfig::validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw std::invalid_argument("iou_threshold must lie in (0, 1)");
  }
}

std::vector<Overlap> sparse_overlaps(const LabelMap& gt, const LabelMap& pred) {
  check_same_shape(gt, pred);
  std::unordered_map<Label, std::size_t> gt_area;
  std::unordered_map<Label, std::size_t> pred_area;
  std::unordered_map<std::uint64_t, std::size_t> joint;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const Label g = gt[i];
    const Label p = pred[i];
    if (g != 0) ++gt_area[g];
    if (p != 0) ++pred_area[p];
    if (g != 0 && p != 0) ++joint[(static_cast<std::uint64_t>(g) << 32) | p];
  }
  std::vector<Overlap> out;
  out.reserve(joint.size());
  for (const auto& [key, inter] : joint) {
    const auto g = static_cast<Label>(key >> 32);
    const auto p = static_cast<Label>(key & 0xFFFFFFFFu);
    out.push_back(Overlap{g, p, inter, gt_area[g] + pred_area[p] - inter});
  }
  std::sort(out.begin(), out.end(), [](const Overlap& a, const Overlap& b) {
    return a.gt_label != b.gt_label ? a.gt_label < b.gt_label : a.pred_label < b.pred_label;
  });
  return out;
}

IouMatrix iou_matrix(const LabelMap& gt, const LabelMap& pred) {
  check_same_shape(gt, pred);
  IouMatrix m{instance_ids(gt), instance_ids(pred), {}};
  m.values.assign(m.gt_labels.size() * m.pred_labels.size(), 0.0);
  auto row_of = [&](Label id) {
    return static_cast<std::size_t>(std::lower_bound(m.gt_labels.begin(), m.gt_labels.end(), id) -
                                    m.gt_labels.begin());
  };
  auto col_of = [&](Label id) {
    return static_cast<std::size_t>(
        std::lower_bound(m.pred_labels.begin(), m.pred_labels.end(), id) - m.pred_labels.begin());
  };
  for (const Overlap& o : sparse_overlaps(gt, pred)) {
    m.values[row_of(o.gt_label) * m.pred_labels.size() + col_of(o.pred_label)] = o.iou();
  }
  return m;
}

MatchResult match_instances(const LabelMap& gt, const LabelMap& pred, const MatchConfig& cfg) {
  check_same_shape(gt, pred);
  cfg.validate();
  const bool strip_gt = cfg.remove_boundary != BoundaryMode::none;
  const bool strip_pred = cfg.remove_boundary == BoundaryMode::both;
  const LabelMap g = strip_gt ? remove_boundary_cells(gt) : gt;
  const LabelMap p = strip_pred ? remove_boundary_cells(pred) : pred;

  std::vector<MatchedPair> candidates;
  for (const Overlap& o : sparse_overlaps(g, p)) {
    const double iou = o.iou();
    if (cfg.passes(iou)) candidates.push_back({o.gt_label, o.pred_label, iou});
  }
  // Above IoU 0.5 each instance has at most one candidate partner; below it
  // the greedy pass keeps the most similar pairs one-to-one.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const MatchedPair& a, const MatchedPair& b) { return a.iou > b.iou; });
  std::unordered_set<Label> used_gt;
  std::unordered_set<Label> used_pred;
  MatchResult result;
  for (const MatchedPair& c : candidates) {
    if (used_gt.contains(c.gt_label) || used_pred.contains(c.pred_label)) continue;
    used_gt.insert(c.gt_label);
    used_pred.insert(c.pred_label);
    result.pairs.push_back(c);
  }
  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const MatchedPair& a, const MatchedPair& b) { return a.gt_label < b.gt_label; });
  result.tp = result.pairs.size();
  result.fp = instance_count(p) - result.tp;
  result.fn_ = instance_count(g) - result.tp;
  return result;
}

MetricsRecord precision_recall_f1(std::size_t tp, std::size_t fp, std::size_t fn_) {
  const auto t = static_cast<double>(tp);
  MetricsRecord m;
  m.precision = ratio_or_zero(t, t + static_cast<double>(fp));
  m.recall = ratio_or_zero(t, t + static_cast<double>(fn_));
  m.f1 = ratio_or_zero(2.0 * m.precision * m.recall, m.precision + m.recall);
  return m;
}

ImageScore score_image_pair(const LabelMap& gt, const LabelMap& pred, const MatchConfig& cfg) {
  check_same_shape(gt, pred);
  const bool strip_gt = cfg.remove_boundary != BoundaryMode::none;
  const bool strip_pred = cfg.remove_boundary == BoundaryMode::both;
  const LabelMap g = relabel_connected(strip_gt ? remove_boundary_cells(gt) : gt);
  const LabelMap p = relabel_connected(strip_pred ? remove_boundary_cells(pred) : pred);
  ImageScore score;
  score.match = match_instances(g, p, cfg);
  score.metrics = precision_recall_f1(score.match.tp, score.match.fp, score.match.fn_);
  return score;
}

MetricsRecord evaluate_image_pair(const LabelMap& gt, const LabelMap& pred,
                                  const MatchConfig& cfg) {
  return score_image_pair(gt, pred, cfg).metrics;
}

}  // namespace cellbench
