#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cellbench/grid.hpp"

namespace cellbench {

inline constexpr double kDefaultIouThreshold = 0.5;

enum class BoundaryMode { both, gt_only, none };

std::string to_string(BoundaryMode mode);
BoundaryMode parse_boundary_mode(const std::string& text);

struct MatchConfig {
  double iou_threshold = kDefaultIouThreshold;
  /// IoU must exceed the threshold (true) or merely reach it (false).
  bool strict_inequality = true;
  BoundaryMode remove_boundary = BoundaryMode::both;

  void validate() const;
  bool passes(double iou) const noexcept {
    return strict_inequality ? iou > iou_threshold : iou >= iou_threshold;
  }
};

struct MatchedPair {
  Label gt_label = 0;
  Label pred_label = 0;
  double iou = 0.0;

  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

struct MatchResult {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn_ = 0;
  std::vector<MatchedPair> pairs;
};

struct MetricsRecord {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Overlap of one (gt, pred) instance pair, from a single joint pass.
struct Overlap {
  Label gt_label = 0;
  Label pred_label = 0;
  std::size_t intersection = 0;
  std::size_t union_ = 0;

  double iou() const noexcept {
    return union_ == 0 ? 0.0 : static_cast<double>(intersection) / static_cast<double>(union_);
  }
};

/// Every co-occurring (gt, pred) instance pair with its intersection and
/// union sizes. Pairs that never co-occur have IoU 0 and are omitted.
std::vector<Overlap> sparse_overlaps(const LabelMap& gt, const LabelMap& pred);

struct IouMatrix {
  std::vector<Label> gt_labels;    // row ids, ascending
  std::vector<Label> pred_labels;  // column ids, ascending
  std::vector<double> values;      // row-major

  double at(std::size_t gt_index, std::size_t pred_index) const {
    return values.at(gt_index * pred_labels.size() + pred_index);
  }
};

IouMatrix iou_matrix(const LabelMap& gt, const LabelMap& pred);

/// Applies the configured boundary removal, then matches predictions to
/// ground-truth instances whose IoU passes the threshold test.
MatchResult match_instances(const LabelMap& gt, const LabelMap& pred, const MatchConfig& cfg = {});

MetricsRecord precision_recall_f1(std::size_t tp, std::size_t fp, std::size_t fn_);

struct ImageScore {
  MatchResult match;
  MetricsRecord metrics;
};

/// boundary removal -> relabel_connected -> match_instances -> F1.
ImageScore score_image_pair(const LabelMap& gt, const LabelMap& pred, const MatchConfig& cfg = {});
MetricsRecord evaluate_image_pair(const LabelMap& gt, const LabelMap& pred,
                                  const MatchConfig& cfg = {});

}  // namespace cellbench
