#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cellbench/metrics.hpp"
#include "cellbench/ranking.hpp"
#include "cellbench/stats.hpp"

namespace cellbench::report {

inline constexpr std::string_view kMetricsSchema = "cellbench.metrics/1";
inline constexpr std::string_view kLeaderboardSchema = "cellbench.leaderboard/1";
inline constexpr std::string_view kRankMatrixSchema = "cellbench.rank_matrix/1";
inline constexpr std::string_view kStabilitySchema = "cellbench.stability/1";
inline constexpr std::string_view kSignificanceSchema = "cellbench.significance/1";
inline constexpr std::string_view kEvaluationSchema = "cellbench.evaluation/1";

/// Order of the per-image scoring steps, recorded in every evaluation output.
inline constexpr std::string_view kScoringPipeline =
    "remove_boundary_cells>relabel_connected>match_instances>precision_recall_f1";

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

enum class RowStatus { ok, missing, dimension_mismatch, unreadable };
std::string to_string(RowStatus status);
RowStatus parse_row_status(const std::string& text);

struct MetricsRow {
  std::string image_id;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn_ = 0;
  MetricsRecord metrics;
  std::optional<double> runtime_seconds;
  std::uint64_t pixel_count = 0;
  RowStatus status = RowStatus::ok;
};

/// Per-image metrics CSV. The first line is a '#' comment carrying the schema
/// and match configuration, followed by the header
///   image_id,tp,fp,fn,precision,recall,f1,runtime_seconds,pixel_count,status
std::string metrics_csv(const std::vector<MetricsRow>& rows, const MatchConfig& cfg);

/// Reads a metrics CSV (or any CSV with case_id/image_id, f1 and optional
/// runtime_seconds, pixel_count, status columns) into run records. Rows with
/// status "missing" are skipped so the ranking table flags them.
std::vector<RunRecord> parse_metrics_csv(std::string_view text, const std::string& team_id);

nlohmann::json leaderboard_json(const LeaderBoard& board, const RankingTable& table);
std::string rank_matrix_csv(const RankingTable& table, const RankMatrix& ranks,
                            RuntimeMode mode);
/// team, one rank column per scheme.
std::string scheme_comparison_csv(const std::vector<LeaderBoard>& boards);

nlohmann::json stability_json(const StabilityReport& report);
std::string significance_csv(const SignificanceMatrix& matrix);

}  // namespace cellbench::report
