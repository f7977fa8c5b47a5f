#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cellbench/metrics.hpp"
#include "cellbench/ranking.hpp"
#include "cellbench/stats.hpp"

namespace cellbench::cli {

namespace fs = std::filesystem;

enum class ExitCode : int { ok = 0, file_errors = 1, fatal = 2 };

struct EvalManifest {
  fs::path gt_dir;
  /// team id -> prediction directory, in command-line order.
  std::vector<std::pair<std::string, fs::path>> pred_dirs;
  fs::path output_dir;
  MatchConfig match;
  RankingOptions ranking;
  BootstrapConfig bootstrap;
  /// Sidecar CSV with columns team,case_id,runtime_seconds (team optional).
  std::optional<fs::path> timings;
  unsigned jobs = 1;
};

struct CommandOutcome {
  ExitCode code = ExitCode::ok;
  std::vector<std::string> errors;
  std::vector<fs::path> written;
};

/// Image files in `dir` keyed by filename stem, sorted by stem.
std::vector<std::pair<std::string, fs::path>> list_images(const fs::path& dir);

/// Team id for a metrics CSV: the file stem without a trailing "_metrics".
std::string team_from_csv_path(const fs::path& path);

CommandOutcome evaluate_cmd(const EvalManifest& manifest);

struct RankRequest {
  std::vector<fs::path> metrics_csvs;
  fs::path output_dir;
  Scheme scheme = Scheme::rank_then_mean;
  RankingOptions ranking;
  bool all_schemes = false;
};

/// Loads the CSVs into one table. Throws unless there are at least two teams
/// and some case id is shared by every team.
RankingTable load_ranking_table(const std::vector<fs::path>& metrics_csvs);

CommandOutcome rank_cmd(const RankRequest& request);

struct StabilityRequest {
  std::vector<fs::path> metrics_csvs;
  fs::path output_dir;
  Scheme scheme = Scheme::rank_then_mean;
  RankingOptions ranking;
  BootstrapConfig bootstrap;
};

CommandOutcome stability_cmd(const StabilityRequest& request);

enum class DecodeAlgorithm { flow, watershed, starpoly, contour };
std::string to_string(DecodeAlgorithm algorithm);
DecodeAlgorithm parse_decode_algorithm(const std::string& text);

struct DecodeRequest {
  std::vector<fs::path> inputs;
  fs::path output_dir;
  DecodeAlgorithm algorithm = DecodeAlgorithm::flow;
  bool keep_small = false;
  /// Canvas size for shape documents that do not carry one.
  std::optional<int> height;
  std::optional<int> width;
  double prob_threshold = 0.5;
  double nms_iou_threshold = 0.5;
  std::size_t contour_samples = 64;
};

CommandOutcome decode_cmd(const DecodeRequest& request);

/// Writes `<stem>.flow` dense files (flow_y, flow_x, cell_prob) for label maps.
CommandOutcome encode_flow_cmd(const std::vector<fs::path>& label_maps, const fs::path& output_dir);

}  // namespace cellbench::cli
