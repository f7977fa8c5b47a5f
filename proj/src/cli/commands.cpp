#include "cellbench/cli.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "cellbench/atomic_file.hpp"
#include "cellbench/decoders/flow.hpp"
#include "cellbench/decoders/fourier.hpp"
#include "cellbench/decoders/shape_io.hpp"
#include "cellbench/decoders/star_polygon.hpp"
#include "cellbench/decoders/watershed.hpp"
#include "cellbench/dense_io.hpp"
#include "cellbench/image_io.hpp"
#include "cellbench/label_map.hpp"
#include "cellbench/report.hpp"

namespace cellbench::cli {

namespace {

const std::set<std::string> kImageExtensions = {".png", ".tif", ".tiff", ".bmp", ".pgm", ".ppm"};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return s;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text, CommandOutcome& outcome) {
  write_file_atomic(path, text);
  outcome.written.push_back(path);
  spdlog::info("wrote {}", path.string());
}

void write_json(const fs::path& path, const nlohmann::json& doc, CommandOutcome& outcome) {
  write_text(path, doc.dump(2) + "\n", outcome);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

/// (team, case_id) -> seconds. An empty team applies to every team.
using Timings = std::map<std::pair<std::string, std::string>, double>;

Timings read_timings(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  std::map<std::string, std::size_t> col;
  Timings out;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    const auto cells = split_fields(line);
    if (col.empty()) {
      for (std::size_t i = 0; i < cells.size(); ++i) col[cells[i]] = i;
      if (!col.contains("runtime_seconds") || (!col.contains("case_id") && !col.contains("image_id"))) {
        throw std::runtime_error("timings CSV needs case_id and runtime_seconds columns: " + path.string());
      }
      continue;
    }
    if (cells.size() != col.size()) {
      throw std::runtime_error("malformed timings row in " + path.string() + ": " + line);
    }
    const std::string team = col.contains("team") ? cells[col["team"]] : std::string{};
    const std::string id = cells[col.contains("case_id") ? col["case_id"] : col["image_id"]];
    const double seconds = std::stod(cells[col["runtime_seconds"]]);
    if (!(seconds >= 0.0)) throw std::runtime_error("negative runtime for " + id + " in " + path.string());
    out[{team, id}] = seconds;
  }
  return out;
}

std::optional<double> lookup_runtime(const Timings& timings, const std::string& team, const std::string& id) {
  if (const auto it = timings.find({team, id}); it != timings.end()) return it->second;
  if (const auto it = timings.find({std::string{}, id}); it != timings.end()) return it->second;
  return std::nullopt;
}

report::MetricsRow row_from_score(const std::string& id, const ImageScore& score, std::uint64_t pixels,
                                  report::RowStatus status) {
  report::MetricsRow row;
  row.image_id = id;
  row.tp = score.match.tp;
  row.fp = score.match.fp;
  row.fn_ = score.match.fn_;
  row.metrics = score.metrics;
  row.pixel_count = pixels;
  row.status = status;
  return row;
}

nlohmann::json match_config_json(const MatchConfig& cfg) {
  return {{"iou_threshold", cfg.iou_threshold},
          {"strict_inequality", cfg.strict_inequality},
          {"boundary", to_string(cfg.remove_boundary)},
          {"pipeline", report::kScoringPipeline}};
}

template <typename Fn>
void run_parallel(std::size_t count, unsigned jobs, Fn&& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next++; i < count; i = next++) fn(i);
  };
  if (workers == 1) {
    loop();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(loop);
}

std::vector<std::string> csv_names(const std::vector<fs::path>& paths) {
  std::vector<std::string> names;
  for (const auto& p : paths) names.push_back(p.filename().string());
  return names;
}

LabelMap finish_labels(const LabelMap& labels, bool keep_small) {
  return renumber_consecutive(keep_small ? labels : filter_small_cells(labels));
}

struct ShapeCanvas {
  int height;
  int width;
};

template <typename Shape>
ShapeCanvas canvas_for(const decoders::ShapeSet<Shape>& set, const DecodeRequest& request) {
  const auto h = request.height ? request.height : set.height;
  const auto w = request.width ? request.width : set.width;
  if (!h || !w) throw std::invalid_argument("shape document has no canvas size; pass --height and --width");
  return {*h, *w};
}

LabelMap decode_one(const fs::path& input, const DecodeRequest& request) {
  switch (request.algorithm) {
    case DecodeAlgorithm::flow: {
      const DenseFile file = read_dense_file(input);
      if (file.kind != "flow") throw std::invalid_argument("type mismatch: expected a flow map, got '" + file.kind + "'");
      decoders::FlowDecodeOptions options;
      options.prob_threshold = request.prob_threshold;
      options.min_cell_pixels = request.keep_small ? 1 : kMinCellPixels;
      return renumber_consecutive(decoders::decode_flow_field(decoders::FlowField::from_dense(file.map), options));
    }
    case DecodeAlgorithm::watershed: {
      const DenseFile file = read_dense_file(input);
      if (file.kind != "probability") {
        throw std::invalid_argument("type mismatch: expected a probability map, got '" + file.kind + "'");
      }
      const RealMap& prob = file.map.channel(0);
      Mask fg(prob.height(), prob.width());
      for (std::size_t i = 0; i < prob.size(); ++i) fg[i] = prob[i] > request.prob_threshold ? 1 : 0;
      const RealMap dist = decoders::distance_transform(fg);
      RealMap elevation(prob.height(), prob.width());
      if (file.map.channel_count() > 1) {
        elevation = file.map.channel(1);
      } else {
        for (std::size_t i = 0; i < dist.size(); ++i) elevation[i] = -dist[i];
      }
      const LabelMap markers = decoders::peak_markers(dist, fg);
      return finish_labels(decoders::marker_watershed(elevation, markers, fg), request.keep_small);
    }
    case DecodeAlgorithm::starpoly: {
      const auto set = decoders::star_polygons_from_json(decoders::read_json_file(input));
      const auto canvas = canvas_for(set, request);
      const auto kept = decoders::polygon_nms(set.shapes, request.nms_iou_threshold);
      return finish_labels(decoders::rasterize_star_polygons(kept, canvas.height, canvas.width),
                           request.keep_small);
    }
    case DecodeAlgorithm::contour: {
      const auto set = decoders::fourier_contours_from_json(decoders::read_json_file(input));
      const auto canvas = canvas_for(set, request);
      decoders::ContourDecodeOptions options;
      options.samples_per_contour = request.contour_samples;
      options.nms_iou_threshold = request.nms_iou_threshold;
      return finish_labels(decoders::decode_fourier_contours(set.shapes, canvas.height, canvas.width, options),
                           request.keep_small);
    }
  }
  throw std::logic_error("unknown decode algorithm");
}

}  // namespace

std::vector<std::pair<std::string, fs::path>> list_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  std::map<std::string, fs::path> by_stem;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (!kImageExtensions.contains(lower(entry.path().extension().string()))) continue;
    const std::string stem = entry.path().stem().string();
    if (!by_stem.emplace(stem, entry.path()).second) {
      throw std::runtime_error("two images share the stem '" + stem + "' in " + dir.string());
    }
  }
  return {by_stem.begin(), by_stem.end()};
}

std::string team_from_csv_path(const fs::path& path) {
  std::string stem = path.stem().string();
  constexpr std::string_view suffix = "_metrics";
  if (stem.size() > suffix.size() && stem.ends_with(suffix)) stem.resize(stem.size() - suffix.size());
  return stem;
}

CommandOutcome evaluate_cmd(const EvalManifest& manifest) {
  manifest.match.validate();
  if (manifest.pred_dirs.empty()) throw std::invalid_argument("at least one --pred directory is required");
  std::set<std::string> seen;
  for (const auto& [team, dir] : manifest.pred_dirs) {
    if (!seen.insert(team).second) throw std::invalid_argument("duplicate team id '" + team + "'");
  }
  const auto gt_images = list_images(manifest.gt_dir);
  const Timings timings = manifest.timings ? read_timings(*manifest.timings) : Timings{};

  const std::size_t team_count = manifest.pred_dirs.size();
  std::vector<std::map<std::string, fs::path>> preds(team_count);
  std::vector<std::vector<std::string>> unmatched(team_count);
  std::set<std::string> gt_ids;
  for (const auto& [id, path] : gt_images) gt_ids.insert(id);
  for (std::size_t t = 0; t < team_count; ++t) {
    for (auto& [id, path] : list_images(manifest.pred_dirs[t].second)) {
      if (gt_ids.contains(id)) {
        preds[t].emplace(id, path);
      } else {
        unmatched[t].push_back(id);
        spdlog::warn("team {}: prediction '{}' has no ground truth", manifest.pred_dirs[t].first, id);
      }
    }
  }

  struct ImageResult {
    std::vector<report::MetricsRow> rows;
    std::vector<std::string> errors;
    std::optional<QcReport> qc;
  };
  std::vector<ImageResult> results(gt_images.size());

  run_parallel(gt_images.size(), manifest.jobs, [&](std::size_t i) {
    const auto& [id, gt_path] = gt_images[i];
    ImageResult& out = results[i];
    out.rows.resize(team_count);
    LabelMap gt(1, 1);
    try {
      gt = load_label_map(gt_path);
    } catch (const std::exception& e) {
      out.errors.push_back("gt " + id + ": " + e.what());
      for (std::size_t t = 0; t < team_count; ++t) {
        out.rows[t] = row_from_score(id, ImageScore{{}, precision_recall_f1(0, 0, 0)}, 0,
                                     report::RowStatus::unreadable);
      }
      return;
    }
    out.qc = qc_image(gt);
    const auto pixels = static_cast<std::uint64_t>(gt.size());
    const LabelMap empty(gt.height(), gt.width());
    for (std::size_t t = 0; t < team_count; ++t) {
      const std::string& team = manifest.pred_dirs[t].first;
      report::RowStatus status = report::RowStatus::ok;
      ImageScore score;
      const auto it = preds[t].find(id);
      if (it == preds[t].end()) {
        status = report::RowStatus::missing;
        score = score_image_pair(gt, empty, manifest.match);
      } else {
        try {
          const LabelMap pred = load_label_map(it->second);
          if (!pred.same_shape(gt)) {
            status = report::RowStatus::dimension_mismatch;
            out.errors.push_back(team + "/" + id + ": dimension mismatch (gt " + std::to_string(gt.height()) +
                                 "x" + std::to_string(gt.width()) + ", pred " + std::to_string(pred.height()) +
                                 "x" + std::to_string(pred.width()) + ")");
            score = score_image_pair(gt, empty, manifest.match);
          } else {
            score = score_image_pair(gt, pred, manifest.match);
          }
        } catch (const ImageIoError& e) {
          status = report::RowStatus::unreadable;
          out.errors.push_back(team + "/" + id + ": " + e.what());
          score = score_image_pair(gt, empty, manifest.match);
        }
      }
      out.rows[t] = row_from_score(id, score, pixels, status);
      out.rows[t].runtime_seconds = lookup_runtime(timings, team, id);
    }
  });

  CommandOutcome outcome;
  fs::create_directories(manifest.output_dir);
  nlohmann::json teams = nlohmann::json::array();
  for (std::size_t t = 0; t < team_count; ++t) {
    const std::string& team = manifest.pred_dirs[t].first;
    std::vector<report::MetricsRow> rows;
    std::map<std::string, std::size_t> status_counts;
    double f1_sum = 0.0;
    for (const auto& r : results) {
      rows.push_back(r.rows[t]);
      ++status_counts[report::to_string(r.rows[t].status)];
      f1_sum += r.rows[t].metrics.f1;
    }
    write_text(manifest.output_dir / (team + "_metrics.csv"), report::metrics_csv(rows, manifest.match), outcome);
    teams.push_back({{"team", team},
                     {"pred_dir", manifest.pred_dirs[t].second.string()},
                     {"images", rows.size()},
                     {"status_counts", status_counts},
                     {"mean_f1", rows.empty() ? 0.0 : f1_sum / static_cast<double>(rows.size())},
                     {"unmatched_predictions", unmatched[t]}});
  }
  nlohmann::json qc_failures = nlohmann::json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    for (const auto& e : results[i].errors) outcome.errors.push_back(e);
    if (results[i].qc && !results[i].qc->passed) {
      qc_failures.push_back({{"image_id", gt_images[i].first}, {"reasons", results[i].qc->reasons}});
    }
  }
  const nlohmann::json summary = {
      {"schema", report::kEvaluationSchema},
      {"config", match_config_json(manifest.match)},
      {"gt_dir", manifest.gt_dir.string()},
      {"images", gt_images.size()},
      {"timings", manifest.timings ? manifest.timings->string() : std::string{}},
      {"teams", teams},
      {"gt_qc_failures", qc_failures},
      {"errors", outcome.errors},
  };
  write_json(manifest.output_dir / "evaluation.json", summary, outcome);
  for (const auto& e : outcome.errors) spdlog::error("{}", e);
  outcome.code = outcome.errors.empty() ? ExitCode::ok : ExitCode::file_errors;
  return outcome;
}

RankingTable load_ranking_table(const std::vector<fs::path>& metrics_csvs) {
  if (metrics_csvs.size() < 2) throw std::invalid_argument("ranking needs at least two team CSVs");
  std::vector<RunRecord> records;
  std::set<std::string> teams;
  std::map<std::string, std::size_t> case_team_count;
  for (const auto& path : metrics_csvs) {
    const std::string team = team_from_csv_path(path);
    if (!teams.insert(team).second) throw std::invalid_argument("duplicate team id '" + team + "'");
    auto parsed = report::parse_metrics_csv(read_text(path), team);
    if (parsed.empty()) throw std::invalid_argument("no scored cases in " + path.string());
    for (const auto& r : parsed) ++case_team_count[r.case_id];
    records.insert(records.end(), parsed.begin(), parsed.end());
  }
  const bool shared = std::any_of(case_team_count.begin(), case_team_count.end(),
                                  [&](const auto& kv) { return kv.second == teams.size(); });
  if (!shared) throw std::invalid_argument("disjoint case sets: no case id is shared by every team");
  return RankingTable::from_records(records);
}

CommandOutcome rank_cmd(const RankRequest& request) {
  const RankingTable table = load_ranking_table(request.metrics_csvs);
  CommandOutcome outcome;
  fs::create_directories(request.output_dir);
  const LeaderBoard board = compute_leaderboard(table, request.scheme, request.ranking);
  nlohmann::json doc = report::leaderboard_json(board, table);
  doc["inputs"] = csv_names(request.metrics_csvs);
  write_json(request.output_dir / "leaderboard.json", doc, outcome);
  write_text(request.output_dir / "rank_matrix.csv",
             report::rank_matrix_csv(table, per_case_ranks(table, request.ranking.runtime_mode),
                                     request.ranking.runtime_mode),
             outcome);
  if (request.all_schemes) {
    std::vector<LeaderBoard> boards;
    for (const Scheme s : all_schemes()) {
      try {
        boards.push_back(compute_leaderboard(table, s, request.ranking));
      } catch (const std::invalid_argument& e) {
        spdlog::warn("scheme {} skipped: {}", to_string(s), e.what());
      }
    }
    write_text(request.output_dir / "schemes.csv", report::scheme_comparison_csv(boards), outcome);
  }
  return outcome;
}

CommandOutcome stability_cmd(const StabilityRequest& request) {
  const RankingTable table = load_ranking_table(request.metrics_csvs);
  request.bootstrap.validate();
  CommandOutcome outcome;
  fs::create_directories(request.output_dir);
  const StabilityReport stab = bootstrap_ranking_stability(table, request.bootstrap, request.scheme, request.ranking);
  nlohmann::json doc = report::stability_json(stab);
  doc["inputs"] = csv_names(request.metrics_csvs);
  write_json(request.output_dir / "stability.json", doc, outcome);
  write_text(request.output_dir / "significance.csv",
             report::significance_csv(significance_matrix(table, request.ranking.alpha)), outcome);
  return outcome;
}

std::string to_string(DecodeAlgorithm algorithm) {
  switch (algorithm) {
    case DecodeAlgorithm::flow: return "flow";
    case DecodeAlgorithm::watershed: return "watershed";
    case DecodeAlgorithm::starpoly: return "starpoly";
    case DecodeAlgorithm::contour: return "contour";
  }
  return "flow";
}

DecodeAlgorithm parse_decode_algorithm(const std::string& text) {
  for (const auto a : {DecodeAlgorithm::flow, DecodeAlgorithm::watershed, DecodeAlgorithm::starpoly,
                       DecodeAlgorithm::contour}) {
    if (text == to_string(a)) return a;
  }
  throw std::invalid_argument("unknown decode algorithm '" + text + "'");
}

CommandOutcome decode_cmd(const DecodeRequest& request) {
  CommandOutcome outcome;
  fs::create_directories(request.output_dir);
  for (const auto& input : request.inputs) {
    try {
      const LabelMap labels = decode_one(input, request);
      spdlog::info("{}: {} cells", input.string(), instance_count(labels));
      const fs::path out = request.output_dir / (input.stem().string() + ".png");
      write_label_map_png(out, labels);
      outcome.written.push_back(out);
    } catch (const std::exception& e) {
      outcome.errors.push_back(input.string() + ": " + e.what());
      spdlog::error("{}", outcome.errors.back());
    }
  }
  outcome.code = outcome.errors.empty() ? ExitCode::ok : ExitCode::file_errors;
  return outcome;
}

CommandOutcome encode_flow_cmd(const std::vector<fs::path>& label_maps, const fs::path& output_dir) {
  CommandOutcome outcome;
  fs::create_directories(output_dir);
  for (const auto& input : label_maps) {
    try {
      const auto field = decoders::encode_flow_field(relabel_connected(load_label_map(input)));
      const fs::path out = output_dir / (input.stem().string() + ".flow");
      write_dense_file(out, DenseFile{"flow", {"flow_y", "flow_x", "cell_prob"}, field.to_dense()});
      outcome.written.push_back(out);
    } catch (const std::exception& e) {
      outcome.errors.push_back(input.string() + ": " + e.what());
      spdlog::error("{}", outcome.errors.back());
    }
  }
  outcome.code = outcome.errors.empty() ? ExitCode::ok : ExitCode::file_errors;
  return outcome;
}

}  // namespace cellbench::cli
