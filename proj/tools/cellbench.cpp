#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cellbench/cli.hpp"

namespace {

using namespace cellbench;
using cellbench::cli::ExitCode;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("cellbench");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("CELLBENCH_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string(env) != "off") {
      spdlog::warn("unrecognized CELLBENCH_LOG value '{}'", env);
    } else {
      spdlog::set_level(level);
    }
  }
}

int finish(const cli::CommandOutcome& outcome) {
  for (const auto& e : outcome.errors) std::cerr << "error: " << e << '\n';
  return static_cast<int>(outcome.code);
}

const std::map<std::string, BoundaryMode> kBoundaryModes = {
    {"both", BoundaryMode::both}, {"gt", BoundaryMode::gt_only}, {"none", BoundaryMode::none}};
const std::map<std::string, RuntimeMode> kRuntimeModes = {
    {"subtract", RuntimeMode::subtract_floor}, {"cap", RuntimeMode::hard_cap}};

std::map<std::string, Scheme> scheme_names() {
  std::map<std::string, Scheme> out;
  for (const Scheme s : all_schemes()) out.emplace(to_string(s), s);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Cell segmentation benchmark: per-image metrics, rankings, stability and decoders"};
  app.require_subcommand(1);

  const auto schemes = scheme_names();
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());

  // evaluate
  cli::EvalManifest manifest;
  std::vector<std::string> pred_specs;
  std::vector<std::string> team_names;
  std::string timings;
  auto* evaluate = app.add_subcommand("evaluate", "Score prediction directories against ground truth");
  evaluate->add_option("--gt", manifest.gt_dir, "Ground-truth label map directory")->required()->check(CLI::ExistingDirectory);
  evaluate->add_option("--pred", pred_specs, "Prediction directory, or TEAM=DIR (repeatable)")->required();
  evaluate->add_option("--team", team_names, "Team id for each --pred, in order");
  evaluate->add_option("--out", manifest.output_dir, "Output directory")->required();
  evaluate->add_option("--iou-threshold", manifest.match.iou_threshold, "Match threshold")->capture_default_str();
  bool inclusive = false;
  evaluate->add_flag("--inclusive", inclusive, "Match at IoU >= threshold instead of >");
  evaluate->add_option("--boundary", manifest.match.remove_boundary, "Boundary-cell removal")
      ->transform(CLI::CheckedTransformer(kBoundaryModes, CLI::ignore_case))
      ->default_str("both");
  evaluate->add_option("--timings", timings, "Runtime sidecar CSV (team,case_id,runtime_seconds)");
  evaluate->add_option("--jobs", manifest.jobs, "Concurrent images")->default_val(hw);

  // rank
  cli::RankRequest rank;
  auto* rank_cmd = app.add_subcommand("rank", "Rank teams from per-image metrics CSVs");
  rank_cmd->add_option("csvs", rank.metrics_csvs, "Team metrics CSVs (team id from file stem)")
      ->required()
      ->check(CLI::ExistingFile);
  rank_cmd->add_option("--out", rank.output_dir, "Output directory")->required();
  rank_cmd->add_option("--scheme", rank.scheme, "Ranking scheme")
      ->transform(CLI::CheckedTransformer(schemes))
      ->default_str(to_string(Scheme::rank_then_mean));
  rank_cmd->add_flag("--all-schemes", rank.all_schemes, "Also write the five-scheme comparison");
  rank_cmd->add_option("--runtime-mode", rank.ranking.runtime_mode, "Runtime tolerance handling")
      ->transform(CLI::CheckedTransformer(kRuntimeModes))
      ->default_str("subtract");
  rank_cmd->add_option("--alpha", rank.ranking.alpha, "Significance level")->capture_default_str();

  // stability
  cli::StabilityRequest stab;
  auto* stab_cmd = app.add_subcommand("stability", "Bootstrap ranking stability and pairwise significance");
  stab_cmd->add_option("csvs", stab.metrics_csvs, "Team metrics CSVs")->required()->check(CLI::ExistingFile);
  stab_cmd->add_option("--out", stab.output_dir, "Output directory")->required();
  stab_cmd->add_option("--scheme", stab.scheme, "Ranking scheme")
      ->transform(CLI::CheckedTransformer(schemes))
      ->default_str(to_string(Scheme::rank_then_mean));
  stab_cmd->add_option("--runtime-mode", stab.ranking.runtime_mode, "Runtime tolerance handling")
      ->transform(CLI::CheckedTransformer(kRuntimeModes))
      ->default_str("subtract");
  stab_cmd->add_option("--replicates", stab.bootstrap.replicates, "Bootstrap replicates")->capture_default_str();
  stab_cmd->add_option("--seed", stab.bootstrap.seed, "Bootstrap seed")->capture_default_str();
  stab_cmd->add_option("--alpha", stab.ranking.alpha, "Significance level")->capture_default_str();
  stab_cmd->add_option("--jobs", stab.bootstrap.threads, "Worker threads")->default_val(hw);

  // decode
  cli::DecodeRequest decode;
  std::string algorithm = "flow";
  auto* decode_cmd = app.add_subcommand("decode", "Convert predicted maps or shapes into label-map PNGs");
  decode_cmd->add_option("inputs", decode.inputs, "Input files")->required()->check(CLI::ExistingFile);
  decode_cmd->add_option("--algorithm", algorithm, "flow | watershed | starpoly | contour")
      ->check(CLI::IsMember({"flow", "watershed", "starpoly", "contour"}))
      ->capture_default_str();
  decode_cmd->add_option("--out", decode.output_dir, "Output directory")->required();
  decode_cmd->add_flag("--keep-small", decode.keep_small, "Keep cells under 15 pixels");
  decode_cmd->add_option("--height", decode.height, "Canvas height for shape files");
  decode_cmd->add_option("--width", decode.width, "Canvas width for shape files");
  decode_cmd->add_option("--prob-threshold", decode.prob_threshold, "Foreground threshold")->capture_default_str();
  decode_cmd->add_option("--nms-iou", decode.nms_iou_threshold, "Shape NMS threshold")->capture_default_str();
  decode_cmd->add_option("--samples", decode.contour_samples, "Points per Fourier contour")->capture_default_str();

  // encode-flow
  std::vector<cli::fs::path> encode_inputs;
  cli::fs::path encode_out;
  auto* encode_cmd = app.add_subcommand("encode-flow", "Write flow fields for label maps");
  encode_cmd->add_option("inputs", encode_inputs, "Label maps")->required()->check(CLI::ExistingFile);
  encode_cmd->add_option("--out", encode_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*evaluate) {
      if (!team_names.empty() && team_names.size() != pred_specs.size()) {
        throw CLI::ValidationError("--team", "give one --team per --pred");
      }
      for (std::size_t i = 0; i < pred_specs.size(); ++i) {
        std::string team;
        std::string dir = pred_specs[i];
        if (const auto eq = dir.find('='); eq != std::string::npos) {
          team = dir.substr(0, eq);
          dir = dir.substr(eq + 1);
        }
        if (!team_names.empty()) team = team_names[i];
        if (team.empty()) team = cli::fs::path(dir).lexically_normal().filename().string();
        if (team.empty()) team = cli::fs::path(dir).lexically_normal().parent_path().filename().string();
        manifest.pred_dirs.emplace_back(team, dir);
      }
      if (!timings.empty()) manifest.timings = timings;
      manifest.match.strict_inequality = !inclusive;
      return finish(cli::evaluate_cmd(manifest));
    }
    if (*rank_cmd) return finish(cli::rank_cmd(rank));
    if (*stab_cmd) return finish(cli::stability_cmd(stab));
    if (*decode_cmd) {
      decode.algorithm = cli::parse_decode_algorithm(algorithm);
      return finish(cli::decode_cmd(decode));
    }
    if (*encode_cmd) return finish(cli::encode_flow_cmd(encode_inputs, encode_out));
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::fatal);
  }
  return static_cast<int>(ExitCode::fatal);
}
