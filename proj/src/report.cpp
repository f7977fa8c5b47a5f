#include "cellbench/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace cellbench::report {

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view cell = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.remove_suffix(1);
    while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
    out.emplace_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& text, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument(std::string("bad ") + what + " value '" + text + "'");
  }
  return v;
}

std::string csv_cell(const std::string& text) {
  if (text.find_first_of(",\n\"") != std::string::npos) {
    throw std::invalid_argument("identifier contains a CSV delimiter: '" + text + "'");
  }
  return text;
}

}  // namespace

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string to_string(RowStatus status) {
  switch (status) {
    case RowStatus::ok: return "ok";
    case RowStatus::missing: return "missing";
    case RowStatus::dimension_mismatch: return "dimension_mismatch";
    case RowStatus::unreadable: return "unreadable";
  }
  return "ok";
}

RowStatus parse_row_status(const std::string& text) {
  if (text.empty() || text == "ok") return RowStatus::ok;
  if (text == "missing") return RowStatus::missing;
  if (text == "dimension_mismatch") return RowStatus::dimension_mismatch;
  if (text == "unreadable") return RowStatus::unreadable;
  throw std::invalid_argument("unknown row status '" + text + "'");
}

std::string metrics_csv(const std::vector<MetricsRow>& rows, const MatchConfig& cfg) {
  std::ostringstream out;
  out << "# schema=" << kMetricsSchema << " iou_threshold=" << format_double(cfg.iou_threshold)
      << " strict=" << (cfg.strict_inequality ? "true" : "false")
      << " boundary=" << to_string(cfg.remove_boundary) << " pipeline=" << kScoringPipeline << '\n';
  out << "image_id,tp,fp,fn,precision,recall,f1,runtime_seconds,pixel_count,status\n";
  for (const MetricsRow& r : rows) {
    out << csv_cell(r.image_id) << ',' << r.tp << ',' << r.fp << ',' << r.fn_ << ','
        << format_double(r.metrics.precision) << ',' << format_double(r.metrics.recall) << ','
        << format_double(r.metrics.f1) << ','
        << (r.runtime_seconds ? format_double(*r.runtime_seconds) : std::string{}) << ','
        << r.pixel_count << ',' << to_string(r.status) << '\n';
  }
  return out.str();
}

std::vector<RunRecord> parse_metrics_csv(std::string_view text, const std::string& team_id) {
  std::vector<RunRecord> records;
  std::vector<std::string> header;
  std::unordered_map<std::string, std::size_t> col;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == text.npos ? text.npos : nl - pos);
    pos = nl == text.npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    const auto cells = split_csv_line(line);
    if (header.empty()) {
      header = cells;
      for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
      if (!col.contains("case_id") && !col.contains("image_id")) {
        throw std::invalid_argument("metrics CSV lacks a case_id/image_id column");
      }
      if (!col.contains("f1")) throw std::invalid_argument("metrics CSV lacks an f1 column");
      continue;
    }
    if (cells.size() != header.size()) {
      throw std::invalid_argument("metrics CSV line " + std::to_string(line_no) +
                                  " has the wrong number of fields");
    }
    auto field = [&](const char* name) -> const std::string* {
      const auto it = col.find(name);
      return it == col.end() ? nullptr : &cells[it->second];
    };
    if (const auto* status = field("status"); status && parse_row_status(*status) == RowStatus::missing) {
      continue;
    }
    RunRecord r;
    r.team_id = team_id;
    r.case_id = col.contains("case_id") ? *field("case_id") : *field("image_id");
    r.f1 = parse_double(*field("f1"), "f1");
    if (const auto* rt = field("runtime_seconds"); rt && !rt->empty()) {
      r.runtime_seconds = parse_double(*rt, "runtime_seconds");
    }
    if (const auto* px = field("pixel_count"); px && !px->empty()) {
      r.pixel_count = static_cast<std::uint64_t>(parse_double(*px, "pixel_count"));
    }
    if (r.pixel_count < 1) r.pixel_count = 1;
    records.push_back(std::move(r));
  }
  return records;
}

nlohmann::json leaderboard_json(const LeaderBoard& board, const RankingTable& table) {
  std::vector<std::size_t> order(board.teams.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return board.ranks[a] < board.ranks[b]; });
  nlohmann::json teams = nlohmann::json::array();
  for (const std::size_t i : order) {
    teams.push_back({{"team", board.teams[i]}, {"score", board.scores[i]}, {"rank", board.ranks[i]}});
  }
  return {
      {"schema", kLeaderboardSchema},
      {"scheme", to_string(board.scheme)},
      {"alpha", board.alpha},
      {"runtime_mode", to_string(board.runtime_mode)},
      {"tolerance", "10 s up to 1e6 px, else pixels / 1e6 * 10 s"},
      {"tie_policy", "fractional per-case ranks, competition final ranks"},
      {"missing_policy", "worst per-case rank"},
      {"missing_entries", table.missing_count()},
      {"cases", table.case_count()},
      {"teams", teams},
  };
}

std::string rank_matrix_csv(const RankingTable& table, const RankMatrix& ranks, RuntimeMode mode) {
  std::ostringstream out;
  out << "# schema=" << kRankMatrixSchema << " runtime_mode=" << to_string(mode) << '\n';
  out << "team";
  for (const auto& c : table.cases()) out << ',' << csv_cell(c) << ":f1," << csv_cell(c) << ":runtime";
  out << '\n';
  for (std::size_t t = 0; t < table.team_count(); ++t) {
    out << csv_cell(table.teams()[t]);
    for (std::size_t j = 0; j < ranks.columns; ++j) out << ',' << format_double(ranks.at(t, j));
    out << '\n';
  }
  return out.str();
}

std::string scheme_comparison_csv(const std::vector<LeaderBoard>& boards) {
  if (boards.empty()) return {};
  std::ostringstream out;
  out << "team";
  for (const auto& b : boards) out << ',' << to_string(b.scheme);
  out << '\n';
  for (std::size_t t = 0; t < boards.front().teams.size(); ++t) {
    out << csv_cell(boards.front().teams[t]);
    for (const auto& b : boards) out << ',' << b.ranks.at(t);
    out << '\n';
  }
  return out.str();
}

nlohmann::json stability_json(const StabilityReport& report) {
  nlohmann::json teams = nlohmann::json::array();
  for (std::size_t t = 0; t < report.teams.size(); ++t) {
    nlohmann::json freq = nlohmann::json::object();
    for (std::size_t r = 0; r < report.rank_frequency[t].size(); ++r) {
      const double f = report.rank_frequency[t][r];
      if (f > 0.0) freq[std::to_string(r + 1)] = f;
    }
    teams.push_back({{"team", report.teams[t]},
                     {"full_rank", report.full_ranks[t]},
                     {"median_rank", report.median_rank[t]},
                     {"ci95", {report.ci95[t].first, report.ci95[t].second}},
                     {"rank_frequency", freq}});
  }
  nlohmann::json taus = nlohmann::json::array();
  std::vector<double> defined;
  for (const auto& tau : report.kendall_taus) {
    if (tau) {
      taus.push_back(*tau);
      defined.push_back(*tau);
    } else {
      taus.push_back(nullptr);
    }
  }
  nlohmann::json tau_summary = {{"values", taus}, {"undefined", report.kendall_taus.size() - defined.size()}};
  if (!defined.empty()) {
    std::vector<double> sorted = defined;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (const double v : sorted) sum += v;
    tau_summary["mean"] = sum / static_cast<double>(sorted.size());
    tau_summary["median"] = quantile(sorted, 0.5);
  }
  return {
      {"schema", kStabilitySchema},
      {"scheme", to_string(report.scheme)},
      {"runtime_mode", to_string(report.runtime_mode)},
      {"alpha", report.alpha},
      {"replicates", report.replicates},
      {"seed", report.seed},
      {"resampling", "cases with replacement, shared across teams"},
      {"teams", teams},
      {"kendall_tau", tau_summary},
  };
}

std::string significance_csv(const SignificanceMatrix& matrix) {
  std::ostringstream out;
  out << "# schema=" << kSignificanceSchema << " alpha=" << format_double(matrix.alpha)
      << " test=one-sided wilcoxon signed-rank, row better than column\n";
  out << "team";
  for (const auto& t : matrix.teams) out << ',' << csv_cell(t);
  out << '\n';
  for (std::size_t i = 0; i < matrix.teams.size(); ++i) {
    out << csv_cell(matrix.teams[i]);
    for (std::size_t j = 0; j < matrix.teams.size(); ++j) {
      const auto p = matrix.p(i, j);
      out << ',' << (p ? format_double(*p) : std::string{});
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace cellbench::report
