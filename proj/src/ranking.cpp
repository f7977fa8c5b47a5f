#include "cellbench/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <unordered_map>

#include "cellbench/stats.hpp"

namespace cellbench {

namespace {

// Order-independent sum: sorting first makes the result invariant under any
// permutation of the inputs.
double stable_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (const double v : values) total += v;
  return total;
}

double aggregate(std::vector<double> values, Aggregate agg) {
  if (values.empty()) return 0.0;
  if (agg == Aggregate::mean) {
    const auto n = static_cast<double>(values.size());
    return stable_sum(std::move(values)) / n;
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Fractional ranks where missing entries are worse than every present entry
// and tie among themselves.
std::vector<double> ranks_with_missing(std::span<const double> values,
                                       std::span<const std::uint8_t> missing,
                                       bool higher_is_better) {
  const std::size_t k = values.size();
  std::vector<double> present;
  std::vector<std::size_t> present_idx;
  for (std::size_t i = 0; i < k; ++i) {
    if (missing[i] == 0) {
      present.push_back(values[i]);
      present_idx.push_back(i);
    }
  }
  std::vector<double> out(k, 0.0);
  const std::vector<double> r = fractional_ranks(present, higher_is_better);
  for (std::size_t j = 0; j < present_idx.size(); ++j) out[present_idx[j]] = r[j];
  const std::size_t m = present.size();
  if (m < k) {
    const double shared = 0.5 * static_cast<double>((m + 1) + k);
    for (std::size_t i = 0; i < k; ++i) {
      if (missing[i] != 0) out[i] = shared;
    }
  }
  return out;
}

LeaderBoard make_board(const RankingTable& table, Scheme scheme, RuntimeMode mode, double alpha,
                       std::vector<double> scores, bool higher_is_better) {
  LeaderBoard board;
  board.scheme = scheme;
  board.runtime_mode = mode;
  board.alpha = alpha;
  board.teams = table.teams();
  board.ranks = competition_ranks(scores, higher_is_better);
  board.scores = std::move(scores);
  return board;
}

void require_teams(const RankingTable& table) {
  if (table.team_count() < 2) throw std::invalid_argument("ranking needs at least 2 teams");
  if (table.case_count() < 1) throw std::invalid_argument("ranking needs at least 1 case");
}

}  // namespace

std::string to_string(RuntimeMode mode) {
  return mode == RuntimeMode::subtract_floor ? "subtract" : "cap";
}

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::rank_then_mean: return "rank_then_mean";
    case Scheme::rank_then_median: return "rank_then_median";
    case Scheme::mean_then_rank: return "mean_then_rank";
    case Scheme::median_then_rank: return "median_then_rank";
    case Scheme::test_based: return "test_based";
  }
  return "rank_then_mean";
}

RuntimeMode parse_runtime_mode(const std::string& text) {
  if (text == "subtract" || text == "subtract_floor") return RuntimeMode::subtract_floor;
  if (text == "cap" || text == "hard_cap") return RuntimeMode::hard_cap;
  throw std::invalid_argument("unknown runtime mode '" + text + "'");
}

Scheme parse_scheme(const std::string& text) {
  for (const Scheme s : all_schemes()) {
    if (to_string(s) == text) return s;
  }
  throw std::invalid_argument("unknown ranking scheme '" + text + "'");
}

const std::vector<Scheme>& all_schemes() {
  static const std::vector<Scheme> schemes{Scheme::rank_then_mean, Scheme::rank_then_median,
                                           Scheme::mean_then_rank, Scheme::median_then_rank,
                                           Scheme::test_based};
  return schemes;
}

double tolerance_seconds(std::uint64_t pixel_count) {
  if (pixel_count <= kToleranceBasePixels) return kToleranceSecondsPerMegapixel;
  return static_cast<double>(pixel_count) / static_cast<double>(kToleranceBasePixels) *
         kToleranceSecondsPerMegapixel;
}

double effective_runtime(double runtime_seconds, std::uint64_t pixel_count, RuntimeMode mode) {
  const double tol = tolerance_seconds(pixel_count);
  if (mode == RuntimeMode::subtract_floor) return std::max(runtime_seconds - tol, 0.0);
  return runtime_seconds <= tol ? runtime_seconds : kOverLimit;
}

double effective_runtime(const RunRecord& record, RuntimeMode mode) {
  return effective_runtime(record.runtime_seconds, record.pixel_count, mode);
}

// --- RankingTable ----------------------------------------------------------

RankingTable::RankingTable(std::vector<std::string> teams, std::vector<std::string> cases)
    : teams_(std::move(teams)), cases_(std::move(cases)) {
  const std::size_t n = teams_.size() * cases_.size();
  f1_.assign(n, 0.0);
  runtime_.assign(n, 0.0);
  missing_.assign(n, 1);
  pixels_.assign(cases_.size(), 1);
}

RankingTable RankingTable::from_records(std::span<const RunRecord> records) {
  std::vector<std::string> teams;
  std::vector<std::string> cases;
  std::unordered_map<std::string, std::size_t> team_idx;
  std::unordered_map<std::string, std::size_t> case_idx;
  for (const RunRecord& r : records) {
    if (team_idx.emplace(r.team_id, teams.size()).second) teams.push_back(r.team_id);
    if (case_idx.emplace(r.case_id, cases.size()).second) cases.push_back(r.case_id);
  }
  RankingTable table(std::move(teams), std::move(cases));
  for (const RunRecord& r : records) {
    const std::size_t t = team_idx.at(r.team_id);
    const std::size_t c = case_idx.at(r.case_id);
    if (!table.missing(t, c)) {
      throw std::invalid_argument("duplicate record for team '" + r.team_id + "', case '" +
                                  r.case_id + "'");
    }
    table.set(t, c, r.f1, r.runtime_seconds, r.pixel_count);
  }
  return table;
}

std::size_t RankingTable::at(std::size_t team, std::size_t case_index) const {
  if (team >= teams_.size() || case_index >= cases_.size()) {
    throw std::out_of_range("ranking table index out of range");
  }
  return team * cases_.size() + case_index;
}

void RankingTable::set(std::size_t team, std::size_t case_index, double f1, double runtime_seconds,
                       std::uint64_t pixel_count) {
  if (!(f1 >= 0.0 && f1 <= 1.0)) throw std::invalid_argument("f1 must lie in [0, 1]");
  if (!(runtime_seconds >= 0.0)) throw std::invalid_argument("runtime must be non-negative");
  if (pixel_count < 1) throw std::invalid_argument("pixel_count must be at least 1");
  const std::size_t i = at(team, case_index);
  f1_[i] = f1;
  runtime_[i] = runtime_seconds;
  missing_[i] = 0;
  pixels_[case_index] = pixel_count;
}

RunRecord RankingTable::record(std::size_t team, std::size_t case_index) const {
  return RunRecord{teams_.at(team), cases_.at(case_index), f1(team, case_index),
                   runtime(team, case_index), pixel_count(case_index)};
}

RankingTable RankingTable::select_cases(std::span<const std::size_t> case_indices) const {
  std::vector<std::string> ids;
  ids.reserve(case_indices.size());
  for (std::size_t j = 0; j < case_indices.size(); ++j) {
    ids.push_back(cases_.at(case_indices[j]) + "#" + std::to_string(j));
  }
  RankingTable out(teams_, std::move(ids));
  for (std::size_t t = 0; t < teams_.size(); ++t) {
    for (std::size_t j = 0; j < case_indices.size(); ++j) {
      const std::size_t src = at(t, case_indices[j]);
      const std::size_t dst = out.at(t, j);
      out.f1_[dst] = f1_[src];
      out.runtime_[dst] = runtime_[src];
      out.missing_[dst] = missing_[src];
    }
  }
  for (std::size_t j = 0; j < case_indices.size(); ++j) out.pixels_[j] = pixels_[case_indices[j]];
  return out;
}

std::size_t RankingTable::missing_count() const {
  return static_cast<std::size_t>(std::count(missing_.begin(), missing_.end(), 1));
}

// --- rank helpers ----------------------------------------------------------

std::vector<double> fractional_ranks(std::span<const double> values, bool higher_is_better) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return higher_is_better ? values[a] > values[b] : values[a] < values[b];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>((i + 1) + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = shared;
    i = j;
  }
  return ranks;
}

std::vector<int> competition_ranks(std::span<const double> scores, bool higher_is_better) {
  const std::size_t n = scores.size();
  std::vector<int> ranks(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    int better = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (higher_is_better ? scores[j] > scores[i] : scores[j] < scores[i]) ++better;
    }
    ranks[i] = better + 1;
  }
  return ranks;
}

RankMatrix per_case_ranks(const RankingTable& table, RuntimeMode mode) {
  require_teams(table);
  const std::size_t k = table.team_count();
  const std::size_t n = table.case_count();
  RankMatrix m{k, 2 * n, std::vector<double>(k * 2 * n, 0.0)};
  std::vector<double> f1(k);
  std::vector<double> rt(k);
  std::vector<std::uint8_t> missing(k);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t t = 0; t < k; ++t) {
      missing[t] = table.missing(t, c) ? 1 : 0;
      f1[t] = table.f1(t, c);
      rt[t] = missing[t] != 0 ? 0.0 : effective_runtime(table.runtime(t, c), table.pixel_count(c), mode);
    }
    const auto f1_ranks = ranks_with_missing(f1, missing, true);
    const auto rt_ranks = ranks_with_missing(rt, missing, false);
    for (std::size_t t = 0; t < k; ++t) {
      m.values[t * m.columns + 2 * c] = f1_ranks[t];
      m.values[t * m.columns + 2 * c + 1] = rt_ranks[t];
    }
  }
  return m;
}

LeaderBoard rank_then_aggregate(const RankingTable& table, Aggregate agg, RuntimeMode mode) {
  const RankMatrix m = per_case_ranks(table, mode);
  const auto k = static_cast<double>(table.team_count());
  std::vector<double> scores(table.team_count());
  for (std::size_t t = 0; t < table.team_count(); ++t) {
    std::vector<double> row(m.values.begin() + static_cast<std::ptrdiff_t>(t * m.columns),
                            m.values.begin() + static_cast<std::ptrdiff_t>((t + 1) * m.columns));
    scores[t] = aggregate(std::move(row), agg) / k;
  }
  const Scheme scheme = agg == Aggregate::mean ? Scheme::rank_then_mean : Scheme::rank_then_median;
  return make_board(table, scheme, mode, kDefaultAlpha, std::move(scores), false);
}

LeaderBoard aggregate_then_rank(const RankingTable& table, Aggregate agg, RuntimeMode mode) {
  require_teams(table);
  const std::size_t k = table.team_count();
  std::vector<double> f1_agg(k);
  std::vector<double> rt_agg(k);
  for (std::size_t t = 0; t < k; ++t) {
    std::vector<double> f1s;
    std::vector<double> rts;
    for (std::size_t c = 0; c < table.case_count(); ++c) {
      if (table.missing(t, c)) {
        f1s.push_back(0.0);
        rts.push_back(kOverLimit);
      } else {
        f1s.push_back(table.f1(t, c));
        rts.push_back(effective_runtime(table.runtime(t, c), table.pixel_count(c), mode));
      }
    }
    f1_agg[t] = aggregate(std::move(f1s), agg);
    rt_agg[t] = aggregate(std::move(rts), agg);
  }
  const auto f1_ranks = fractional_ranks(f1_agg, true);
  const auto rt_ranks = fractional_ranks(rt_agg, false);
  std::vector<double> scores(k);
  for (std::size_t t = 0; t < k; ++t) scores[t] = 0.5 * (f1_ranks[t] + rt_ranks[t]);
  const Scheme scheme = agg == Aggregate::mean ? Scheme::mean_then_rank : Scheme::median_then_rank;
  return make_board(table, scheme, mode, kDefaultAlpha, std::move(scores), false);
}

LeaderBoard test_based_rank(const RankingTable& table, double alpha) {
  require_teams(table);
  const std::size_t k = table.team_count();
  std::vector<double> wins(k, 0.0);
  std::vector<double> diffs;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      diffs.clear();
      for (std::size_t c = 0; c < table.case_count(); ++c) {
        if (table.missing(i, c) || table.missing(j, c)) continue;
        diffs.push_back(table.f1(i, c) - table.f1(j, c));
      }
      if (diffs.size() < kMinSharedCasesForTestRanking) {
        throw std::invalid_argument("insufficient shared cases between '" + table.teams()[i] +
                                    "' and '" + table.teams()[j] + "' for test-based ranking");
      }
      const std::optional<double> p = wilcoxon_one_sided_p_or_none(diffs);
      if (p && *p < alpha) wins[i] += 1.0;
    }
  }
  return make_board(table, Scheme::test_based, RuntimeMode::subtract_floor, alpha, std::move(wins),
                    true);
}

LeaderBoard compute_leaderboard(const RankingTable& table, Scheme scheme,
                                const RankingOptions& options) {
  LeaderBoard board;
  switch (scheme) {
    case Scheme::rank_then_mean:
      board = rank_then_aggregate(table, Aggregate::mean, options.runtime_mode);
      break;
    case Scheme::rank_then_median:
      board = rank_then_aggregate(table, Aggregate::median, options.runtime_mode);
      break;
    case Scheme::mean_then_rank:
      board = aggregate_then_rank(table, Aggregate::mean, options.runtime_mode);
      break;
    case Scheme::median_then_rank:
      board = aggregate_then_rank(table, Aggregate::median, options.runtime_mode);
      break;
    case Scheme::test_based:
      board = test_based_rank(table, options.alpha);
      break;
  }
  board.runtime_mode = options.runtime_mode;
  board.alpha = options.alpha;
  return board;
}

}  // namespace cellbench
