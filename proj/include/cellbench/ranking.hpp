#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace cellbench {

/// Per-image allowance for container start-up: 10 s up to one megapixel,
/// 10 s per megapixel beyond that.
inline constexpr double kToleranceSecondsPerMegapixel = 10.0;
inline constexpr std::uint64_t kToleranceBasePixels = 1'000'000;
inline constexpr double kDefaultAlpha = 0.05;
/// Shared cases required before the significance-count scheme is attempted.
inline constexpr std::size_t kMinSharedCasesForTestRanking = 6;

enum class RuntimeMode { subtract_floor, hard_cap };
enum class Aggregate { mean, median };
enum class Scheme { rank_then_mean, rank_then_median, mean_then_rank, median_then_rank, test_based };

std::string to_string(RuntimeMode mode);
std::string to_string(Scheme scheme);
RuntimeMode parse_runtime_mode(const std::string& text);
Scheme parse_scheme(const std::string& text);
const std::vector<Scheme>& all_schemes();

struct RunRecord {
  std::string team_id;
  std::string case_id;
  double f1 = 0.0;
  double runtime_seconds = 0.0;
  std::uint64_t pixel_count = 1;
};

double tolerance_seconds(std::uint64_t pixel_count);

/// Runtime after the tolerance is applied. `hard_cap` returns the raw runtime
/// when within tolerance and +infinity when over the limit.
double effective_runtime(const RunRecord& record, RuntimeMode mode);
double effective_runtime(double runtime_seconds, std::uint64_t pixel_count, RuntimeMode mode);

inline constexpr double kOverLimit = std::numeric_limits<double>::infinity();

/// Team x case matrices, stored team-major.
class RankingTable {
 public:
  RankingTable(std::vector<std::string> teams, std::vector<std::string> cases);

  /// Teams and cases appear in first-seen order; absent pairs are missing.
  static RankingTable from_records(std::span<const RunRecord> records);

  std::size_t team_count() const noexcept { return teams_.size(); }
  std::size_t case_count() const noexcept { return cases_.size(); }
  const std::vector<std::string>& teams() const noexcept { return teams_; }
  const std::vector<std::string>& cases() const noexcept { return cases_; }

  void set(std::size_t team, std::size_t case_index, double f1, double runtime_seconds,
           std::uint64_t pixel_count);

  double f1(std::size_t team, std::size_t case_index) const { return f1_[at(team, case_index)]; }
  double runtime(std::size_t team, std::size_t case_index) const {
    return runtime_[at(team, case_index)];
  }
  bool missing(std::size_t team, std::size_t case_index) const {
    return missing_[at(team, case_index)] != 0;
  }
  std::uint64_t pixel_count(std::size_t case_index) const { return pixels_.at(case_index); }

  RunRecord record(std::size_t team, std::size_t case_index) const;

  /// Table over the given case indices (repeats allowed); used by bootstrap.
  RankingTable select_cases(std::span<const std::size_t> case_indices) const;

  std::size_t missing_count() const;

 private:
  std::size_t at(std::size_t team, std::size_t case_index) const;

  std::vector<std::string> teams_;
  std::vector<std::string> cases_;
  std::vector<double> f1_;
  std::vector<double> runtime_;
  std::vector<std::uint8_t> missing_;
  std::vector<std::uint64_t> pixels_;
};

/// Teams x (2 * cases) fractional ranks. Column 2n holds the F1 rank on case
/// n, column 2n+1 the effective-runtime rank.
struct RankMatrix {
  std::size_t teams = 0;
  std::size_t columns = 0;
  std::vector<double> values;

  double at(std::size_t team, std::size_t column) const { return values.at(team * columns + column); }
};

struct LeaderBoard {
  Scheme scheme = Scheme::rank_then_mean;
  RuntimeMode runtime_mode = RuntimeMode::subtract_floor;
  double alpha = kDefaultAlpha;
  std::vector<std::string> teams;
  std::vector<double> scores;
  std::vector<int> ranks;  // competition ranking, 1 = best
};

struct RankingOptions {
  RuntimeMode runtime_mode = RuntimeMode::subtract_floor;
  double alpha = kDefaultAlpha;
};

/// Average ranks (1 = best) of `values`; ties share the mean of their
/// positions. `higher_is_better` flips the ordering.
std::vector<double> fractional_ranks(std::span<const double> values, bool higher_is_better);

/// Standard competition ranks ("1224") of scores; ties share the best rank.
std::vector<int> competition_ranks(std::span<const double> scores, bool higher_is_better);

RankMatrix per_case_ranks(const RankingTable& table, RuntimeMode mode = RuntimeMode::subtract_floor);

LeaderBoard rank_then_aggregate(const RankingTable& table, Aggregate agg,
                                RuntimeMode mode = RuntimeMode::subtract_floor);
LeaderBoard aggregate_then_rank(const RankingTable& table, Aggregate agg,
                                RuntimeMode mode = RuntimeMode::subtract_floor);
LeaderBoard test_based_rank(const RankingTable& table, double alpha = kDefaultAlpha);

LeaderBoard compute_leaderboard(const RankingTable& table, Scheme scheme,
                                const RankingOptions& options = {});

}  // namespace cellbench
