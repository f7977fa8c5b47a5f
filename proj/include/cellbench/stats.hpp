#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cellbench/ranking.hpp"

namespace cellbench {

inline constexpr std::size_t kDefaultBootstrapReplicates = 1000;
/// Largest number of nonzero differences for which the Wilcoxon null
/// distribution is enumerated exactly; beyond it the normal approximation is used.
inline constexpr std::size_t kWilcoxonExactLimit = 25;

/// Kendall's tau-b between two rankings of the same items. Returns nullopt
/// when either ranking is entirely tied.
std::optional<double> kendall_tau(std::span<const double> rank_a, std::span<const double> rank_b);

/// One-sided p-value P(W+ >= observed) of the Wilcoxon signed-rank test for
/// "the differences are shifted above zero". Zero differences are dropped and
/// tied magnitudes receive average ranks. Throws when every difference is zero.
double wilcoxon_one_sided_p(std::span<const double> diffs);
std::optional<double> wilcoxon_one_sided_p_or_none(std::span<const double> diffs);

/// Signed-rank statistic W+ for the nonzero differences (average ranks on ties).
double wilcoxon_w_plus(std::span<const double> diffs);

struct SignificanceMatrix {
  std::vector<std::string> teams;
  double alpha = kDefaultAlpha;
  /// p_values[i * K + j]: team i's F1 exceeds team j's. Diagonal and
  /// all-zero-difference pairs are nullopt.
  std::vector<std::optional<double>> p_values;

  std::optional<double> p(std::size_t row, std::size_t col) const {
    return p_values.at(row * teams.size() + col);
  }
  bool significant(std::size_t row, std::size_t col) const {
    const auto v = p(row, col);
    return v.has_value() && *v < alpha;
  }
};

SignificanceMatrix significance_matrix(const RankingTable& table, double alpha = kDefaultAlpha);

struct BootstrapConfig {
  std::size_t replicates = kDefaultBootstrapReplicates;
  std::uint64_t seed = 0;
  /// Worker threads; results do not depend on this value.
  unsigned threads = 1;

  void validate() const;
};

struct StabilityReport {
  Scheme scheme = Scheme::rank_then_mean;
  RuntimeMode runtime_mode = RuntimeMode::subtract_floor;
  double alpha = kDefaultAlpha;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> teams;
  std::vector<int> full_ranks;
  /// rank_frequency[team][r - 1]: fraction of replicates placing the team at rank r.
  std::vector<std::vector<double>> rank_frequency;
  std::vector<double> median_rank;
  std::vector<std::pair<double, double>> ci95;
  /// One entry per replicate; nullopt when tau-b is undefined (full ties).
  std::vector<std::optional<double>> kendall_taus;
};

/// Case indices drawn with replacement for replicate `replicate`, from a
/// substream that depends only on (seed, replicate).
std::vector<std::size_t> bootstrap_case_sample(std::size_t case_count, std::uint64_t seed,
                                               std::size_t replicate);

StabilityReport bootstrap_ranking_stability(const RankingTable& table, const BootstrapConfig& cfg,
                                            Scheme scheme, const RankingOptions& options = {});

/// Linear-interpolation quantile (type 7) of unsorted values.
double quantile(std::vector<double> values, double q);

}  // namespace cellbench
