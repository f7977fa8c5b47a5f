#include "cellbench/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

namespace cellbench {

namespace {

struct SignedRanks {
  std::vector<std::int64_t> doubled_ranks;  // 2 x average rank, always integral
  std::vector<bool> positive;
  std::vector<std::size_t> tie_sizes;
};

SignedRanks signed_ranks(std::span<const double> diffs) {
  std::vector<double> nonzero;
  for (const double d : diffs) {
    if (!std::isfinite(d)) throw std::invalid_argument("wilcoxon: non-finite difference");
    if (d != 0.0) nonzero.push_back(d);
  }
  const std::size_t n = nonzero.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(nonzero[a]) < std::fabs(nonzero[b]);
  });
  SignedRanks out;
  out.doubled_ranks.assign(n, 0);
  out.positive.assign(n, false);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && std::fabs(nonzero[order[j]]) == std::fabs(nonzero[order[i]])) ++j;
    // positions i+1 .. j share the rank (i+1+j)/2
    const auto doubled = static_cast<std::int64_t>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) out.doubled_ranks[order[k]] = doubled;
    out.tie_sizes.push_back(j - i);
    i = j;
  }
  for (std::size_t k = 0; k < n; ++k) out.positive[k] = nonzero[k] > 0.0;
  return out;
}

double exact_upper_tail(const SignedRanks& sr, std::int64_t observed_doubled) {
  std::int64_t total = 0;
  for (const auto r : sr.doubled_ranks) total += r;
  // counts[s] = number of sign assignments whose positive doubled-rank sum is s
  std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
  counts[0] = 1.0;
  std::int64_t reach = 0;
  for (const auto r : sr.doubled_ranks) {
    reach += r;
    for (std::int64_t s = reach; s >= r; --s) {
      counts[static_cast<std::size_t>(s)] += counts[static_cast<std::size_t>(s - r)];
    }
  }
  double tail = 0.0;
  for (std::int64_t s = std::max<std::int64_t>(observed_doubled, 0); s <= total; ++s) {
    tail += counts[static_cast<std::size_t>(s)];
  }
  return tail / std::ldexp(1.0, static_cast<int>(sr.doubled_ranks.size()));
}

double normal_upper_tail(const SignedRanks& sr, double w_plus) {
  const auto n = static_cast<double>(sr.doubled_ranks.size());
  double tie_term = 0.0;
  for (const std::size_t t : sr.tie_sizes) {
    const auto td = static_cast<double>(t);
    tie_term += td * td * td - td;
  }
  const double mean = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  if (var <= 0.0) return w_plus >= mean ? 1.0 : 0.0;
  const double z = (w_plus - mean - 0.5) / std::sqrt(var);
  return std::clamp(0.5 * std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
}

std::int64_t observed_doubled(const SignedRanks& sr) {
  std::int64_t w = 0;
  for (std::size_t k = 0; k < sr.doubled_ranks.size(); ++k) {
    if (sr.positive[k]) w += sr.doubled_ranks[k];
  }
  return w;
}

}  // namespace

std::optional<double> kendall_tau(std::span<const double> rank_a, std::span<const double> rank_b) {
  if (rank_a.size() != rank_b.size()) {
    throw std::invalid_argument("kendall_tau: rankings cover different item counts");
  }
  if (rank_a.size() < 2) throw std::invalid_argument("kendall_tau: need at least 2 items");
  const std::size_t k = rank_a.size();
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t ties_a = 0;
  std::int64_t ties_b = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double da = rank_a[i] - rank_a[j];
      const double db = rank_b[i] - rank_b[j];
      if (da == 0.0) ++ties_a;
      if (db == 0.0) ++ties_b;
      if (da == 0.0 || db == 0.0) continue;
      if ((da > 0.0) == (db > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const auto pairs = static_cast<std::int64_t>(k * (k - 1) / 2);
  const double denom = std::sqrt(static_cast<double>(pairs - ties_a) *
                                 static_cast<double>(pairs - ties_b));
  if (denom == 0.0) return std::nullopt;
  return static_cast<double>(concordant - discordant) / denom;
}

double wilcoxon_w_plus(std::span<const double> diffs) {
  return 0.5 * static_cast<double>(observed_doubled(signed_ranks(diffs)));
}

std::optional<double> wilcoxon_one_sided_p_or_none(std::span<const double> diffs) {
  const SignedRanks sr = signed_ranks(diffs);
  if (sr.doubled_ranks.empty()) return std::nullopt;
  const std::int64_t w = observed_doubled(sr);
  if (sr.doubled_ranks.size() <= kWilcoxonExactLimit) return exact_upper_tail(sr, w);
  return normal_upper_tail(sr, 0.5 * static_cast<double>(w));
}

double wilcoxon_one_sided_p(std::span<const double> diffs) {
  const auto p = wilcoxon_one_sided_p_or_none(diffs);
  if (!p) throw std::invalid_argument("wilcoxon: all differences are zero");
  return *p;
}

SignificanceMatrix significance_matrix(const RankingTable& table, double alpha) {
  const std::size_t k = table.team_count();
  if (k < 2) throw std::invalid_argument("significance matrix needs at least 2 teams");
  SignificanceMatrix out{table.teams(), alpha, std::vector<std::optional<double>>(k * k)};
  std::vector<double> diffs;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      diffs.clear();
      for (std::size_t c = 0; c < table.case_count(); ++c) {
        if (table.missing(i, c) || table.missing(j, c)) continue;
        diffs.push_back(table.f1(i, c) - table.f1(j, c));
      }
      if (diffs.empty()) {
        throw std::invalid_argument("insufficient pairs: teams '" + table.teams()[i] + "' and '" +
                                    table.teams()[j] + "' share no cases");
      }
      out.p_values[i * k + j] = wilcoxon_one_sided_p_or_none(diffs);
    }
  }
  return out;
}

void BootstrapConfig::validate() const {
  if (replicates < 1) throw std::invalid_argument("bootstrap needs at least 1 replicate");
}

std::vector<std::size_t> bootstrap_case_sample(std::size_t case_count, std::uint64_t seed,
                                               std::size_t replicate) {
  const auto rep = static_cast<std::uint64_t>(replicate);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(rep >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<std::size_t> pick(0, case_count - 1);
  std::vector<std::size_t> sample(case_count);
  for (auto& s : sample) s = pick(rng);
  return sample;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

StabilityReport bootstrap_ranking_stability(const RankingTable& table, const BootstrapConfig& cfg,
                                            Scheme scheme, const RankingOptions& options) {
  cfg.validate();
  if (table.team_count() < 2) throw std::invalid_argument("bootstrap needs at least 2 teams");
  if (table.case_count() < 1) throw std::invalid_argument("bootstrap needs at least 1 case");
  const std::size_t k = table.team_count();
  const LeaderBoard full = compute_leaderboard(table, scheme, options);

  // ranks[r * k + t]: rank of team t in replicate r
  std::vector<int> ranks(cfg.replicates * k, 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t r = next++; r < cfg.replicates; r = next++) {
      try {
        const auto sample = bootstrap_case_sample(table.case_count(), cfg.seed, r);
        const LeaderBoard board = compute_leaderboard(table.select_cases(sample), scheme, options);
        std::copy(board.ranks.begin(), board.ranks.end(),
                  ranks.begin() + static_cast<std::ptrdiff_t>(r * k));
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1U, cfg.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  StabilityReport report;
  report.scheme = scheme;
  report.runtime_mode = options.runtime_mode;
  report.alpha = options.alpha;
  report.replicates = cfg.replicates;
  report.seed = cfg.seed;
  report.teams = table.teams();
  report.full_ranks = full.ranks;
  report.rank_frequency.assign(k, std::vector<double>(k, 0.0));
  const auto reps = static_cast<double>(cfg.replicates);
  std::vector<double> full_as_double(full.ranks.begin(), full.ranks.end());
  std::vector<double> replicate_ranks(k);
  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    for (std::size_t t = 0; t < k; ++t) {
      const int rank = ranks[r * k + t];
      report.rank_frequency[t][static_cast<std::size_t>(rank - 1)] += 1.0;
      replicate_ranks[t] = rank;
    }
    report.kendall_taus.push_back(kendall_tau(replicate_ranks, full_as_double));
  }
  for (std::size_t t = 0; t < k; ++t) {
    for (double& f : report.rank_frequency[t]) f /= reps;
    std::vector<double> team_ranks(cfg.replicates);
    for (std::size_t r = 0; r < cfg.replicates; ++r) team_ranks[r] = ranks[r * k + t];
    report.median_rank.push_back(quantile(team_ranks, 0.5));
    report.ci95.emplace_back(quantile(team_ranks, 0.025), quantile(team_ranks, 0.975));
  }
  return report;
}

}  // namespace cellbench
