#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cellbench/report.hpp"
#include "cellbench/stats.hpp"
#include "support/oracles.hpp"

using namespace cellbench;

namespace {

RankingTable table_from(const std::vector<std::vector<double>>& f1) {
  std::vector<std::string> teams;
  std::vector<std::string> cases;
  for (std::size_t t = 0; t < f1.size(); ++t) teams.push_back("T" + std::to_string(t));
  for (std::size_t c = 0; c < f1[0].size(); ++c) cases.push_back("c" + std::to_string(c));
  RankingTable table(teams, cases);
  for (std::size_t t = 0; t < f1.size(); ++t) {
    for (std::size_t c = 0; c < f1[t].size(); ++c) table.set(t, c, f1[t][c], 5.0, 1'000'000);
  }
  return table;
}

RankingTable noisy_table(std::uint64_t seed, std::size_t teams, std::size_t cases, double noise) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, noise);
  std::vector<std::string> tn;
  std::vector<std::string> cn;
  for (std::size_t t = 0; t < teams; ++t) tn.push_back("team" + std::to_string(t));
  for (std::size_t c = 0; c < cases; ++c) cn.push_back("case" + std::to_string(c));
  RankingTable table(tn, cn);
  for (std::size_t t = 0; t < teams; ++t) {
    for (std::size_t c = 0; c < cases; ++c) {
      const double base = t == 0 ? 0.98 : 0.9 - 0.025 * static_cast<double>(t);
      const double f1 = t == 0 ? base : std::clamp(base + jitter(rng), 0.0, 0.97);
      const double rt = t == 0 ? 1.0 : 12.0 + static_cast<double>(t) + std::fabs(jitter(rng)) * 10.0;
      table.set(t, c, f1, rt, 1'000'000);
    }
  }
  return table;
}

}  // namespace

TEST_CASE("kendall tau examples") {
  const std::vector<double> a{1, 2, 3};
  CHECK(kendall_tau(a, a).value() == 1.0);
  CHECK(kendall_tau(a, std::vector<double>{3, 2, 1}).value() == -1.0);
  CHECK(kendall_tau(a, std::vector<double>{2, 1, 3}).value() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_FALSE(kendall_tau(std::vector<double>{1, 1, 1}, a).has_value());
  CHECK_THROWS(kendall_tau(std::vector<double>{1}, std::vector<double>{1}));
  CHECK_THROWS(kendall_tau(a, std::vector<double>{1, 2}));
}

TEST_CASE("kendall tau-b with ties matches the pair-count definition") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> v(1, 5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + trial % 12;
    std::vector<double> a(n);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = v(rng);
      b[i] = v(rng);
    }
    double conc = 0;
    double disc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double s = (a[i] - a[j]) * (b[i] - b[j]);
        conc += s > 0;
        disc += s < 0;
      }
    }
    double n1 = 0;
    double n2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        n1 += a[i] != a[j];
        n2 += b[i] != b[j];
      }
    }
    const auto tau = kendall_tau(a, b);
    if (n1 == 0 || n2 == 0) {
      REQUIRE_FALSE(tau.has_value());
    } else {
      REQUIRE(tau.value() == doctest::Approx((conc - disc) / std::sqrt(n1 * n2)).epsilon(1e-12));
    }
  }
}

TEST_CASE("kendall tau of a tie-free ranking with itself and its reverse") {
  std::mt19937_64 rng(4);
  for (std::size_t n = 2; n < 30; ++n) {
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = static_cast<double>(i + 1);
    std::shuffle(a.begin(), a.end(), rng);
    std::vector<double> rev(a);
    for (auto& x : rev) x = static_cast<double>(n + 1) - x;
    REQUIRE(kendall_tau(a, a).value() == 1.0);
    REQUIRE(kendall_tau(a, rev).value() == -1.0);
  }
}

TEST_CASE("wilcoxon examples") {
  CHECK(wilcoxon_one_sided_p(std::vector<double>{1, 2, 3, 4, 5}) == 1.0 / 32.0);
  CHECK(wilcoxon_one_sided_p(std::vector<double>{1}) == 0.5);
  CHECK(wilcoxon_one_sided_p(std::vector<double>{1, 2}) == 0.25);
  CHECK(wilcoxon_w_plus(std::vector<double>{1, -2, 3}) == 4.0);
  CHECK_THROWS(wilcoxon_one_sided_p(std::vector<double>{0, 0}));
  CHECK_FALSE(wilcoxon_one_sided_p_or_none(std::vector<double>{0.0}).has_value());
  // zeros are dropped before ranking
  CHECK(wilcoxon_one_sided_p(std::vector<double>{0, 1, 2}) == 0.25);
}

TEST_CASE("exact wilcoxon equals 2^n enumeration for n <= 12") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> mag(1, 6);
  std::bernoulli_distribution sign(0.6);
  for (int n = 1; n <= 12; ++n) {
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<double> d(static_cast<std::size_t>(n));
      for (auto& x : d) x = (sign(rng) ? 1.0 : -1.0) * (trial % 2 == 0 ? mag(rng) : mag(rng) + 0.1 * mag(rng));
      REQUIRE(std::fabs(wilcoxon_one_sided_p(d) - oracle::wilcoxon_enumerated_p(d)) <= 1e-12);
    }
  }
}

TEST_CASE("normal approximation beyond the exact limit is close to the exact tail") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(-1.0, 1.5);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> x(26 + 4 * trial);
    for (auto& v : x) v = d(rng);
    // tie-free data: exact tail by counting subsets of {1..n} with sum >= W+
    const auto n = static_cast<int>(x.size());
    std::vector<double> counts(static_cast<std::size_t>(n * (n + 1) / 2 + 1), 0.0);
    counts[0] = 1.0;
    for (int r = 1; r <= n; ++r) {
      for (int s = static_cast<int>(counts.size()) - 1; s >= r; --s) counts[s] += counts[s - r];
    }
    const auto w = static_cast<std::size_t>(wilcoxon_w_plus(x));
    double tail = 0.0;
    for (std::size_t s = w; s < counts.size(); ++s) tail += counts[s];
    const double exact = tail / std::ldexp(1.0, n);
    const double p = wilcoxon_one_sided_p(x);
    CHECK(std::fabs(p - exact) < 0.01);
  }
}

TEST_CASE("significance matrix") {
  SUBCASE("i beats j on all 10 cases") {
    const auto m = significance_matrix(table_from({std::vector<double>(10, 0.9), std::vector<double>(10, 0.2)}));
    CHECK_FALSE(m.p(0, 0).has_value());
    CHECK(m.p(0, 1).value() == std::ldexp(1.0, -10));
    CHECK(m.p(1, 0).value() == 1.0);
    CHECK(m.significant(0, 1));
    CHECK_FALSE(m.significant(1, 0));
  }
  SUBCASE("identical vectors are undefined and not significant") {
    const auto m = significance_matrix(table_from({{0.3, 0.4, 0.5}, {0.3, 0.4, 0.5}}));
    CHECK_FALSE(m.p(0, 1).has_value());
    CHECK_FALSE(m.significant(0, 1));
  }
  SUBCASE("one-sided exclusivity") {
    const RankingTable t = noisy_table(3, 6, 15, 0.05);
    const auto m = significance_matrix(t);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) {
        if (i != j && m.significant(i, j)) REQUIRE_FALSE(m.significant(j, i));
      }
    }
  }
  SUBCASE("teams sharing no cases") {
    RankingTable t({"A", "B"}, {"c0", "c1"});
    t.set(0, 0, 0.5, 1, 10);
    t.set(1, 1, 0.5, 1, 10);
    CHECK_THROWS_AS(significance_matrix(t), std::invalid_argument);
  }
}

TEST_CASE("bootstrap sample streams") {
  const auto a = bootstrap_case_sample(50, 42, 3);
  CHECK(a == bootstrap_case_sample(50, 42, 3));
  CHECK(a != bootstrap_case_sample(50, 42, 4));
  CHECK(a != bootstrap_case_sample(50, 43, 3));
  for (const auto i : a) CHECK(i < 50);
}

TEST_CASE("bootstrap stability") {
  const RankingTable table = noisy_table(9, 8, 40, 0.02);
  SUBCASE("dominant team wins every replicate; frequencies sum to one") {
    const auto rep = bootstrap_ranking_stability(table, {200, 42, 1}, Scheme::rank_then_mean);
    CHECK(rep.rank_frequency[0][0] == 1.0);
    CHECK(rep.full_ranks[0] == 1);
    CHECK(rep.median_rank[0] == 1.0);
    CHECK(rep.ci95[0] == std::pair<double, double>{1.0, 1.0});
    for (const auto& row : rep.rank_frequency) {
      double sum = 0.0;
      for (const double f : row) sum += f;
      REQUIRE(std::fabs(sum - 1.0) <= 1e-12);
    }
    CHECK(rep.kendall_taus.size() == 200);
  }
  SUBCASE("thread count does not change the report") {
    for (const Scheme s : {Scheme::rank_then_mean, Scheme::median_then_rank, Scheme::test_based}) {
      const auto one = report::stability_json(bootstrap_ranking_stability(table, {60, 7, 1}, s)).dump();
      const auto four = report::stability_json(bootstrap_ranking_stability(table, {60, 7, 4}, s)).dump();
      REQUIRE(one == four);
    }
  }
  SUBCASE("one replicate with a fixed seed is reproducible") {
    const auto a = report::stability_json(bootstrap_ranking_stability(table, {1, 5, 1}, Scheme::rank_then_mean));
    const auto b = report::stability_json(bootstrap_ranking_stability(table, {1, 5, 1}, Scheme::rank_then_mean));
    CHECK(a.dump() == b.dump());
  }
  SUBCASE("perfectly separated teams give tau 1 in every replicate") {
    std::vector<std::vector<double>> f(5, std::vector<double>(20));
    for (std::size_t t = 0; t < 5; ++t) {
      for (std::size_t c = 0; c < 20; ++c) f[t][c] = 0.9 - 0.1 * static_cast<double>(t);
    }
    RankingTable sep = table_from(f);
    for (std::size_t t = 0; t < 5; ++t) {
      for (std::size_t c = 0; c < 20; ++c) sep.set(t, c, f[t][c], 11.0 + static_cast<double>(t), 1'000'000);
    }
    const auto rep = bootstrap_ranking_stability(sep, {50, 1, 1}, Scheme::rank_then_mean);
    for (const auto& tau : rep.kendall_taus) REQUIRE(tau.value() == 1.0);
  }
  SUBCASE("validation") {
    CHECK(kDefaultBootstrapReplicates == 1000);
    CHECK_THROWS(BootstrapConfig{0, 1, 1}.validate());
  }
}

TEST_CASE("mean kendall tau stays high when noise is far below team gaps") {
  const RankingTable table = noisy_table(21, 28, 100, 0.002);
  const auto rep = bootstrap_ranking_stability(table, {100, 42, 1}, Scheme::rank_then_mean);
  double sum = 0.0;
  for (const auto& tau : rep.kendall_taus) sum += tau.value();
  CHECK(sum / static_cast<double>(rep.kendall_taus.size()) > 0.9);
}

TEST_CASE("quantile") {
  CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(quantile({5}, 0.975) == 5.0);
  CHECK(quantile({1, 2, 3, 4, 5}, 0.025) == doctest::Approx(1.1));
}
