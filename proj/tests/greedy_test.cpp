#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "haargc/closed_form.hpp"
#include "haargc/greedy.hpp"
#include "oracles.hpp"

namespace haargc {
namespace {

DyadicIndex I(std::uint32_t n, std::uint64_t k) { return DyadicIndex::interval(n, k); }
const DyadicIndex C = DyadicIndex::constant();

HaarExpansion sample(Exponent p) { return HaarExpansion(p, {{C, 0.5}, {I(0, 0), -2.0}, {I(1, 0), 0.5}}); }

TEST(GreedyOrdering, MagnitudeThenNaturalRank) {
  const auto rho = greedy_ordering(sample(Exponent(2.0)));
  EXPECT_EQ(rho.order, (std::vector<DyadicIndex>{I(0, 0), C, I(1, 0)}));
  EXPECT_EQ(rho.rearrangement(1), 2.0);
  EXPECT_EQ(rho.rearrangement(2), 0.5);
  EXPECT_EQ(rho.rearrangement(4), 0.0);
  EXPECT_THROW((void)rho.rearrangement(0), std::invalid_argument);
}

TEST(GreedyOrdering, SingleAndEmpty) {
  const auto rho = greedy_ordering(HaarExpansion(Exponent(2.0), {{C, 1.0}}));
  EXPECT_EQ(rho.order, std::vector<DyadicIndex>{C});
  EXPECT_EQ(rho.rearrangement(1), 1.0);
  EXPECT_EQ(greedy_ordering(HaarExpansion(Exponent(2.0))).size(), 0U);
}

TEST(GreedyOrdering, DistinctMagnitudesIgnoreRank) {
  const HaarExpansion f(Exponent(3.0), {{C, 0.1}, {I(0, 0), -0.3}, {I(2, 3), 0.7}, {I(1, 1), 0.2}});
  EXPECT_EQ(greedy_ordering(f).order, (std::vector<DyadicIndex>{I(2, 3), I(0, 0), I(1, 1), C}));
}

TEST(GreedySum, Examples) {
  const HaarExpansion f = sample(Exponent(2.0));
  EXPECT_TRUE(greedy_sum(f, 0).empty());
  EXPECT_EQ(greedy_sum(f, 1), HaarExpansion(Exponent(2.0), {{I(0, 0), -2.0}}));
  EXPECT_EQ(greedy_sum(f, 3), f);
  EXPECT_EQ(greedy_sum(f, 10), f);
}

TEST(Project, Examples) {
  const HaarExpansion f = sample(Exponent(2.0));
  EXPECT_TRUE(project(f, std::set<DyadicIndex>{}).empty());
  EXPECT_EQ(project(f, f.support()), f);
  EXPECT_TRUE(project(f, std::set<DyadicIndex>{I(3, 2), I(1, 1)}).empty());
  const HaarExpansion once = project(f, std::set<DyadicIndex>{C, I(1, 0)});
  EXPECT_EQ(project(once, std::set<DyadicIndex>{C, I(1, 0)}), once);
}

TEST(SignFlip, Examples) {
  const Exponent p(3.0);
  const HaarExpansion f = sample(p);
  const auto support = f.support();
  EXPECT_EQ(sign_flip(f, SignPattern::uniform(support, 1)), f);
  const HaarExpansion neg = sign_flip(f, SignPattern::uniform(support, -1));
  EXPECT_EQ(neg, -1.0 * f);
  EXPECT_NEAR(norm(neg), norm(f), 1e-14);

  SignPattern partial;
  partial.set(C, 1);
  EXPECT_THROW((void)sign_flip(f, partial), std::invalid_argument);
  EXPECT_THROW(partial.set(C, 0), std::invalid_argument);
}

TEST(SignFlip, PreservesNormAtP2) {
  std::mt19937_64 rng(3);
  const Exponent p(2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const HaarExpansion f = oracle::random_expansion(rng, p, 6);
    SignPattern eps;
    for (const auto& [idx, c] : f.coefficients()) eps.set(idx, std::bernoulli_distribution(0.5)(rng) ? 1 : -1);
    EXPECT_NEAR(norm(sign_flip(f, eps)), norm(f), 1e-12);
    EXPECT_EQ(sign_flip(sign_flip(f, eps), eps), f);
  }
}

TEST(LebesgueRatio, GreedyCompetitorGivesOne) {
  const Exponent p(3.0);
  const HaarExpansion f = sample(p);
  const auto rho = greedy_ordering(f);
  const std::vector<DyadicIndex> A(rho.order.begin(), rho.order.begin() + 2);
  const std::vector<double> a{f.coefficient(A[0]), f.coefficient(A[1])};
  EXPECT_DOUBLE_EQ(lebesgue_ratio(f, 2, A, a), 1.0);
}

TEST(LebesgueRatio, Errors) {
  const Exponent p(3.0);
  const HaarExpansion f = sample(p);
  const std::vector<DyadicIndex> A{I(0, 0)};
  EXPECT_THROW((void)lebesgue_ratio(f, 2, A, std::vector<double>{1.0}), std::invalid_argument);
  const std::vector<DyadicIndex> dup{C, C};
  EXPECT_THROW((void)lebesgue_ratio(f, 2, dup, std::vector<double>{1.0, 1.0}), std::invalid_argument);
  const auto all = greedy_ordering(f).order;
  std::vector<double> exact;
  for (const auto& idx : all) exact.push_back(f.coefficient(idx));
  EXPECT_THROW((void)lebesgue_ratio(f, 3, all, exact), ExactCompetitor);
}

TEST(LebesgueRatio, ChainAgainstDisjointFamily) {
  // f = chain + 1.01 * family; greedy keeps the family, the competitor removes the chain.
  const Exponent p(4.0);
  const std::size_t m = 8;
  const auto chain = nested_chain_indices(m);
  const auto fam = disjoint_family_indices(m, 1);
  HaarExpansion f(p);
  for (const auto& idx : chain) f.set(idx, 1.0);
  for (const auto& idx : fam) f.set(idx, 1.01);
  const std::vector<double> ones(m, 1.0);
  const double expected = static_cast<double>(oracle::midpoint_norm(oracle::ones(chain), 4.0L, 12) /
                                              (1.01L * oracle::midpoint_norm(oracle::ones(fam), 4.0L, 12)));
  EXPECT_NEAR(lebesgue_ratio(f, m, chain, ones), expected, 1e-12);
}

// Invariants over random inputs.

TEST(GreedyProperties, RearrangementAndIncrements) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    const HaarExpansion f = oracle::random_expansion(rng, Exponent(1.5), 6);
    const auto rho = greedy_ordering(f);
    ASSERT_EQ(rho.size(), f.size());
    const auto support = f.support();
    EXPECT_EQ(std::set<DyadicIndex>(rho.order.begin(), rho.order.end()),
              std::set<DyadicIndex>(support.begin(), support.end()));
    for (std::size_t m = 1; m < rho.size(); ++m) {
      EXPECT_GE(rho.magnitudes[m - 1], rho.magnitudes[m]);
      if (rho.magnitudes[m - 1] == rho.magnitudes[m]) {
        EXPECT_LT(rho.order[m - 1], rho.order[m]);
      }
    }
    for (std::size_t m = 1; m <= rho.size(); ++m) {
      const HaarExpansion step = greedy_sum(f, m) - greedy_sum(f, m - 1);
      ASSERT_EQ(step.size(), 1U);
      EXPECT_EQ(std::abs(step.coefficients().begin()->second), rho.rearrangement(m));
    }
    const auto again = greedy_ordering(f);
    EXPECT_EQ(again.order, rho.order);
    EXPECT_EQ(again.magnitudes, rho.magnitudes);
  }
}

TEST(GreedyProperties, TiesFollowNaturalRank) {
  HaarExpansion f(Exponent(2.0));
  for (std::uint64_t r : {9U, 2U, 0U, 5U}) f.set(from_natural_rank(r), r % 2 == 0 ? 1.0 : -1.0);
  const auto rho = greedy_ordering(f);
  std::vector<std::uint64_t> ranks;
  for (const auto& idx : rho.order) ranks.push_back(natural_rank(idx));
  EXPECT_EQ(ranks, (std::vector<std::uint64_t>{0, 2, 5, 9}));
}

TEST(GreedyProperties, OptimalAtP2) {
  std::mt19937_64 rng(31);
  const Exponent p(2.0);
  for (int trial = 0; trial < 60; ++trial) {
    const HaarExpansion f = oracle::random_expansion(rng, p, 4);
    const auto support = greedy_ordering(f).order;
    const std::size_t n = support.size();
    for (std::size_t m = 0; m <= n; ++m) {
      const double greedy_err = norm(f - greedy_sum(f, m));
      double best = HUGE_VAL;
      for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != m) continue;
        std::set<DyadicIndex> A;
        for (std::size_t j = 0; j < n; ++j) {
          if ((mask >> j) & 1U) A.insert(support[j]);
        }
        best = std::min(best, norm(f - project(f, A)));
      }
      EXPECT_NEAR(greedy_err, best, 1e-12);
    }
  }
}

TEST(GreedyProperties, BurkholderSampling) {
  std::mt19937_64 rng(37);
  for (double pv : {1.1, 1.5, 3.0, 8.0}) {
    const Exponent p(pv);
    for (int trial = 0; trial < 100; ++trial) {
      const HaarExpansion f = oracle::random_expansion(rng, p, 6);
      SignPattern eps;
      for (const auto& [idx, c] : f.coefficients()) eps.set(idx, std::bernoulli_distribution(0.5)(rng) ? 1 : -1);
      EXPECT_LE(norm(sign_flip(f, eps)), (p.star() - 1.0) * norm(f) + 1e-9);
    }
  }
}

}  // namespace
}  // namespace haargc
