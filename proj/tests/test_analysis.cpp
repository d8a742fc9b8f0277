#include <gtest/gtest.h>

#include <random>
#include <set>

#include "actbe/analysis.hpp"
#include "actbe/constructors.hpp"
#include "support/oracles.hpp"

using namespace actbe;

TEST(Verdicts, ThreePartyActivation) {
  const RhoN s = from_specification(Specification(3, {0, 0, 1}));
  EXPECT_TRUE(necessary_distillable(s, Grouping::parse(3, "1,2|3"), {1, 2}, {3}));
  EXPECT_FALSE(necessary_distillable(s, Grouping::singletons(3), {1}, {3}));
  EXPECT_TRUE(find_witness(s, Grouping::singletons(3), {1}, {3}).has_value());
}

TEST(Verdicts, GroupMembershipErrors) {
  const RhoN s = from_specification(Specification(3, {0, 0, 1}));
  EXPECT_THROW(distillable_between_groups(s, Grouping::parse(3, "1,2|3"), {1}, {2}), argument_error);
  EXPECT_THROW(distillable_between_groups(s, Grouping::parse(3, "1,2|3"), {1, 2}, {1, 2}), argument_error);
  EXPECT_THROW(distillable_between_groups(s, Grouping::parse(4, "1,2|3|4"), {1, 2}, {3}), argument_error);
}

TEST(Verdicts, ExampleOneTwoGroupSizes) {
  const RhoN s = example_state(ExampleId::I, 8, {.j = 3});
  EXPECT_TRUE(distillable_between_groups(s, Grouping::parse(8, "1,2,3|4,5,6,7,8"), {1, 2, 3}, {4, 5, 6, 7, 8}));
  EXPECT_FALSE(distillable_between_groups(s, Grouping::parse(8, "1,2,3,4|5,6,7,8"), {1, 2, 3, 4}, {5, 6, 7, 8}));
}

TEST(Verdicts, ExampleSeven) {
  const RhoN s = example_state(ExampleId::VII, 5);
  EXPECT_TRUE(distillable_between_groups(s, Grouping::parse(5, "1|2|3,4|5"), {1}, {2}));
  EXPECT_FALSE(distillable_between_groups(s, Grouping::parse(5, "1|2|3|4,5"), {1}, {2}));
}

TEST(Verdicts, ExampleFourClusters) {
  const RhoN s = example_state(ExampleId::IV, 20, {.j = 3});
  const Grouping g = Grouping::parse(20, "1,2,3|4,5,6,7|8,9|10|11|12|13|14|15|16|17|18|19|20");
  EXPECT_TRUE(distillable_between_groups(s, g, g[0], g[1]));
  EXPECT_FALSE(distillable_between_groups(s, g, g[2], g[0]));
  EXPECT_FALSE(distillable_between_groups(s, g, g[2], g[3]));
}

TEST(Verdicts, MatchBruteForceOracle) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 2 + trial % 8;
    const RhoN s = trial % 2 ? random_family_state(n, rng()) : [&] {
      std::vector<std::uint8_t> bits(splitting_count(n));
      for (auto& b : bits) b = rng() % 4 != 0;
      return from_specification(Specification(n, bits));
    }();
    const Grouping g = oracle::random_grouping(n, 1 + trial % 6, rng);
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = 0; j < g.size(); ++j) {
        if (i == j) continue;
        const Mask want = oracle::blocking_mask(s, g, g[i], g[j]);
        const auto w = find_witness(s, g, g[i], g[j]);
        EXPECT_EQ(w.has_value(), want != 0);
        if (w) EXPECT_EQ(w->mask(), want);
        EXPECT_EQ(distillable_between_groups(s, g, g[i], g[j]), want == 0);
      }
    }
  }
}

TEST(Verdicts, CoarseningIsMonotone) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 3 + trial % 6;
    const RhoN s = random_family_state(n, rng());
    const Grouping fine = oracle::random_grouping(n, 5, rng);
    if (fine.size() < 4) continue;
    // merge the last two groups
    std::vector<PartySet> merged(fine.groups().begin(), fine.groups().end() - 2);
    merged.push_back(fine[fine.size() - 2] | fine[fine.size() - 1]);
    const Grouping coarse(n, merged);
    for (std::size_t i = 0; i + 2 < fine.size(); ++i) {
      for (std::size_t j = i + 1; j + 2 < fine.size(); ++j) {
        if (distillable_between_groups(s, fine, fine[i], fine[j])) EXPECT_TRUE(distillable_between_groups(s, coarse, fine[i], fine[j]));
      }
    }
  }
}

TEST(Verdicts, SeparatePartiesNeedQuarterOfSplittings) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const int n = 3 + static_cast<int>(seed % 5);
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> bits(splitting_count(n));
    for (auto& b : bits) b = rng() % 8 != 0;
    const RhoN s = from_specification(Specification(n, bits));
    const Grouping g = Grouping::singletons(n);
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = i + 1; j < g.size(); ++j) {
        if (distillable_between_groups(s, g, g[i], g[j])) EXPECT_GE(Specification::from_state(s).count_ones(), std::size_t{1} << (n - 2));
      }
    }
  }
}

TEST(Verdicts, TwoGroupPartitionEqualsS) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int n = 2 + static_cast<int>(seed % 6);
    const RhoN s = random_family_state(n, seed);
    for (Mask k = 1; k <= splitting_count(n); ++k) {
      const Splitting sp(n, k);
      const Grouping g(n, {sp.side_a(), sp.side_b()});
      EXPECT_EQ(distillable_between_groups(s, g, sp.side_a(), sp.side_b()), s_coefficient(s, sp) == 1);
    }
  }
}

TEST(Ghz, ExampleSixSingleMaximalSet) {
  const RhoN s = example_state(ExampleId::VI, 4);
  const auto sets = ghz_groups(s, Grouping::parse(4, "1|2|3,4"));
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_EQ(sets[0], (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Ghz, GhzStateAllSeparate) {
  const RhoN s(5, 1.0, 0.0, std::vector<double>(15, 0.0));
  const auto sets = ghz_groups(s, Grouping::singletons(5));
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_EQ(sets[0].size(), 5u);
}

TEST(Ghz, ExampleFourBigClusters) {
  const RhoN s = example_state(ExampleId::IV, 10, {.j = 3});
  const Grouping g = Grouping::parse(10, "1,2,3|4,5|6,7,8|9,10");
  const auto sets = ghz_groups(s, g);
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_EQ(sets[0], (std::vector<std::size_t>{0, 2}));
}

TEST(Ghz, MatchesSubsetOracle) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 3 + trial % 6;
    std::vector<std::uint8_t> bits(splitting_count(n));
    for (auto& b : bits) b = rng() % 3 != 0;
    const RhoN s = from_specification(Specification(n, bits));
    const Grouping g = oracle::random_grouping(n, 6, rng);
    EXPECT_EQ(ghz_groups(s, g), oracle::ghz_sets(s, g)) << g.to_string();
  }
}

TEST(Report, WitnessesAndEmptyPairs) {
  const RhoN s = example_state(ExampleId::I, 8, {.j = 3});
  const auto r = grouping_report(s, Grouping::parse(8, "1,2|3,4,5,6,7,8"));
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_FALSE(r.pairs[0].distillable);
  ASSERT_TRUE(r.pairs[0].witness.has_value());
  EXPECT_EQ(s_coefficient(s, *r.pairs[0].witness), 0);
  EXPECT_TRUE(grouping_report(s, Grouping(8, {PartySet::all(8)})).pairs.empty());

  const RhoN v = example_state(ExampleId::V, 10);
  const auto rv = grouping_report(v, Grouping::parse(10, "1|2|3,4,5,6,7,8,9,10"));
  ASSERT_EQ(rv.pairs.size(), 3u);
  EXPECT_TRUE(rv.pairs[0].distillable);
}

TEST(SetPartitions, BellNumbersDistinctAndOrdered) {
  for (int n = 2; n <= 9; ++n) {
    std::set<std::string> seen;
    std::uint64_t count = 0;
    std::string previous;
    for_each_set_partition(n, [&](const Grouping& g) {
      ++count;
      // restricted growth string of this grouping
      std::string rgs;
      for (int p = 1; p <= n; ++p) rgs += static_cast<char>('0' + g.group_of(p));
      if (!previous.empty()) EXPECT_LT(previous, rgs);
      previous = rgs;
      seen.insert(g.to_string());
    });
    EXPECT_EQ(count, oracle::bell_number(n)) << n;
    EXPECT_EQ(seen.size(), count);
  }
}

TEST(Classify, ExampleThreeOnlyOneTwoGroupPartition) {
  const RhoN s = example_state(ExampleId::III, 5, {.members = {1, 3, 5}});
  ClassifyOptions opt;
  opt.filter = is_two_group;
  int hits = 0;
  for (const auto& r : classify_groupings(s, opt)) {
    ASSERT_EQ(r.pairs.size(), 1u);
    if (r.pairs[0].distillable) {
      ++hits;
      EXPECT_EQ(r.grouping.to_string(), "1,3,5|2,4");
    }
  }
  EXPECT_EQ(hits, 1);
}

TEST(Classify, ExampleTwoTwoGroupSizes) {
  const RhoN s = example_state(ExampleId::II, 10);
  ClassifyOptions opt;
  opt.filter = is_two_group;
  const auto reports = classify_groupings(s, opt);
  EXPECT_EQ(reports.size(), 511u);
  for (const auto& r : reports) {
    const int a = r.grouping[0].size();
    EXPECT_EQ(r.pairs[0].distillable, a >= 4 && a <= 6) << r.grouping.to_string();
  }
}

TEST(Classify, GuardRefusesLargeN) {
  EXPECT_THROW(classify_groupings(random_family_state(12, 1)), argument_error);
  ClassifyOptions opt;
  opt.guard = 3;
  EXPECT_THROW(classify_groupings(random_family_state(4, 1), opt), argument_error);
}

TEST(Search, AlwaysReturnsFirstCandidate) {
  const auto r = impossibility_search(3, requirements::always());
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(r.examined, 1u);
  EXPECT_EQ(r.witness->count_ones(), 3u);
  EXPECT_THROW(impossibility_search(7, requirements::always()), argument_error);
}

TEST(Search, ExampleSevenRequirementAcceptsExampleSeven) {
  EXPECT_TRUE(requirements::example_vii_activation()(example_specification(ExampleId::VII, 5)));
  EXPECT_FALSE(requirements::any_two_helpers_activate()(example_specification(ExampleId::VII, 5)));
}

TEST(Search, AnyTwoHelpersAtFourPartiesIsSatisfiable) {
  // With four parties (A3A4) is the only helper pair, so activation by that
  // single join is achievable.
  const auto r = impossibility_search(4, requirements::any_two_helpers_activate());
  ASSERT_TRUE(r.witness.has_value());
  const RhoN s = from_specification(*r.witness);
  EXPECT_TRUE(distillable_between_groups(s, Grouping::parse(4, "1|2|3,4"), {1}, {2}));
  for (const auto& p : grouping_report(s, Grouping::singletons(4)).pairs) EXPECT_FALSE(p.distillable);
}
