#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "mrpt/index.hpp"
#include "mrpt/synthetic.hpp"
#include "oracles.hpp"

namespace mrpt {
namespace {

ProjectionMatrix column(std::vector<float> values) {
  ProjectionMatrix p;
  p.rows = values.size();
  p.cols = 1;
  p.values = std::move(values);
  return p;
}

void expect_partition(const RPTree& tree, std::size_t n) {
  std::vector<PointId> seen(tree.leaf_indices.begin(), tree.leaf_indices.end());
  std::sort(seen.begin(), seen.end());
  std::vector<PointId> all(n);
  std::iota(all.begin(), all.end(), PointId{0});
  EXPECT_EQ(seen, all);
  std::size_t total = 0;
  for (std::size_t j = 0; j < tree.leaf_count(); ++j) total += tree.leaf(j).size();
  EXPECT_EQ(total, n);
}

TEST(MedianSplit, EvenCountUsesLowerMedian) {
  const std::vector<float> values{3.0f, 1.0f, 2.0f, 4.0f};
  const std::vector<PointId> ids{0, 1, 2, 3};
  const auto s = median_split(values, ids);
  EXPECT_EQ(s.split, 2.0f);
  EXPECT_EQ(s.left, (std::vector<PointId>{1, 2}));
  EXPECT_EQ(s.right, (std::vector<PointId>{0, 3}));
}

TEST(MedianSplit, OddCount) {
  const std::vector<float> values{5, 4, 3, 2, 1};
  const std::vector<PointId> ids{0, 1, 2, 3, 4};
  const auto s = median_split(values, ids);
  EXPECT_EQ(s.split, 3.0f);
  EXPECT_EQ(s.left.size(), 3u);
  EXPECT_EQ(s.right.size(), 2u);
}

TEST(MedianSplit, TiesAllGoLeft) {
  const std::vector<float> values{7, 7};
  const std::vector<PointId> ids{0, 1};
  const auto s = median_split(values, ids);
  EXPECT_EQ(s.split, 7.0f);
  EXPECT_EQ(s.left.size(), 2u);
  EXPECT_TRUE(s.right.empty());
}

TEST(MedianSplit, NeedsTwoEntries) {
  const std::vector<float> one{1.0f};
  const std::vector<PointId> id{0};
  EXPECT_THROW(median_split(one, id), ParameterError);
  EXPECT_THROW(median_split({}, {}), ParameterError);
}

TEST(MedianSplit, MatchesSortOracleOnRandomInput) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + rng.below(60);
    std::vector<float> values(m);
    // Coarse grid so that ties show up regularly.
    for (auto& v : values) v = static_cast<float>(rng.below(8));
    std::vector<PointId> ids(m);
    std::iota(ids.begin(), ids.end(), PointId{100});
    const auto s = median_split(values, ids);
    EXPECT_EQ(s.split, oracle::sorted_lower_median(values));
    std::size_t expected_left = 0;
    for (float v : values) expected_left += v <= s.split;
    EXPECT_EQ(s.left.size(), expected_left);
    EXPECT_EQ(s.left.size() + s.right.size(), m);
    EXPECT_TRUE(std::is_sorted(s.left.begin(), s.left.end()));
    EXPECT_TRUE(std::is_sorted(s.right.begin(), s.right.end()));
  }
}

TEST(GrowTree, SingleLevelSplitsAtLowerMedian) {
  const auto tree = grow_tree(column({1.0f, 2.0f, 3.0f, 4.0f}), 1);
  ASSERT_EQ(tree.splits.size(), 1u);
  EXPECT_EQ(tree.splits[0], 2.0f);
  EXPECT_EQ(std::vector<PointId>(tree.leaf(0).begin(), tree.leaf(0).end()),
            (std::vector<PointId>{0, 1}));
  EXPECT_EQ(std::vector<PointId>(tree.leaf(1).begin(), tree.leaf(1).end()),
            (std::vector<PointId>{2, 3}));
}

TEST(GrowTree, EqualProjectionsLeaveEmptyRightLeaf) {
  const auto tree = grow_tree(column({7.0f, 7.0f, 7.0f, 7.0f}), 1);
  EXPECT_EQ(tree.splits[0], 7.0f);
  EXPECT_EQ(tree.leaf(0).size(), 4u);
  EXPECT_TRUE(tree.leaf(1).empty());
}

TEST(GrowTree, DegenerateSubtreeStillHasAllLeaves) {
  ProjectionMatrix p;
  p.rows = 4;
  p.cols = 2;
  p.values = {1, 5, 1, 5, 1, 5, 1, 5};
  const auto tree = grow_tree(p, 2);
  ASSERT_EQ(tree.leaf_offsets.size(), 5u);
  expect_partition(tree, 4);
  EXPECT_EQ(tree.leaf(0).size(), 4u);
  for (std::size_t j = 1; j < 4; ++j) EXPECT_TRUE(tree.leaf(j).empty());
}

TEST(GrowTrees, SingletonLeavesForFullDepth) {
  const auto data = gaussian_dataset(8, 5, 1);
  const auto index = grow_trees(data, {2, 3, 1.0, 17});
  ASSERT_EQ(index.trees.size(), 2u);
  for (const auto& tree : index.trees) {
    expect_partition(tree, 8);
    for (std::size_t j = 0; j < tree.leaf_count(); ++j) {
      EXPECT_EQ(tree.leaf(j).size(), 1u);
    }
  }
}

TEST(GrowTrees, RejectsBadParameters) {
  const auto data = gaussian_dataset(8, 5, 1);
  EXPECT_THROW(grow_trees(data, {1, 4, 1.0, 0}), DepthError);
  EXPECT_THROW(grow_trees(data, {1, 0, 1.0, 0}), DepthError);
  EXPECT_THROW(grow_trees(data, {0, 2, 1.0, 0}), ParameterError);
  EXPECT_THROW(grow_trees(data, {1, 2, 0.0, 0}), ParameterError);
  EXPECT_THROW(grow_trees(data, {1, 2, 1.1, 0}), ParameterError);
}

TEST(GrowTrees, Deterministic) {
  const auto data = gaussian_dataset(300, 20, 2);
  const IndexParams params{5, 4, 0.3, 123};
  EXPECT_EQ(grow_trees(data, params, {.threads = 1}),
            grow_trees(data, params, {.threads = 3}));
}

TEST(GrowTrees, SmallerForestIsPrefixOfLarger) {
  const auto data = gaussian_dataset(200, 10, 3);
  const auto big = grow_trees(data, {8, 4, 0.5, 9});
  const auto small = grow_trees(data, {3, 4, 0.5, 9});
  for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(small.trees[t], big.trees[t]);
}

TEST(GrowTrees, TreesHaveDistinctMatrices) {
  const auto data = gaussian_dataset(64, 8, 4);
  const auto index = grow_trees(data, {6, 2, 1.0, 5});
  for (std::size_t s = 0; s < index.trees.size(); ++s)
    for (std::size_t t = s + 1; t < index.trees.size(); ++t)
      EXPECT_NE(index.trees[s].matrix, index.trees[t].matrix);
}

void expect_balanced(const RPTree& tree, std::size_t n) {
  const std::size_t lo = n >> tree.depth;
  const std::size_t hi = (n + tree.leaf_count() - 1) >> tree.depth;
  for (std::size_t j = 0; j < tree.leaf_count(); ++j) {
    const auto size = tree.leaf(j).size();
    EXPECT_TRUE(size == lo || size == hi)
        << "n=" << n << " depth=" << tree.depth << " leaf " << j << " size " << size;
  }
}

TEST(GrowTrees, BalancedLeavesWhenProjectionsAreDistinct) {
  Rng rng(6);
  std::size_t checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.below(500);
    const std::size_t depth = 1 + rng.below(max_depth(n));
    const auto data = gaussian_dataset(n, 12, 1000 + trial);
    const auto index = grow_trees(data, {3, depth, 0.4, static_cast<std::uint64_t>(trial)});
    for (const auto& tree : index.trees) {
      expect_partition(tree, n);
      if (!oracle::projections_distinct(data, tree)) continue;
      expect_balanced(tree, n);
      ++checked;
    }
  }
  EXPECT_GE(checked, 80u);
}

TEST(GrowTrees, FixedCountTreesAlwaysBalanced) {
  Rng rng(7);
  std::size_t tied = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.below(500);
    const std::size_t depth = 1 + rng.below(max_depth(n));
    const auto data = gaussian_dataset(n, 12, 2000 + trial);
    const auto index = grow_trees(
        data, {3, depth, default_sparsity(12), static_cast<std::uint64_t>(trial),
               SparsityMode::fixed_count});
    for (const auto& tree : index.trees) {
      expect_partition(tree, n);
      // A float collision between two of n projections is possible but rare;
      // such trees are exempt.
      if (!oracle::projections_distinct(data, tree)) {
        ++tied;
        continue;
      }
      expect_balanced(tree, n);
    }
  }
  EXPECT_LE(tied, 2u);
}

TEST(GrowTrees, EmptyRandomDirectionCollapsesLevel) {
  // With a tiny a some column is almost surely empty: that level sends every
  // point left, which is the degenerate-split rule, not an error.
  const auto data = gaussian_dataset(64, 4, 3);
  const auto index = grow_trees(data, {20, 3, 0.05, 4});
  bool saw_empty_leaf = false;
  for (const auto& tree : index.trees) {
    expect_partition(tree, 64);
    for (std::size_t j = 0; j < tree.leaf_count(); ++j) saw_empty_leaf |= tree.leaf(j).empty();
  }
  EXPECT_TRUE(saw_empty_leaf);
}

TEST(GrowTrees, DataPointsRouteToTheirOwnLeaf) {
  const auto data = gaussian_dataset(257, 9, 8);
  const auto index = grow_trees(data, {4, 5, 0.5, 1});
  for (const auto& tree : index.trees) {
    for (PointId i = 0; i < data.size(); ++i) {
      EXPECT_EQ(oracle::leaf_of(data.row(i), tree), oracle::listed_leaf(tree, i));
    }
  }
}

TEST(GrowTrees, DuplicatePointsStillPartition) {
  std::vector<float> values;
  for (int i = 0; i < 16; ++i) {
    values.push_back(static_cast<float>(i % 3));
    values.push_back(1.0f);
  }
  const Dataset data(16, 2, values);
  const auto index = grow_trees(data, {4, 4, 1.0, 2});
  for (const auto& tree : index.trees) expect_partition(tree, 16);
}

TEST(GrowTrees, FixedCountBuildCostIsExact) {
  const auto data = gaussian_dataset(1000, 100, 9);
  OpCounter counter;
  const auto index = grow_trees(
      data, {4, 6, 0.1, 3, SparsityMode::fixed_count}, {.counter = &counter});
  EXPECT_EQ(counter.mac, 4u * 10u * 6u * 1000u);
}

TEST(Checksum, SensitiveToSingleBit) {
  const auto a = gaussian_dataset(10, 3, 1);
  std::vector<float> v(a.values().begin(), a.values().end());
  v[7] = std::nextafter(v[7], 100.0f);
  EXPECT_NE(dataset_checksum(a), dataset_checksum(Dataset(10, 3, v)));
  EXPECT_EQ(dataset_checksum(a), dataset_checksum(gaussian_dataset(10, 3, 1)));
}

TEST(MaxDepth, FloorLog2) {
  EXPECT_EQ(max_depth(1), 0u);
  EXPECT_EQ(max_depth(2), 1u);
  EXPECT_EQ(max_depth(7), 2u);
  EXPECT_EQ(max_depth(8), 3u);
  EXPECT_EQ(max_depth(1000), 9u);
}

}  // namespace
}  // namespace mrpt
