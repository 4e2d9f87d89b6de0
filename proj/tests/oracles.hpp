#pragma once

// Reference computations for tests. Each one is coded directly from the
// definition and shares no code path with the library routine it checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "mrpt/core.hpp"
#include "mrpt/index.hpp"

namespace mrpt::oracle {

// Dense row-major copy of a sparse matrix via its lookup method.
inline std::vector<double> dense(const SparseMatrix& r) {
  std::vector<double> out(r.rows * r.cols, 0.0);
  for (std::size_t i = 0; i < r.rows; ++i)
    for (std::size_t j = 0; j < r.cols; ++j) out[i * r.cols + j] = r.at(i, j);
  return out;
}

// Naive triple-loop X * R with every term summed in double.
inline std::vector<double> matmul(const std::vector<double>& x, std::size_t n,
                                  std::size_t d, const std::vector<double>& r,
                                  std::size_t cols) {
  std::vector<double> out(n * cols, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (std::size_t c = 0; c < d; ++c) acc += x[i * d + c] * r[c * cols + j];
      out[i * cols + j] = acc;
    }
  return out;
}

inline double distance(const std::vector<double>& x, const std::vector<double>& y) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double diff = static_cast<long double>(x[i]) - y[i];
    acc += diff * diff;
  }
  return static_cast<double>(std::sqrt(acc));
}

struct Hit {
  std::uint32_t index;
  double distance;
};

// Full sort of every point by (distance, index); first min(k, n) kept.
inline std::vector<Hit> brute_force(const Dataset& data,
                                    std::span<const float> q, std::size_t k) {
  std::vector<Hit> all;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double acc = 0.0;
    const auto row = data.row(i);
    for (std::size_t j = 0; j < q.size(); ++j) {
      const double diff = static_cast<double>(q[j]) - row[j];
      acc += diff * diff;
    }
    all.push_back({static_cast<std::uint32_t>(i), std::sqrt(acc)});
  }
  std::sort(all.begin(), all.end(), [](const Hit& a, const Hit& b) {
    return std::make_pair(a.distance, a.index) < std::make_pair(b.distance, b.index);
  });
  all.resize(std::min(k, all.size()));
  return all;
}

// Lower median by full sort: the ceil(m/2)-th smallest value.
inline float sorted_lower_median(std::vector<float> values) {
  std::sort(values.begin(), values.end());
  return values[(values.size() + 1) / 2 - 1];
}

// Leaf reached by a point: walks the explicit heap layout from the root,
// projecting with the dense matrix one level at a time.
inline std::size_t leaf_of(std::span<const float> x, const RPTree& tree) {
  const auto r = dense(tree.matrix);
  std::size_t node = 0;
  for (std::size_t level = 0; level < tree.depth; ++level) {
    double acc = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c)
      acc += static_cast<double>(x[c]) * r[c * tree.depth + level];
    node = static_cast<float>(acc) <= tree.splits[node] ? 2 * node + 1 : 2 * node + 2;
  }
  return node - ((std::size_t{1} << tree.depth) - 1);
}

// True when, at every level, all n projected values are pairwise distinct.
// This is sufficient for distinct values within every split.
inline bool projections_distinct(const Dataset& data, const RPTree& tree) {
  std::vector<double> x(data.values().begin(), data.values().end());
  const auto p = matmul(x, data.size(), data.dim(), dense(tree.matrix), tree.depth);
  for (std::size_t level = 0; level < tree.depth; ++level) {
    std::set<float> seen;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (!seen.insert(static_cast<float>(p[i * tree.depth + level])).second) return false;
    }
  }
  return true;
}

// True when, within every internal node, the projected values of the points
// routed through that node are pairwise distinct. Node membership is taken
// from the leaves below it.
inline bool split_values_distinct(const Dataset& data, const RPTree& tree) {
  std::vector<double> x(data.values().begin(), data.values().end());
  const auto p = matmul(x, data.size(), data.dim(), dense(tree.matrix), tree.depth);
  const std::size_t leaves = std::size_t{1} << tree.depth;
  for (std::size_t level = 0; level < tree.depth; ++level) {
    const std::size_t span = leaves >> level;  // leaves under a node at this level
    for (std::size_t first = 0; first < leaves; first += span) {
      std::set<float> seen;
      for (std::size_t j = first; j < first + span; ++j) {
        for (auto i : tree.leaf(j)) {
          if (!seen.insert(static_cast<float>(p[i * tree.depth + level])).second) return false;
        }
      }
    }
  }
  return true;
}

// Leaf that lists point i, found by scanning leaf contents.
inline std::size_t listed_leaf(const RPTree& tree, std::uint32_t i) {
  for (std::size_t j = 0; j < tree.leaf_count(); ++j) {
    const auto leaf = tree.leaf(j);
    if (std::find(leaf.begin(), leaf.end(), i) != leaf.end()) return j;
  }
  return tree.leaf_count();
}

// Number of trees in which point i shares a leaf with the query.
inline std::uint32_t shared_leaves(const MRPTIndex& index,
                                   std::span<const float> q, std::uint32_t i) {
  std::uint32_t count = 0;
  for (const auto& tree : index.trees) count += listed_leaf(tree, i) == leaf_of(q, tree);
  return count;
}

}  // namespace mrpt::oracle
