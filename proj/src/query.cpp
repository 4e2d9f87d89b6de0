#include "mrpt/query.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mrpt {

std::size_t route(std::span<const float> projection, const RPTree& tree) {
  std::size_t node = 0;
  for (std::size_t level = 0; level < tree.depth; ++level) {
    node = projection[level] <= tree.splits[node] ? 2 * node + 1 : 2 * node + 2;
  }
  return node - tree.splits.size();
}

std::span<const PointId> tree_query(std::span<const float> q,
                                    const RPTree& tree, OpCounter* counter) {
  std::vector<float> p(tree.depth);
  project_query_into(q, tree.matrix, p, counter);
  return tree.leaf(route(p, tree));
}

VoteAccumulator::VoteAccumulator(std::size_t n) : counts_(n, 0), stamp_(n, 0) {}

void VoteAccumulator::reset() {
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0u);
    epoch_ = 1;
  }
}

void VoteAccumulator::add_leaf(std::span<const PointId> leaf,
                               std::uint32_t threshold,
                               std::vector<PointId>& candidates) {
  for (PointId i : leaf) {
    if (stamp_[i] != epoch_) {
      stamp_[i] = epoch_;
      counts_[i] = 0;
    }
    if (++counts_[i] == threshold) candidates.push_back(i);
  }
}

std::vector<PointId> candidate_set(std::span<const float> q,
                                   const MRPTIndex& index, std::size_t votes,
                                   VoteAccumulator& acc, OpCounter* counter) {
  if (votes < 1 || votes > index.trees.size()) {
    throw ParameterError("vote threshold " + std::to_string(votes) +
                         " outside [1, " + std::to_string(index.trees.size()) +
                         "]");
  }
  if (q.size() != index.d) {
    throw ShapeError("query dimension " + std::to_string(q.size()) +
                     " does not match index dimension " +
                     std::to_string(index.d));
  }
  if (acc.size() != index.n) {
    throw ShapeError("vote accumulator sized for a different dataset");
  }
  acc.reset();
  std::vector<PointId> candidates;
  std::vector<float> p(index.params.depth);
  for (const auto& tree : index.trees) {
    project_query_into(q, tree.matrix, p, counter);
    acc.add_leaf(tree.leaf(route(p, tree)), static_cast<std::uint32_t>(votes),
                 candidates);
  }
  return candidates;
}

NeighborList exact_knn_in_set(std::span<const float> q, std::size_t k,
                              std::span<const PointId> candidates,
                              const Dataset& data) {
  if (q.size() != data.dim()) {
    throw ShapeError("query dimension " + std::to_string(q.size()) +
                     " does not match dataset dimension " +
                     std::to_string(data.dim()));
  }
  NeighborList all;
  all.reserve(candidates.size());
  for (PointId i : candidates) {
    if (i >= data.size()) {
      throw IntegrityError("candidate index " + std::to_string(i) +
                           " out of range for n = " +
                           std::to_string(data.size()));
    }
    all.push_back({i, std::sqrt(squared_distance_unchecked(
                          q.data(), data.row(i).data(), q.size()))});
  }
  const auto before = [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance ||
           (a.distance == b.distance && a.index < b.index);
  };
  const auto keep = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep),
                    all.end(), before);
  all.resize(keep);
  return all;
}

SearchResult approximate_knn(std::span<const float> q, std::size_t k,
                             const MRPTIndex& index, const Dataset& data,
                             std::size_t votes, VoteAccumulator& acc,
                             OpCounter* counter) {
  if (k < 1) throw ParameterError("k must be >= 1");
  if (data.size() != index.n || data.dim() != index.d) {
    throw ShapeError("dataset shape does not match the index");
  }
  const auto candidates = candidate_set(q, index, votes, acc, counter);
  SearchResult result;
  result.candidates = candidates.size();
  result.neighbors = exact_knn_in_set(q, k, candidates, data);
  result.deficit = k - result.neighbors.size();
  return result;
}

SearchResult approximate_knn(std::span<const float> q, std::size_t k,
                             const MRPTIndex& index, const Dataset& data,
                             std::size_t votes) {
  VoteAccumulator acc(index.n);
  return approximate_knn(q, k, index, data, votes, acc);
}

}  // namespace mrpt
