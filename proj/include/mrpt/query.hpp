#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mrpt/core.hpp"
#include "mrpt/index.hpp"

namespace mrpt {

struct Neighbor {
  PointId index = 0;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Ascending by distance, ties broken by ascending point index.
using NeighborList = std::vector<Neighbor>;

struct SearchResult {
  NeighborList neighbors;
  /// Size of the candidate set the exact scan ran over.
  std::size_t candidates = 0;
  /// k minus the number of neighbors returned; non-zero when |S| < k.
  std::size_t deficit = 0;
};

/// Leaf number reached by a query whose projection onto the tree's matrix is
/// `projection` (length depth). Goes left when p[level] <= split.
std::size_t route(std::span<const float> projection, const RPTree& tree);

/// Points in the leaf reached by `q`.
std::span<const PointId> tree_query(std::span<const float> q,
                                    const RPTree& tree,
                                    OpCounter* counter = nullptr);

/// Per-point occurrence counts F(x; q) for one query at a time.
///
/// The count array is allocated once for n points and reused across queries;
/// an epoch stamp marks which slots belong to the current query so `reset`
/// is O(1).
class VoteAccumulator {
 public:
  explicit VoteAccumulator(std::size_t n);

  void reset();
  /// Adds one vote for every point in `leaf`; appends a point to
  /// `candidates` at the moment its count reaches `threshold`.
  void add_leaf(std::span<const PointId> leaf, std::uint32_t threshold,
                std::vector<PointId>& candidates);
  std::uint32_t count(PointId i) const {
    return stamp_[i] == epoch_ ? counts_[i] : 0;
  }
  std::size_t size() const { return counts_.size(); }

 private:
  std::vector<std::uint32_t> counts_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 1;
};

/// Points sharing a leaf with `q` in at least `votes` trees, in the order in
/// which they crossed the threshold.
std::vector<PointId> candidate_set(std::span<const float> q,
                                   const MRPTIndex& index, std::size_t votes,
                                   VoteAccumulator& acc,
                                   OpCounter* counter = nullptr);

/// Exact k-NN by linear scan over `candidates`. Returns min(k, |S|) entries.
/// Throws IntegrityError for an out-of-range candidate.
NeighborList exact_knn_in_set(std::span<const float> q, std::size_t k,
                              std::span<const PointId> candidates,
                              const Dataset& data);

/// Voting search over all trees of `index`. Requires 1 <= votes <= T and
/// k >= 1; `data` must be the dataset the index was built on.
SearchResult approximate_knn(std::span<const float> q, std::size_t k,
                             const MRPTIndex& index, const Dataset& data,
                             std::size_t votes, VoteAccumulator& acc,
                             OpCounter* counter = nullptr);

/// Convenience overload that allocates its own accumulator.
SearchResult approximate_knn(std::span<const float> q, std::size_t k,
                             const MRPTIndex& index, const Dataset& data,
                             std::size_t votes);

}  // namespace mrpt
