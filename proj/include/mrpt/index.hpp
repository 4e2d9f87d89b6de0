#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mrpt/core.hpp"

namespace mrpt {

/// One sparse random projection tree of fixed depth.
///
/// The complete binary tree is stored implicitly. Internal node `k` (root is
/// 0) has children 2k+1 and 2k+2, and its split value lives in
/// `splits[k]`. Leaf `j` (0-based, left to right) owns
/// `leaf_indices[leaf_offsets[j] .. leaf_offsets[j+1])`. Level `l` of the tree
/// splits on column `l` of `matrix`.
///
/// A degenerate split (all projections equal) sends every point left; the
/// right subtree then consists of empty leaves that routing can still reach.
struct RPTree {
  std::size_t depth = 0;
  SparseMatrix matrix;
  std::vector<float> splits;              // 2^depth - 1
  std::vector<std::uint32_t> leaf_offsets;  // 2^depth + 1
  std::vector<PointId> leaf_indices;        // n

  std::size_t leaf_count() const { return std::size_t{1} << depth; }
  std::span<const PointId> leaf(std::size_t j) const {
    return {leaf_indices.data() + leaf_offsets[j],
            leaf_offsets[j + 1] - leaf_offsets[j]};
  }

  friend bool operator==(const RPTree&, const RPTree&) = default;
};

struct IndexParams {
  std::size_t trees = 0;
  std::size_t depth = 0;
  double sparsity = 0.0;
  std::uint64_t seed = 0;
  SparsityMode mode = SparsityMode::bernoulli;

  friend bool operator==(const IndexParams&, const IndexParams&) = default;
};

/// T trees over one dataset. The dataset itself is not owned; its checksum is
/// kept so that a mismatched dataset can be detected.
struct MRPTIndex {
  IndexParams params;
  std::size_t n = 0;
  std::size_t d = 0;
  std::uint64_t dataset_checksum = 0;
  std::vector<RPTree> trees;

  friend bool operator==(const MRPTIndex&, const MRPTIndex&) = default;
};

/// 64-bit FNV-1a over the little-endian bytes of the coordinates.
std::uint64_t dataset_checksum(const Dataset& data);

/// Deepest admissible tree for n points: floor(log2 n).
std::size_t max_depth(std::size_t n);

/// Seed of the projection matrix of tree `t`; independent of scheduling.
std::uint64_t tree_seed(std::uint64_t seed, std::size_t t);

struct MedianSplit {
  float split = 0.0f;
  std::vector<PointId> left;
  std::vector<PointId> right;
};

/// Splits at the lower median (the ceil(m/2)-th smallest value): entries
/// with value <= split go left, the rest right. Relative order of the indices
/// is preserved on both sides. Requires at least two entries.
MedianSplit median_split(std::span<const float> values,
                         std::span<const PointId> indices);

/// Grows the split/leaf layout of one tree from precomputed projections.
/// `projections` must have one row per dataset point and `depth` columns;
/// all n points start at the root.
RPTree grow_tree(const ProjectionMatrix& projections, std::size_t depth);

/// Builds a single tree with the given projection matrix.
RPTree build_tree(const Dataset& data, SparseMatrix matrix,
                  OpCounter* counter = nullptr);

struct BuildOptions {
  /// Worker threads; 0 means "read MRPT_THREADS, else hardware concurrency".
  std::size_t threads = 0;
  /// Receives the projection multiply-accumulate count summed over trees.
  OpCounter* counter = nullptr;
};

/// Grows `trees` independent trees of the given depth over `data`.
/// Throws DepthError when depth is 0 or exceeds floor(log2 n) and
/// ParameterError for trees == 0 or a outside (0, 1].
MRPTIndex grow_trees(const Dataset& data, const IndexParams& params,
                     const BuildOptions& options = {});

/// Approximate heap footprint of the index structures in bytes (data excluded).
std::size_t index_memory_bytes(const MRPTIndex& index);

}  // namespace mrpt
