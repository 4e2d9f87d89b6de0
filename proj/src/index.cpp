#include "mrpt/index.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

namespace mrpt {

std::uint64_t dataset_checksum(const Dataset& data) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (float v : data.values()) {
    auto bits = std::bit_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) {
      hash ^= (bits >> (8 * b)) & 0xffu;
      hash *= 0x100000001b3ULL;
    }
  }
  return hash;
}

std::size_t max_depth(std::size_t n) {
  return n == 0 ? 0 : static_cast<std::size_t>(std::bit_width(n) - 1);
}

std::uint64_t tree_seed(std::uint64_t seed, std::size_t t) {
  return mix_seed(seed, static_cast<std::uint64_t>(t) + 1);
}

namespace {

// Lower median of the values selected by `ids`.
float lower_median(const ProjectionMatrix& p, std::size_t column,
                   std::span<const PointId> ids, std::vector<float>& scratch) {
  scratch.resize(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) scratch[i] = p(ids[i], column);
  const auto mid = scratch.begin() + static_cast<std::ptrdiff_t>((ids.size() - 1) / 2);
  std::nth_element(scratch.begin(), mid, scratch.end());
  return *mid;
}

class TreeGrower {
 public:
  TreeGrower(const ProjectionMatrix& p, RPTree& tree) : p_(p), tree_(tree) {}

  void grow(std::size_t node, std::size_t level, std::size_t begin,
            std::size_t end, float fallback_split) {
    auto& ids = tree_.leaf_indices;
    if (level == tree_.depth) {
      tree_.leaf_offsets.push_back(static_cast<std::uint32_t>(end));
      return;
    }
    float split = fallback_split;
    std::size_t cut = end;
    if (end > begin) {
      std::span<const PointId> range(ids.data() + begin, end - begin);
      split = lower_median(p_, level, range, scratch_);
      const auto mid = std::stable_partition(
          ids.begin() + static_cast<std::ptrdiff_t>(begin),
          ids.begin() + static_cast<std::ptrdiff_t>(end),
          [&](PointId i) { return p_(i, level) <= split; });
      cut = static_cast<std::size_t>(mid - ids.begin());
    }
    tree_.splits[node] = split;
    grow(2 * node + 1, level + 1, begin, cut, split);
    grow(2 * node + 2, level + 1, cut, end, split);
  }

 private:
  const ProjectionMatrix& p_;
  RPTree& tree_;
  std::vector<float> scratch_;
};

std::size_t resolve_threads(std::size_t requested, std::size_t jobs) {
  std::size_t threads = requested;
  if (threads == 0) {
    if (const char* env = std::getenv("MRPT_THREADS"); env && *env) {
      threads = static_cast<std::size_t>(std::strtoul(env, nullptr, 10));
    }
  }
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  return std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(jobs, 1));
}

}  // namespace

MedianSplit median_split(std::span<const float> values,
                         std::span<const PointId> indices) {
  if (values.size() != indices.size()) {
    throw ShapeError("median_split: values and indices differ in length");
  }
  if (values.size() < 2) {
    throw ParameterError("median_split needs at least two entries");
  }
  std::vector<float> scratch(values.begin(), values.end());
  const auto mid = scratch.begin() + static_cast<std::ptrdiff_t>((scratch.size() - 1) / 2);
  std::nth_element(scratch.begin(), mid, scratch.end());

  MedianSplit out;
  out.split = *mid;
  for (std::size_t i = 0; i < values.size(); ++i) {
    (values[i] <= out.split ? out.left : out.right).push_back(indices[i]);
  }
  return out;
}

RPTree grow_tree(const ProjectionMatrix& projections, std::size_t depth) {
  if (depth == 0) throw DepthError("tree depth must be at least 1");
  if (projections.cols < depth) {
    throw ShapeError("projection matrix has fewer columns than tree depth");
  }
  if (projections.rows == 0) {
    throw IntegrityError("cannot grow a tree over zero points");
  }
  RPTree tree;
  tree.depth = depth;
  tree.splits.assign((std::size_t{1} << depth) - 1, 0.0f);
  tree.leaf_offsets.reserve((std::size_t{1} << depth) + 1);
  tree.leaf_offsets.push_back(0);
  tree.leaf_indices.resize(projections.rows);
  std::iota(tree.leaf_indices.begin(), tree.leaf_indices.end(), PointId{0});

  TreeGrower(projections, tree).grow(0, 0, 0, projections.rows, 0.0f);
  return tree;
}

RPTree build_tree(const Dataset& data, SparseMatrix matrix,
                  OpCounter* counter) {
  const auto projections = project_dataset(data, matrix, counter);
  RPTree tree = grow_tree(projections, matrix.cols);
  tree.matrix = std::move(matrix);
  return tree;
}

MRPTIndex grow_trees(const Dataset& data, const IndexParams& params,
                     const BuildOptions& options) {
  if (data.empty()) throw ParameterError("cannot index an empty dataset");
  if (params.trees == 0) throw ParameterError("number of trees must be >= 1");
  if (params.depth == 0 || params.depth > max_depth(data.size())) {
    throw DepthError("depth " + std::to_string(params.depth) +
                     " outside [1, " + std::to_string(max_depth(data.size())) +
                     "] for n = " + std::to_string(data.size()));
  }
  if (!(params.sparsity > 0.0 && params.sparsity <= 1.0)) {
    throw ParameterError("sparsity a must lie in (0, 1], got " +
                         std::to_string(params.sparsity));
  }

  MRPTIndex index;
  index.params = params;
  index.n = data.size();
  index.d = data.dim();
  index.dataset_checksum = dataset_checksum(data);
  index.trees.resize(params.trees);

  std::vector<OpCounter> counters(params.trees);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t t = next++; t < params.trees; t = next++) {
      try {
        auto matrix = sample_sparse_matrix(data.dim(), params.depth,
                                           params.sparsity,
                                           tree_seed(params.seed, t),
                                           params.mode);
        index.trees[t] = build_tree(data, std::move(matrix), &counters[t]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const auto threads = resolve_threads(options.threads, params.trees);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  if (options.counter) {
    for (const auto& c : counters) options.counter->mac += c.mac;
  }
  return index;
}

std::size_t index_memory_bytes(const MRPTIndex& index) {
  std::size_t bytes = sizeof(MRPTIndex);
  for (const auto& tree : index.trees) {
    bytes += sizeof(RPTree);
    bytes += tree.matrix.col_offsets.size() * sizeof(std::size_t);
    bytes += tree.matrix.row_ids.size() * sizeof(std::uint32_t);
    bytes += tree.matrix.values.size() * sizeof(float);
    bytes += tree.splits.size() * sizeof(float);
    bytes += tree.leaf_offsets.size() * sizeof(std::uint32_t);
    bytes += tree.leaf_indices.size() * sizeof(PointId);
  }
  return bytes;
}

}  // namespace mrpt
