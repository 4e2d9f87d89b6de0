#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mrpt/core.hpp"
#include "mrpt/index.hpp"
#include "mrpt/query.hpp"

namespace mrpt {

/// Exact k-NN by full linear scan; min(k, n) entries, ascending distance with
/// index tie-break.
NeighborList brute_force_knn(std::span<const float> q, std::size_t k,
                             const Dataset& data);

/// Exact neighbors for every query, produced by brute force only.
struct GroundTruth {
  std::size_t k = 0;
  std::uint64_t data_checksum = 0;
  std::uint64_t query_checksum = 0;
  std::vector<NeighborList> neighbors;  // one per query
};

/// Brute-force ground truth; `threads` = 0 uses MRPT_THREADS or all cores.
GroundTruth compute_ground_truth(const Dataset& data, const Dataset& queries,
                                 std::size_t k, std::size_t threads = 0);

/// Loads ground truth from `cache_dir` when a file for
/// (data checksum, query checksum, k) exists, otherwise computes and stores it.
GroundTruth cached_ground_truth(const Dataset& data, const Dataset& queries,
                                std::size_t k,
                                const std::filesystem::path& cache_dir);

/// |A ∩ K| / |K| over point indices. `truth` must be non-empty.
double recall(const NeighborList& approx, const NeighborList& truth);

struct GridPoint {
  std::size_t trees = 0;
  std::size_t depth = 0;
  /// Non-positive means the default 1/sqrt(d).
  double sparsity = 0.0;
  std::size_t votes = 0;
};

struct BenchmarkRecord {
  std::size_t trees = 0;
  std::size_t depth = 0;
  double sparsity = 0.0;
  std::size_t votes = 0;
  std::size_t k = 0;
  double recall = 0.0;
  /// Summed query time over all queries, minimum over repetitions.
  double query_seconds = 0.0;
  double mean_candidates = 0.0;
  std::size_t max_candidates = 0;
  double build_seconds = 0.0;
  std::size_t memory_bytes = 0;
  /// Empty on success; otherwise the reason this grid point failed.
  std::string error;

  bool ok() const { return error.empty(); }
};

struct BenchmarkOptions {
  std::uint64_t seed = 0;
  SparsityMode mode = SparsityMode::bernoulli;
  /// Timed passes over the query set; the fastest is reported.
  std::size_t repeats = 3;
  /// Ground-truth cache location; no caching when unset.
  std::optional<std::filesystem::path> cache_dir;
  /// Threads used for index construction and ground truth (queries are
  /// always timed single-threaded).
  std::size_t threads = 0;
};

/// Runs the recall/latency sweep. Each grid point builds its own index,
/// answers every query, and is scored against brute-force ground truth
/// computed once. A failing grid point is recorded with its error and the
/// sweep continues. Records come back in grid order.
std::vector<BenchmarkRecord> run_benchmark(const Dataset& data,
                                           const Dataset& queries,
                                           std::size_t k,
                                           const std::vector<GridPoint>& grid,
                                           const BenchmarkOptions& options = {});

/// Same, with precomputed ground truth.
std::vector<BenchmarkRecord> run_benchmark(const Dataset& data,
                                           const Dataset& queries,
                                           const GroundTruth& truth,
                                           const std::vector<GridPoint>& grid,
                                           const BenchmarkOptions& options = {});

/// Successful records not dominated on (higher recall, lower query time),
/// sorted by recall ascending.
std::vector<BenchmarkRecord> pareto_frontier(
    const std::vector<BenchmarkRecord>& records);

}  // namespace mrpt
