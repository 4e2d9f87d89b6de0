#include "mrpt/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <numeric>
#include <string>
#include <thread>
#include <unordered_set>

#include "mrpt/io.hpp"

namespace mrpt {

namespace {

std::size_t thread_count(std::size_t requested, std::size_t jobs) {
  std::size_t threads = requested;
  if (threads == 0) {
    if (const char* env = std::getenv("MRPT_THREADS"); env && *env) {
      threads = static_cast<std::size_t>(std::strtoul(env, nullptr, 10));
    }
  }
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  return std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(jobs, 1));
}

std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

}  // namespace

NeighborList brute_force_knn(std::span<const float> q, std::size_t k,
                             const Dataset& data) {
  if (k < 1) throw ParameterError("k must be >= 1");
  std::vector<PointId> all(data.size());
  std::iota(all.begin(), all.end(), PointId{0});
  return exact_knn_in_set(q, k, all, data);
}

GroundTruth compute_ground_truth(const Dataset& data, const Dataset& queries,
                                 std::size_t k, std::size_t threads) {
  if (queries.dim() != data.dim()) {
    throw ShapeError("query dimension does not match dataset dimension");
  }
  GroundTruth truth;
  truth.k = k;
  truth.data_checksum = dataset_checksum(data);
  truth.query_checksum = dataset_checksum(queries);
  truth.neighbors.resize(queries.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < queries.size(); i = next++) {
      truth.neighbors[i] = brute_force_knn(queries.row(i), k, data);
    }
  };
  const auto n_threads = thread_count(threads, queries.size());
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  return truth;
}

GroundTruth cached_ground_truth(const Dataset& data, const Dataset& queries,
                                std::size_t k,
                                const std::filesystem::path& cache_dir) {
  const auto data_sum = dataset_checksum(data);
  const auto query_sum = dataset_checksum(queries);
  const auto file = cache_dir / ("gt_" + hex64(data_sum) + "_" +
                                 hex64(query_sum) + "_k" + std::to_string(k) +
                                 ".bin");
  if (std::filesystem::exists(file)) {
    try {
      auto truth = load_ground_truth(file);
      if (truth.k == k && truth.data_checksum == data_sum &&
          truth.query_checksum == query_sum &&
          truth.neighbors.size() == queries.size()) {
        return truth;
      }
    } catch (const FormatError&) {
      // Unreadable cache entry; recompute and overwrite.
    }
  }
  auto truth = compute_ground_truth(data, queries, k);
  std::filesystem::create_directories(cache_dir);
  save_ground_truth(truth, file);
  return truth;
}

double recall(const NeighborList& approx, const NeighborList& truth) {
  if (truth.empty()) throw ParameterError("recall needs a non-empty truth set");
  std::unordered_set<PointId> wanted;
  for (const auto& nb : truth) wanted.insert(nb.index);
  std::size_t hits = 0;
  for (const auto& nb : approx) hits += wanted.erase(nb.index);
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::vector<BenchmarkRecord> run_benchmark(const Dataset& data,
                                           const Dataset& queries,
                                           std::size_t k,
                                           const std::vector<GridPoint>& grid,
                                           const BenchmarkOptions& options) {
  if (k < 1) throw ParameterError("k must be >= 1");
  const auto truth =
      options.cache_dir
          ? cached_ground_truth(data, queries, k, *options.cache_dir)
          : compute_ground_truth(data, queries, k, options.threads);
  return run_benchmark(data, queries, truth, grid, options);
}

std::vector<BenchmarkRecord> run_benchmark(const Dataset& data,
                                           const Dataset& queries,
                                           const GroundTruth& truth,
                                           const std::vector<GridPoint>& grid,
                                           const BenchmarkOptions& options) {
  using Clock = std::chrono::steady_clock;
  if (grid.empty()) throw ParameterError("benchmark grid is empty");
  if (queries.empty()) throw ParameterError("benchmark needs at least one query");
  if (truth.neighbors.size() != queries.size()) {
    throw ShapeError("ground truth does not cover the query set");
  }
  const std::size_t k = truth.k;

  std::vector<BenchmarkRecord> records;
  records.reserve(grid.size());
  for (const auto& point : grid) {
    BenchmarkRecord rec;
    rec.trees = point.trees;
    rec.depth = point.depth;
    rec.sparsity = point.sparsity > 0.0 ? point.sparsity
                                        : default_sparsity(data.dim());
    rec.votes = point.votes;
    rec.k = k;
    try {
      IndexParams params{point.trees, point.depth, rec.sparsity, options.seed,
                         options.mode};
      const auto build_start = Clock::now();
      const auto index = grow_trees(data, params, {.threads = options.threads});
      rec.build_seconds =
          std::chrono::duration<double>(Clock::now() - build_start).count();
      rec.memory_bytes = index_memory_bytes(index);

      VoteAccumulator acc(index.n);
      std::vector<SearchResult> results(queries.size());
      double best = 0.0;
      for (std::size_t rep = 0; rep < std::max<std::size_t>(options.repeats, 1); ++rep) {
        const auto start = Clock::now();
        for (std::size_t i = 0; i < queries.size(); ++i) {
          results[i] = approximate_knn(queries.row(i), k, index, data,
                                       point.votes, acc);
        }
        const double elapsed =
            std::chrono::duration<double>(Clock::now() - start).count();
        best = rep == 0 ? elapsed : std::min(best, elapsed);
      }
      rec.query_seconds = best;

      double recall_sum = 0.0;
      double cand_sum = 0.0;
      for (std::size_t i = 0; i < queries.size(); ++i) {
        recall_sum += recall(results[i].neighbors, truth.neighbors[i]);
        cand_sum += static_cast<double>(results[i].candidates);
        rec.max_candidates = std::max(rec.max_candidates, results[i].candidates);
      }
      rec.recall = recall_sum / static_cast<double>(queries.size());
      rec.mean_candidates = cand_sum / static_cast<double>(queries.size());
    } catch (const Error& e) {
      rec.error = e.what();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<BenchmarkRecord> pareto_frontier(
    const std::vector<BenchmarkRecord>& records) {
  std::vector<BenchmarkRecord> ok;
  for (const auto& r : records) {
    if (r.ok()) ok.push_back(r);
  }
  // Fastest first; among equal times the highest recall leads.
  std::stable_sort(ok.begin(), ok.end(), [](const auto& a, const auto& b) {
    return a.query_seconds < b.query_seconds ||
           (a.query_seconds == b.query_seconds && a.recall > b.recall);
  });
  std::vector<BenchmarkRecord> frontier;
  double best_recall = -1.0;
  for (const auto& r : ok) {
    const bool tie_with_last = !frontier.empty() &&
                               r.recall == frontier.back().recall &&
                               r.query_seconds == frontier.back().query_seconds;
    if (r.recall > best_recall || tie_with_last) {
      frontier.push_back(r);
      best_recall = r.recall;
    }
  }
  // Already ascending in recall by construction.
  return frontier;
}

}  // namespace mrpt
