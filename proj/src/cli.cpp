#include "mrpt/cli.hpp"

#include <algorithm>
#include <CLI11.hpp>
#include <filesystem>
#include <optional>
#include <ostream>

#include "mrpt/core.hpp"
#include "mrpt/eval.hpp"
#include "mrpt/index.hpp"
#include "mrpt/io.hpp"
#include "mrpt/query.hpp"
#include "mrpt/synthetic.hpp"

namespace mrpt {

namespace {

namespace fs = std::filesystem;

struct VectorInput {
  std::string path;
  std::string format;

  Dataset load() const {
    return format.empty() ? load_vectors(path)
                          : load_vectors(path, parse_vector_format(format));
  }
};

SparsityMode parse_mode(const std::string& name) {
  if (name == "bernoulli") return SparsityMode::bernoulli;
  if (name == "fixed") return SparsityMode::fixed_count;
  throw ParameterError("unknown sparsity mode '" + name + "'");
}

void write_csv(const fs::path& path, const std::vector<CsvRow>& rows) {
  write_file_atomic(path, format_csv(rows));
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Approximate k-NN search with multiple sparse random projection trees"};
  app.name("mrpt");
  app.require_subcommand(1);

  VectorInput data_in, query_in;
  std::string out_path, index_path, grid_spec, cache_dir;
  std::string mode_name = "bernoulli";
  std::size_t trees = 10, depth = 0, k = 10, votes = 1, repeats = 3;
  std::size_t gen_n = 1000, gen_dim = 32, gen_clusters = 0;
  double sparsity = 0.0;
  std::uint64_t seed = 0;

  const auto add_data = [&](CLI::App* sub) {
    sub->add_option("--data", data_in.path, "Dataset file")->required()->check(CLI::ExistingFile);
    sub->add_option("--data-format", data_in.format, "fvecs, bvecs or csv (default: from extension)");
  };
  const auto add_queries = [&](CLI::App* sub) {
    sub->add_option("--queries", query_in.path, "Query file")->required()->check(CLI::ExistingFile);
    sub->add_option("--queries-format", query_in.format, "fvecs, bvecs or csv (default: from extension)");
  };

  auto* build = app.add_subcommand("build", "Build an index and write it to disk");
  add_data(build);
  build->add_option("--out", out_path, "Index output file")->required();
  build->add_option("--trees", trees, "Number of trees T")->required();
  build->add_option("--depth", depth, "Tree depth")->required();
  build->add_option("--sparsity", sparsity, "Non-zero probability a (default 1/sqrt(d))");
  build->add_option("--seed", seed, "RNG seed");
  build->add_option("--mode", mode_name, "bernoulli or fixed");

  auto* truth_cmd = app.add_subcommand("ground-truth", "Exact k-NN by brute force");
  add_data(truth_cmd);
  add_queries(truth_cmd);
  truth_cmd->add_option("--k", k, "Neighbors per query")->required();
  truth_cmd->add_option("--out", out_path, "CSV output")->required();

  auto* query_cmd = app.add_subcommand("query", "Answer queries with a saved index");
  query_cmd->add_option("--index", index_path, "Index file")->required()->check(CLI::ExistingFile);
  add_data(query_cmd);
  add_queries(query_cmd);
  query_cmd->add_option("--k", k, "Neighbors per query")->required();
  query_cmd->add_option("--votes", votes, "Vote threshold v")->required();
  query_cmd->add_option("--out", out_path, "CSV output")->required();

  auto* bench = app.add_subcommand("bench", "Recall/latency sweep over a parameter grid");
  add_data(bench);
  add_queries(bench);
  bench->add_option("--k", k, "Neighbors per query")->required();
  bench->add_option("--grid", grid_spec, "Grid file or inline ranges, e.g. T=10,20;depth=5:7;votes=1:3")->required();
  bench->add_option("--out", out_path, "CSV output")->required();
  bench->add_option("--seed", seed, "RNG seed");
  bench->add_option("--mode", mode_name, "bernoulli or fixed");
  bench->add_option("--repeats", repeats, "Timed passes; fastest is reported");
  bench->add_option("--cache", cache_dir, "Ground-truth cache directory");

  auto* gen = app.add_subcommand("generate", "Write a synthetic Gaussian dataset");
  gen->add_option("--n", gen_n, "Number of points");
  gen->add_option("--dim", gen_dim, "Dimensionality");
  gen->add_option("--clusters", gen_clusters, "Mixture components (0: one standard Gaussian)");
  gen->add_option("--seed", seed, "RNG seed");
  gen->add_option("--out", out_path, "Output file (.fvecs or .csv)")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "mrpt: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (build->parsed()) {
      const auto data = data_in.load();
      IndexParams params{trees, depth,
                         sparsity > 0.0 ? sparsity : default_sparsity(data.dim()),
                         seed, parse_mode(mode_name)};
      const auto index = grow_trees(data, params);
      save_index(index, out_path);
      out << "built " << trees << " trees of depth " << depth << " over "
          << data.size() << " points\n";
    } else if (truth_cmd->parsed()) {
      const auto data = data_in.load();
      const auto queries = query_in.load();
      const auto truth = compute_ground_truth(data, queries, k);
      write_csv(out_path, neighbor_csv_rows(truth.neighbors));
    } else if (query_cmd->parsed()) {
      const auto data = data_in.load();
      const auto queries = query_in.load();
      const auto index = load_index(index_path, data);
      VoteAccumulator acc(index.n);
      std::vector<NeighborList> answers;
      answers.reserve(queries.size());
      std::size_t short_lists = 0;
      for (std::size_t i = 0; i < queries.size(); ++i) {
        auto res = approximate_knn(queries.row(i), k, index, data, votes, acc);
        short_lists += res.deficit > 0;
        answers.push_back(std::move(res.neighbors));
      }
      write_csv(out_path, neighbor_csv_rows(answers));
      if (short_lists) {
        err << "mrpt: " << short_lists
            << " queries had fewer than k candidates\n";
      }
    } else if (bench->parsed()) {
      const auto data = data_in.load();
      const auto queries = query_in.load();
      const auto grid = parse_grid(fs::exists(grid_spec) ? read_file(grid_spec)
                                                         : grid_spec);
      BenchmarkOptions options;
      options.seed = seed;
      options.mode = parse_mode(mode_name);
      options.repeats = repeats;
      if (!cache_dir.empty()) options.cache_dir = cache_dir;
      const auto records = run_benchmark(data, queries, k, grid, options);
      write_csv(out_path, benchmark_csv_rows(records));
      for (const auto& r : records) {
        if (!r.ok()) {
          err << "mrpt: grid point T=" << r.trees << " depth=" << r.depth
              << " votes=" << r.votes << " failed: " << r.error << "\n";
        }
      }
    } else if (gen->parsed()) {
      const auto data = gen_clusters == 0
                            ? gaussian_dataset(gen_n, gen_dim, seed)
                            : gaussian_mixture(gen_n, gen_dim, gen_clusters, seed);
      save_vectors(data, out_path, format_from_extension(out_path));
    }
  } catch (const std::exception& e) {
    err << "mrpt: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitOk;
}

}  // namespace mrpt
