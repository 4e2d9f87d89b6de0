#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mrpt/core.hpp"
#include "mrpt/eval.hpp"
#include "mrpt/index.hpp"

namespace mrpt {

enum class VectorFormat { fvecs, bvecs, csv };

/// Parses "fvecs", "bvecs" or "csv".
VectorFormat parse_vector_format(std::string_view name);
/// Guesses the format from the file extension (.fvecs, .bvecs, .csv).
VectorFormat format_from_extension(const std::filesystem::path& path);

/// fvecs: records of a little-endian int32 d followed by d little-endian
/// float32. bvecs: same header followed by d unsigned bytes. csv: one point
/// per line, comma separated. Every record must have the same d.
Dataset load_vectors(const std::filesystem::path& path, VectorFormat format);
Dataset load_vectors(const std::filesystem::path& path);

void save_vectors(const Dataset& data, const std::filesystem::path& path,
                  VectorFormat format);

/// Index file (little-endian):
///   magic "MRPTIDX\0", u32 version, u64 n, u64 d, u32 T, u32 depth,
///   f64 sparsity, u64 seed, u32 sparsity mode, u64 dataset checksum;
///   then per tree: u64 nnz, (depth+1) x u64 column offsets, nnz x u32 row
///   ids, nnz x f32 values, (2^depth - 1) x f32 splits,
///   (2^depth + 1) x u32 leaf offsets, n x u32 leaf indices.
inline constexpr std::uint32_t kIndexFormatVersion = 1;

std::vector<char> serialize_index(const MRPTIndex& index);
MRPTIndex deserialize_index(std::string_view bytes);

/// Writes atomically (temporary file, then rename).
void save_index(const MRPTIndex& index, const std::filesystem::path& path);
/// Throws ChecksumError when `data` is not the dataset the index was built
/// on, FormatError for truncated or malformed files.
MRPTIndex load_index(const std::filesystem::path& path, const Dataset& data);

/// Binary ground-truth file used by the cache.
void save_ground_truth(const GroundTruth& truth,
                       const std::filesystem::path& path);
GroundTruth load_ground_truth(const std::filesystem::path& path);

/// Writes bytes to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

// CSV (RFC 4180: fields containing comma, quote or newline are quoted and
// embedded quotes doubled).
using CsvRow = std::vector<std::string>;
std::string csv_escape(std::string_view field);
std::string format_csv(const std::vector<CsvRow>& rows);
std::vector<CsvRow> parse_csv(std::string_view text);

/// Result schema: T,depth,sparsity,votes,k,recall,qtime_s,mean_candidates,build_s
std::vector<CsvRow> benchmark_csv_rows(
    const std::vector<BenchmarkRecord>& records);

/// Neighbor lists as CSV with header query,rank,index,distance.
std::vector<CsvRow> neighbor_csv_rows(const std::vector<NeighborList>& lists);

/// Grid description, either inline ranges such as
///   "T=10,20;depth=6:8;votes=1:3;sparsity=auto"
/// (cartesian product; a:b is an inclusive integer range) or the contents of
/// a CSV file with header T,depth,sparsity,votes (sparsity may be "auto").
std::vector<GridPoint> parse_grid(std::string_view text);

}  // namespace mrpt
