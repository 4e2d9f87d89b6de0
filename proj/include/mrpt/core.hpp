#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mrpt/error.hpp"

namespace mrpt {

using PointId = std::uint32_t;

/// Row-major collection of n points in d-dimensional Euclidean space.
///
/// Coordinates are stored as 32-bit floats and must all be finite. The
/// position of a point in the collection is its identifier; it never changes
/// for the lifetime of the object.
class Dataset {
 public:
  Dataset() = default;
  /// Takes ownership of `values`, which must hold exactly n*d finite floats.
  Dataset(std::size_t n, std::size_t d, std::vector<float> values);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }
  bool empty() const { return n_ == 0; }

  std::span<const float> row(std::size_t i) const {
    return {values_.data() + i * d_, d_};
  }
  std::span<const float> values() const { return values_; }

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<float> values_;
};

/// Deterministic 64-bit generator: xoshiro256** whose state is filled by
/// splitmix64 from a single seed. The output stream depends only on the seed,
/// never on the platform or standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal deviate (Marsaglia polar method).
  double normal();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// splitmix64 finaliser; used to derive independent seeds from (seed, salt).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

/// How the non-zero pattern of a sparse projection matrix is drawn.
enum class SparsityMode : std::uint32_t {
  /// Every entry is independently non-zero with probability a.
  bernoulli = 0,
  /// Every column has exactly ceil(a*d) non-zeros at uniformly chosen rows.
  fixed_count = 1,
};

/// d x depth sparse matrix in compressed-column form. Column j holds the
/// random direction used at tree level j. No explicit zeros are stored and
/// row ids within a column are strictly increasing.
struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> col_offsets;  // cols + 1 entries
  std::vector<std::uint32_t> row_ids;
  std::vector<float> values;

  std::size_t nnz() const { return values.size(); }
  std::size_t col_nnz(std::size_t j) const {
    return col_offsets[j + 1] - col_offsets[j];
  }
  /// Builds the sparse form of a row-major dense matrix, dropping zeros.
  static SparseMatrix from_dense(std::size_t rows, std::size_t cols,
                                 std::span<const float> row_major);

  /// Dense lookup; O(column non-zeros).
  float at(std::size_t r, std::size_t c) const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;
};

/// Dense n x depth matrix of projected coordinates.
struct ProjectionMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> values;

  float operator()(std::size_t i, std::size_t j) const {
    return values[i * cols + j];
  }
  std::span<const float> row(std::size_t i) const {
    return {values.data() + i * cols, cols};
  }
};

/// Multiply-accumulate tally, filled by the projection routines when supplied.
struct OpCounter {
  std::uint64_t mac = 0;
};

/// Default sparsity 1/sqrt(d).
double default_sparsity(std::size_t d);

/// Draws a d x depth matrix whose entries are N(0,1) with probability a and
/// exactly zero otherwise. Identical arguments produce identical matrices.
SparseMatrix sample_sparse_matrix(std::size_t d, std::size_t depth, double a,
                                  std::uint64_t seed,
                                  SparsityMode mode = SparsityMode::bernoulli);

/// P = X R in a single pass over the data. Each output entry is accumulated
/// in double in column-storage order and rounded to float once, which makes
/// row i bit-identical to project_query(X.row(i), R).
ProjectionMatrix project_dataset(const Dataset& data, const SparseMatrix& r,
                                 OpCounter* counter = nullptr);

/// p = q^T R.
std::vector<float> project_query(std::span<const float> q,
                                 const SparseMatrix& r,
                                 OpCounter* counter = nullptr);

/// Same as project_query but writes into `out` (length R.cols).
void project_query_into(std::span<const float> q, const SparseMatrix& r,
                        std::span<float> out, OpCounter* counter = nullptr);

/// Euclidean distance accumulated in double.
double euclidean_distance(std::span<const float> x, std::span<const float> y);

/// Squared Euclidean distance without the shape check; for hot loops.
inline double squared_distance_unchecked(const float* x, const float* y,
                                         std::size_t d) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double diff = static_cast<double>(x[i]) - static_cast<double>(y[i]);
    acc += diff * diff;
  }
  return acc;
}

}  // namespace mrpt
