#include "mrpt/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mrpt {

Dataset::Dataset(std::size_t n, std::size_t d, std::vector<float> values)
    : n_(n), d_(d), values_(std::move(values)) {
  if (n == 0 || d == 0) {
    throw ShapeError("dataset must have n >= 1 and d >= 1");
  }
  if (values_.size() != n * d) {
    throw ShapeError("dataset holds " + std::to_string(values_.size()) +
                     " values, expected " + std::to_string(n * d));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ParameterError("non-finite coordinate in point " +
                           std::to_string(i / d) + ", dimension " +
                           std::to_string(i % d));
    }
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t state = seed ^ rotl(salt * 0xd1b54a32d192ed03ULL, 17);
  splitmix64(state);
  return splitmix64(state);
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto& s : s_) s = splitmix64(state);
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  has_spare_ = true;
  return u * scale;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  // Lemire's nearly-divisionless rejection.
  __uint128_t m = static_cast<__uint128_t>(next()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      m = static_cast<__uint128_t>(next()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

float SparseMatrix::at(std::size_t r, std::size_t c) const {
  const auto first = row_ids.begin() + static_cast<std::ptrdiff_t>(col_offsets[c]);
  const auto last = row_ids.begin() + static_cast<std::ptrdiff_t>(col_offsets[c + 1]);
  const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(r));
  if (it == last || *it != r) return 0.0f;
  return values[static_cast<std::size_t>(it - row_ids.begin())];
}

SparseMatrix SparseMatrix::from_dense(std::size_t rows, std::size_t cols,
                                      std::span<const float> row_major) {
  if (row_major.size() != rows * cols) {
    throw ShapeError("dense matrix has wrong number of values");
  }
  SparseMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.col_offsets.push_back(0);
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t i = 0; i < rows; ++i) {
      const float v = row_major[i * cols + j];
      if (v != 0.0f) {
        m.row_ids.push_back(static_cast<std::uint32_t>(i));
        m.values.push_back(v);
      }
    }
    m.col_offsets.push_back(m.values.size());
  }
  return m;
}

double default_sparsity(std::size_t d) {
  return 1.0 / std::sqrt(static_cast<double>(d));
}

SparseMatrix sample_sparse_matrix(std::size_t d, std::size_t depth, double a,
                                  std::uint64_t seed, SparsityMode mode) {
  if (d == 0 || depth == 0) {
    throw ParameterError("sparse matrix needs d >= 1 and depth >= 1");
  }
  if (!(a > 0.0 && a <= 1.0)) {
    throw ParameterError("sparsity a must lie in (0, 1], got " +
                         std::to_string(a));
  }

  Rng rng(seed);
  SparseMatrix m;
  m.rows = d;
  m.cols = depth;
  m.col_offsets.reserve(depth + 1);
  m.col_offsets.push_back(0);

  if (mode == SparsityMode::bernoulli) {
    for (std::size_t j = 0; j < depth; ++j) {
      for (std::size_t i = 0; i < d; ++i) {
        if (rng.uniform() < a) {
          m.row_ids.push_back(static_cast<std::uint32_t>(i));
          m.values.push_back(static_cast<float>(rng.normal()));
        }
      }
      m.col_offsets.push_back(m.values.size());
    }
    return m;
  }

  const auto per_col = std::min<std::size_t>(
      d, static_cast<std::size_t>(std::ceil(a * static_cast<double>(d))));
  std::vector<std::uint32_t> perm(d);
  for (std::size_t j = 0; j < depth; ++j) {
    std::iota(perm.begin(), perm.end(), 0u);
    // Partial Fisher-Yates: the first per_col slots become a uniform sample.
    for (std::size_t i = 0; i < per_col; ++i) {
      const auto pick = i + static_cast<std::size_t>(rng.below(d - i));
      std::swap(perm[i], perm[pick]);
    }
    std::sort(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(per_col));
    for (std::size_t i = 0; i < per_col; ++i) {
      m.row_ids.push_back(perm[i]);
      m.values.push_back(static_cast<float>(rng.normal()));
    }
    m.col_offsets.push_back(m.values.size());
  }
  return m;
}

ProjectionMatrix project_dataset(const Dataset& data, const SparseMatrix& r,
                                 OpCounter* counter) {
  if (data.dim() != r.rows) {
    throw ShapeError("dataset dimension " + std::to_string(data.dim()) +
                     " does not match projection rows " +
                     std::to_string(r.rows));
  }
  ProjectionMatrix p;
  p.rows = data.size();
  p.cols = r.cols;
  p.values.resize(p.rows * p.cols);

  const float* x = data.values().data();
  const std::size_t d = data.dim();
  std::uint64_t macs = 0;
  for (std::size_t i = 0; i < p.rows; ++i) {
    const float* xi = x + i * d;
    float* out = p.values.data() + i * p.cols;
    for (std::size_t j = 0; j < r.cols; ++j) {
      double acc = 0.0;
      for (std::size_t e = r.col_offsets[j]; e < r.col_offsets[j + 1]; ++e) {
        acc += static_cast<double>(xi[r.row_ids[e]]) *
               static_cast<double>(r.values[e]);
        ++macs;
      }
      out[j] = static_cast<float>(acc);
    }
  }
  if (counter) counter->mac += macs;
  return p;
}

void project_query_into(std::span<const float> q, const SparseMatrix& r,
                        std::span<float> out, OpCounter* counter) {
  if (q.size() != r.rows) {
    throw ShapeError("query dimension " + std::to_string(q.size()) +
                     " does not match projection rows " +
                     std::to_string(r.rows));
  }
  if (out.size() != r.cols) {
    throw ShapeError("projection output has wrong length");
  }
  std::uint64_t macs = 0;
  for (std::size_t j = 0; j < r.cols; ++j) {
    double acc = 0.0;
    for (std::size_t e = r.col_offsets[j]; e < r.col_offsets[j + 1]; ++e) {
      acc += static_cast<double>(q[r.row_ids[e]]) *
             static_cast<double>(r.values[e]);
      ++macs;
    }
    out[j] = static_cast<float>(acc);
  }
  if (counter) counter->mac += macs;
}

std::vector<float> project_query(std::span<const float> q,
                                 const SparseMatrix& r, OpCounter* counter) {
  std::vector<float> out(r.cols);
  project_query_into(q, r, out, counter);
  return out;
}

double euclidean_distance(std::span<const float> x, std::span<const float> y) {
  if (x.size() != y.size()) {
    throw ShapeError("distance between vectors of length " +
                     std::to_string(x.size()) + " and " +
                     std::to_string(y.size()));
  }
  return std::sqrt(squared_distance_unchecked(x.data(), y.data(), x.size()));
}

}  // namespace mrpt
