#include "mrpt/synthetic.hpp"

#include <vector>

namespace mrpt {

Dataset gaussian_dataset(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<float> values(n * d);
  for (auto& v : values) v = static_cast<float>(rng.normal());
  return Dataset(n, d, std::move(values));
}

Dataset gaussian_mixture(std::size_t n, std::size_t d, std::size_t clusters,
                         std::uint64_t seed, double spread) {
  if (clusters == 0) throw ParameterError("mixture needs at least one cluster");
  Rng rng(seed);
  std::vector<double> centres(clusters * d);
  for (auto& c : centres) c = spread * rng.normal();
  std::vector<float> values(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    const double* centre = centres.data() + (i % clusters) * d;
    for (std::size_t j = 0; j < d; ++j) {
      values[i * d + j] = static_cast<float>(centre[j] + rng.normal());
    }
  }
  return Dataset(n, d, std::move(values));
}

}  // namespace mrpt
