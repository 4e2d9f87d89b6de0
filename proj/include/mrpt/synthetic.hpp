#pragma once

#include <cstddef>
#include <cstdint>

#include "mrpt/core.hpp"

namespace mrpt {

/// n points with i.i.d. N(0, 1) coordinates.
Dataset gaussian_dataset(std::size_t n, std::size_t d, std::uint64_t seed);

/// n points drawn from `clusters` spherical unit-variance Gaussians whose
/// centres are themselves N(0, spread^2 I). Points are assigned to clusters
/// round-robin.
Dataset gaussian_mixture(std::size_t n, std::size_t d, std::size_t clusters,
                         std::uint64_t seed, double spread = 3.0);

}  // namespace mrpt
