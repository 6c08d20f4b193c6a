#pragma once

#include <cstdint>

#include "clusterucb/gradient_matrix.hpp"

namespace cucb {

// Multiplies m by a seeded d x target_dim Gaussian matrix with entries drawn
// i.i.d. N(0, 1/target_dim). The matrix entries come from the counter-based
// generator in rng.hpp, so the output depends only on (m, target_dim, seed).
// Ids are preserved; the normalized flag is cleared.
GradientMatrix random_project(const GradientMatrix& m, std::size_t target_dim,
                              std::uint64_t seed, unsigned threads = 0);

}  // namespace cucb
