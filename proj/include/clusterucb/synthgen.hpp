#pragma once

#include <cstdint>
#include <vector>

#include "clusterucb/gradient_matrix.hpp"

namespace cucb {

// Synthetic gradient pools with controllable cluster structure: latent unit
// directions on the sphere, each sample a normalized Gaussian perturbation
// of its cluster's direction, validation vectors placed near the first
// "useful" latent clusters.
struct SynthConfig {
    std::size_t n_samples = 1000;
    std::size_t dim = 64;
    std::size_t n_latent_clusters = 10;
    // Within-cluster tightness; noise is divided by this. 0 means pure noise
    // (no cluster structure at all).
    double concentration = 10.0;
    std::size_t n_val = 16;
    std::size_t n_subtasks = 2;
    // Fraction of latent clusters the validation vectors align with.
    double useful_cluster_fraction = 0.2;
    std::uint64_t seed = 0;

    void validate() const;
    std::size_t n_useful() const;
};

struct SynthPool {
    GradientMatrix train;                     // normalized
    ValidationSet val;                        // normalized
    std::vector<std::uint32_t> latent_labels; // length n_samples
};

SynthPool generate(const SynthConfig& cfg);

}  // namespace cucb
