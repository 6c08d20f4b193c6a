#pragma once

#include <cstdint>
#include <vector>

#include "clusterucb/gradient_matrix.hpp"

namespace cucb {

// Partition of the training pool into k clusters by gradient direction.
// Centroids are unit vectors kept in float64.
struct Clustering {
    std::size_t k = 0;
    std::size_t dim = 0;
    std::vector<std::uint32_t> assignments;   // length N, values in [0, k)
    std::vector<double> centroids;            // k * dim
    std::vector<std::size_t> sizes;           // length k, sums to N

    // Diagnostics from the fit: objective (sum of cosine of every point to
    // its centroid) recorded after each assignment step.
    std::vector<double> objective_history;
    std::size_t iterations = 0;

    const double* centroid(std::size_t c) const { return centroids.data() + c * dim; }
    std::size_t n_points() const { return assignments.size(); }

    void validate(std::size_t expected_points = 0) const;
};

struct KMeansOptions {
    std::size_t max_iter = 100;
    // Relative objective improvement below which iteration stops. Set to 0
    // to run until assignments are exactly stable (exact local optimality).
    double tol = 1e-6;
    unsigned threads = 0;
};

// Spherical k-means: every point goes to the centroid of maximum cosine
// similarity, centroids are renormalized member means. Input rows must be
// unit-normalized. Deterministic in (m, k, seed); assignment ties break
// toward the lowest cluster index.
Clustering spherical_kmeans(const GradientMatrix& m, std::size_t k, std::uint64_t seed,
                            const KMeansOptions& opts = {});

// Ascending indices of the samples assigned to cluster_id.
std::vector<std::size_t> members(const Clustering& c, std::size_t cluster_id);

}  // namespace cucb
