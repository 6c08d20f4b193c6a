#include "clusterucb/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <unordered_set>

#include "clusterucb/errors.hpp"
#include "clusterucb/kernels.hpp"
#include "clusterucb/parallel.hpp"
#include "clusterucb/rng.hpp"

namespace cucb {

namespace {

constexpr std::uint64_t kKmeansTag = 0x6b6d6e73;  // "kmns"

// k-means++ seeding with 1 - cosine as the distance analogue.
std::vector<double> seed_centroids(const GradientMatrix& m, std::size_t k,
                                   rng::Stream& stream, unsigned threads) {
    const std::size_t n = m.rows;
    const std::size_t d = m.cols;
    std::vector<double> centroids(k * d);

    const std::size_t first = stream.next_index(n);
    for (std::size_t j = 0; j < d; ++j) {
        centroids[j] = static_cast<double>(m.row(first)[j]);
    }

    std::vector<double> min_dist(n);
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            min_dist[i] = std::max(0.0, 1.0 - kernels::dot_mixed(m.row(i), centroids.data(), d));
        }
    });

    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += min_dist[i];

        std::size_t pick;
        if (total <= 1e-30) {
            pick = stream.next_index(n);
        } else {
            const double r = stream.next_unit() * total;
            double cum = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                cum += min_dist[i];
                if (cum > r) {
                    pick = i;
                    break;
                }
            }
        }

        double* center = centroids.data() + c * d;
        for (std::size_t j = 0; j < d; ++j) {
            center[j] = static_cast<double>(m.row(pick)[j]);
        }
        parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                const double dist = std::max(0.0, 1.0 - kernels::dot_mixed(m.row(i), center, d));
                if (dist < min_dist[i]) min_dist[i] = dist;
            }
        });
    }
    return centroids;
}

}  // namespace

Clustering spherical_kmeans(const GradientMatrix& m, std::size_t k, std::uint64_t seed,
                            const KMeansOptions& opts) {
    m.validate();
    if (!m.normalized) {
        throw NotNormalizedError("spherical k-means requires unit-normalized rows");
    }
    if (k == 0) {
        throw InvalidConfigError("k must be positive");
    }
    if (k > m.rows) {
        throw KTooLargeError("k (" + std::to_string(k) + ") exceeds sample count (" +
                             std::to_string(m.rows) + ")");
    }

    const std::size_t n = m.rows;
    const std::size_t d = m.cols;
    rng::Stream stream(rng::derive(seed, kKmeansTag));

    Clustering result;
    result.k = k;
    result.dim = d;
    result.centroids = seed_centroids(m, k, stream, opts.threads);
    result.assignments.assign(n, static_cast<std::uint32_t>(k));  // sentinel: unassigned
    result.sizes.assign(k, 0);

    std::vector<std::uint32_t> next_assign(n);
    std::vector<double> best_scores(n);
    std::vector<double> sums(k * d);
    double prev_objective = -std::numeric_limits<double>::infinity();

    for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
        // Assignment: independent per point, deterministic for any thread count.
        parallel_for(n, opts.threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                const float* x = m.row(i);
                double best = -std::numeric_limits<double>::infinity();
                std::uint32_t arg = 0;
                for (std::size_t c = 0; c < k; ++c) {
                    const double score = kernels::dot_mixed(x, result.centroids.data() + c * d, d);
                    if (score > best) {
                        best = score;
                        arg = static_cast<std::uint32_t>(c);
                    }
                }
                next_assign[i] = arg;
                best_scores[i] = best;
            }
        });

        std::size_t changes = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (next_assign[i] != result.assignments[i]) ++changes;
        }
        result.assignments = next_assign;
        std::fill(result.sizes.begin(), result.sizes.end(), 0);
        for (const std::uint32_t a : result.assignments) ++result.sizes[a];

        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) objective += best_scores[i];
        result.objective_history.push_back(objective);
        result.iterations = iter + 1;

        const bool has_empty =
            std::any_of(result.sizes.begin(), result.sizes.end(),
                        [](std::size_t s) { return s == 0; });

        if (changes == 0 && !has_empty) break;
        if (opts.tol > 0.0 && iter > 0 && !has_empty &&
            objective - prev_objective < opts.tol * std::max(1.0, std::abs(prev_objective))) {
            break;
        }
        prev_objective = objective;

        // Update: per-cluster sums accumulated in point order, renormalized.
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            kernels::accumulate(sums.data() + result.assignments[i] * d, m.row(i), d);
        }
        std::vector<std::size_t> empty_clusters;
        for (std::size_t c = 0; c < k; ++c) {
            double* center = sums.data() + c * d;
            double norm_sq = 0.0;
            for (std::size_t j = 0; j < d; ++j) norm_sq += center[j] * center[j];
            if (result.sizes[c] == 0 || norm_sq < 1e-24) {
                empty_clusters.push_back(c);
                continue;
            }
            const double inv = 1.0 / std::sqrt(norm_sq);
            double* dst = result.centroids.data() + c * d;
            for (std::size_t j = 0; j < d; ++j) dst[j] = center[j] * inv;
        }

        // Repair: reseed each emptied centroid with the worst-assigned point
        // (lowest cosine to its own centroid) from a cluster of size >= 2.
        std::unordered_set<std::size_t> moved;
        for (const std::size_t e : empty_clusters) {
            double worst = std::numeric_limits<double>::infinity();
            std::size_t worst_idx = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (moved.count(i) || result.sizes[result.assignments[i]] < 2) continue;
                const double cos = kernels::dot_mixed(
                    m.row(i), result.centroids.data() + result.assignments[i] * d, d);
                if (cos < worst) {
                    worst = cos;
                    worst_idx = i;
                }
            }
            if (worst_idx == n) break;  // nothing left to donate
            moved.insert(worst_idx);
            --result.sizes[result.assignments[worst_idx]];
            result.assignments[worst_idx] = static_cast<std::uint32_t>(e);
            result.sizes[e] = 1;
            double* dst = result.centroids.data() + e * d;
            const float* src = m.row(worst_idx);
            for (std::size_t j = 0; j < d; ++j) dst[j] = static_cast<double>(src[j]);
        }
    }

    return result;
}

std::vector<std::size_t> members(const Clustering& c, std::size_t cluster_id) {
    if (cluster_id >= c.k) {
        throw IndexOutOfRangeError("cluster id " + std::to_string(cluster_id) +
                                   " out of range (k = " + std::to_string(c.k) + ")");
    }
    std::vector<std::size_t> out;
    out.reserve(c.sizes[cluster_id]);
    for (std::size_t i = 0; i < c.assignments.size(); ++i) {
        if (c.assignments[i] == cluster_id) out.push_back(i);
    }
    return out;
}

void Clustering::validate(std::size_t expected_points) const {
    if (k == 0 || dim == 0) {
        throw ValidationError("clustering must have positive k and dimension");
    }
    if (sizes.size() != k || centroids.size() != k * dim) {
        throw ValidationError("clustering field sizes are inconsistent with k");
    }
    if (expected_points != 0 && assignments.size() != expected_points) {
        throw InconsistentInputsError("clustering covers " +
                                      std::to_string(assignments.size()) +
                                      " points, expected " + std::to_string(expected_points));
    }
    std::vector<std::size_t> recount(k, 0);
    for (const std::uint32_t a : assignments) {
        if (a >= k) throw ValidationError("assignment index out of range");
        ++recount[a];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (recount[c] != sizes[c]) {
            throw ValidationError("cluster sizes do not match assignments");
        }
        if (sizes[c] == 0) {
            throw ValidationError("cluster " + std::to_string(c) + " is empty");
        }
        double norm_sq = 0.0;
        const double* center = centroid(c);
        for (std::size_t j = 0; j < dim; ++j) norm_sq += center[j] * center[j];
        if (std::abs(std::sqrt(norm_sq) - 1.0) > 1e-5) {
            throw ValidationError("centroid " + std::to_string(c) + " is not unit length");
        }
    }
}

}  // namespace cucb
