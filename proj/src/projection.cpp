#include "clusterucb/projection.hpp"

#include <cmath>

#include "clusterucb/errors.hpp"
#include "clusterucb/kernels.hpp"
#include "clusterucb/parallel.hpp"
#include "clusterucb/rng.hpp"

namespace cucb {

namespace {

constexpr std::uint64_t kProjectionTag = 0x70726f6a;  // "proj"

}  // namespace

GradientMatrix random_project(const GradientMatrix& m, std::size_t target_dim,
                              std::uint64_t seed, unsigned threads) {
    if (target_dim == 0) {
        throw InvalidConfigError("projection target dimension must be positive");
    }
    m.validate();

    const std::size_t d = m.cols;
    const std::uint64_t stream = rng::derive(seed, kProjectionTag);
    const double sigma = 1.0 / std::sqrt(static_cast<double>(target_dim));

    // Entry (i, j) of the logical d x target_dim matrix sits at counter
    // index i * target_dim + j. Stored transposed so each output column is a
    // contiguous dot against an input row.
    std::vector<float> projection(target_dim * d);
    parallel_for(target_dim, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            float* row = projection.data() + j * d;
            for (std::size_t i = 0; i < d; ++i) {
                row[i] = static_cast<float>(
                    rng::gaussian_at(stream, i * target_dim + j) * sigma);
            }
        }
    });

    GradientMatrix out;
    out.ids = m.ids;
    out.rows = m.rows;
    out.cols = target_dim;
    out.normalized = false;
    out.data.resize(m.rows * target_dim);
    parallel_for(m.rows, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            const float* src = m.row(r);
            float* dst = out.row(r);
            for (std::size_t j = 0; j < target_dim; ++j) {
                dst[j] = static_cast<float>(
                    kernels::dot(src, projection.data() + j * d, d));
            }
        }
    });
    return out;
}

}  // namespace cucb
