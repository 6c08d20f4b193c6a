#include "clusterucb/synthgen.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "clusterucb/errors.hpp"
#include "clusterucb/rng.hpp"

namespace cucb {

namespace {

constexpr std::uint64_t kDirectionsTag = 0x64697273;  // "dirs"
constexpr std::uint64_t kTrainTag = 0x7472726e;       // "trrn"
constexpr std::uint64_t kValTag = 0x76616c73;         // "vals"

std::string padded_id(const char* prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%07zu", prefix, i);
    return buf;
}

// Gaussian vector around `direction` with scale 1/kappa, normalized.
// Degenerate draws are resampled rather than rejected so counts stay exact;
// the stream is per-sample, so resampling never shifts other samples.
void sample_around(rng::Stream& stream, const double* direction, double kappa,
                   std::size_t d, float* out) {
    std::vector<double> v(d);
    while (true) {
        double norm_sq = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double noise = stream.next_gaussian();
            v[j] = (kappa > 0.0 && direction != nullptr)
                       ? direction[j] + noise / kappa
                       : noise;
            norm_sq += v[j] * v[j];
        }
        if (norm_sq >= 1e-18) {
            const double inv = 1.0 / std::sqrt(norm_sq);
            for (std::size_t j = 0; j < d; ++j) {
                out[j] = static_cast<float>(v[j] * inv);
            }
            return;
        }
    }
}

}  // namespace

void SynthConfig::validate() const {
    if (n_samples == 0 || dim == 0 || n_latent_clusters == 0 || n_val == 0 ||
        n_subtasks == 0) {
        throw InvalidConfigError("all synthetic pool counts must be positive");
    }
    if (!(concentration >= 0.0) || !std::isfinite(concentration)) {
        throw InvalidConfigError("concentration must be a finite value >= 0");
    }
    if (!(useful_cluster_fraction > 0.0 && useful_cluster_fraction <= 1.0)) {
        throw InvalidConfigError("useful cluster fraction must be in (0, 1]");
    }
    if (n_latent_clusters > n_samples) {
        throw InvalidConfigError("more latent clusters than samples");
    }
}

std::size_t SynthConfig::n_useful() const {
    const auto rounded = static_cast<std::size_t>(
        std::llround(useful_cluster_fraction * static_cast<double>(n_latent_clusters)));
    return std::min(n_latent_clusters, std::max<std::size_t>(1, rounded));
}

SynthPool generate(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t d = cfg.dim;
    const std::size_t n_latent = cfg.n_latent_clusters;

    // Latent directions: uniform on the sphere (normalized Gaussians).
    std::vector<double> directions(n_latent * d);
    {
        rng::Stream stream(rng::derive(cfg.seed, kDirectionsTag));
        for (std::size_t l = 0; l < n_latent; ++l) {
            double* dir = directions.data() + l * d;
            double norm_sq = 0.0;
            do {
                norm_sq = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    dir[j] = stream.next_gaussian();
                    norm_sq += dir[j] * dir[j];
                }
            } while (norm_sq < 1e-18);
            const double inv = 1.0 / std::sqrt(norm_sq);
            for (std::size_t j = 0; j < d; ++j) dir[j] *= inv;
        }
    }

    SynthPool pool;
    pool.train.rows = cfg.n_samples;
    pool.train.cols = d;
    pool.train.normalized = true;
    pool.train.data.resize(cfg.n_samples * d);
    pool.train.ids.reserve(cfg.n_samples);
    pool.latent_labels.resize(cfg.n_samples);

    const std::uint64_t train_stream = rng::derive(cfg.seed, kTrainTag);
    for (std::size_t i = 0; i < cfg.n_samples; ++i) {
        const std::size_t latent = i % n_latent;
        pool.latent_labels[i] = static_cast<std::uint32_t>(latent);
        pool.train.ids.push_back(padded_id("s", i));
        rng::Stream stream(rng::derive(train_stream, i));
        sample_around(stream, directions.data() + latent * d, cfg.concentration, d,
                      pool.train.row(i));
    }

    // Validation vectors sit near the useful latent directions; subtask s
    // maps to useful cluster s mod n_useful.
    const std::size_t n_useful = cfg.n_useful();
    pool.val.grads.rows = cfg.n_val;
    pool.val.grads.cols = d;
    pool.val.grads.normalized = true;
    pool.val.grads.data.resize(cfg.n_val * d);
    pool.val.grads.ids.reserve(cfg.n_val);
    pool.val.subtask_labels.reserve(cfg.n_val);

    const std::uint64_t val_stream = rng::derive(cfg.seed, kValTag);
    for (std::size_t j = 0; j < cfg.n_val; ++j) {
        const std::size_t subtask = j % cfg.n_subtasks;
        const std::size_t useful = subtask % n_useful;
        pool.val.grads.ids.push_back(padded_id("v", j));
        pool.val.subtask_labels.push_back("task" + std::to_string(subtask));
        rng::Stream stream(rng::derive(val_stream, j));
        sample_around(stream, directions.data() + useful * d, cfg.concentration, d,
                      pool.val.grads.row(j));
    }

    return pool;
}

}  // namespace cucb
