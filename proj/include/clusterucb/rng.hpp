#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace cucb::rng {

// All randomness in this project flows through one counter-based 64-bit
// generator (the splitmix64 finalizer applied to seed + index * gamma).
// Value i of a stream depends only on (seed, i), so streams can be split
// and consumed out of order without losing reproducibility.

inline constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;

constexpr std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

// Value at position `index` of stream `seed`.
constexpr std::uint64_t at(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed + (index + 1) * kGamma);
}

// Derive an independent stream id, used to split one seed per purpose.
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
    return mix64(seed ^ mix64(tag + kGamma));
}

// [0, 1) with 53-bit resolution.
constexpr double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// (0, 1]; safe to feed into log().
constexpr double to_unit_open(std::uint64_t bits) {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// Standard normal via Box-Muller from draws (2*index, 2*index + 1) of the
// stream. Fixed consumption of two draws keeps the mapping index -> value
// stateless, which is what the seeded projection matrix relies on.
inline double gaussian_at(std::uint64_t seed, std::uint64_t index) {
    const double u1 = to_unit_open(at(seed, 2 * index));
    const double u2 = to_unit(at(seed, 2 * index + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Sequential convenience wrapper over the counter stream.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64() { return at(seed_, counter_++); }

    double next_unit() { return to_unit(next_u64()); }

    // Uniform in [0, bound) by 128-bit multiply-shift.
    std::uint64_t next_index(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const unsigned __int128 wide =
            static_cast<unsigned __int128>(next_u64()) * bound;
        return static_cast<std::uint64_t>(wide >> 64);
    }

    double next_gaussian() {
        const double u1 = to_unit_open(next_u64());
        const double u2 = to_unit(next_u64());
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    Stream split(std::uint64_t tag) const { return Stream(derive(seed_, tag)); }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace cucb::rng
