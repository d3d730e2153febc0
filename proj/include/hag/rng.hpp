#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string_view>

namespace hag {

/// Named random streams. Every stage of a run draws only from its own
/// stream, so changing one stage leaves the draws of the others untouched.
enum class Stage : std::uint64_t {
    tree = 1,
    colors = 2,
    marks = 3,
    wildness = 4,
    heights = 5,
    matching = 6,
    walks = 7,
    depth_one = 8,
    diagnostics = 9,
    test = 10,
};

inline constexpr std::string_view kRngName = "philox4x32-10";
inline constexpr int kRngVersion = 1;

/// SplitMix64 finalizer, used to derive stream keys from the master seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Raw Philox4x32-10 block function (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based engine. The 128-bit counter is (draw index, stream id), so
/// any (key, stream id) pair names an independent sequence of 2^64 blocks.
/// Satisfies UniformRandomBitGenerator with 64-bit outputs.
class Philox {
  public:
    using result_type = std::uint64_t;

    Philox(std::uint64_t key, std::uint64_t stream_id) noexcept;

    result_type operator()() noexcept {
        if (idx_ == 2) refill();
        return buf_[idx_++];
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

  private:
    void refill() noexcept;

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 2> buf_{};
    int idx_ = 2;
};

/// Hands out per-(stage, entity) engines derived from one 64-bit master seed.
class RngFactory {
  public:
    explicit RngFactory(std::uint64_t master_seed) noexcept : seed_(master_seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t key(Stage stage) const noexcept {
        return splitmix64(splitmix64(seed_) ^ (static_cast<std::uint64_t>(stage) * 0xd1b54a32d192ed03ull));
    }

    Philox stream(Stage stage, std::uint64_t entity = 0) const noexcept {
        return Philox(key(stage), entity);
    }

  private:
    std::uint64_t seed_;
};

/// Entity id for a tree node at (depth, index).
constexpr std::uint64_t node_entity(int depth, std::uint64_t index) noexcept {
    return (static_cast<std::uint64_t>(depth) << 40) | index;
}

// Distributions. Written out here instead of using <random>'s distribution
// classes, whose algorithms differ between standard libraries.

/// Uniform on the open interval (0, 1).
template <class Engine>
double uniform01(Engine& eng) {
    return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Uniform integer in [0, n), Lemire's multiply-and-reject.
template <class Engine>
std::uint64_t uniform_index(Engine& eng, std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(eng()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(eng()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

template <class Engine>
bool bernoulli(Engine& eng, double p) {
    return uniform01(eng) < p;
}

/// Standard normal by Box-Muller (one variate per call).
template <class Engine>
double standard_normal(Engine& eng) {
    const double u1 = uniform01(eng);
    const double u2 = uniform01(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Poisson(mean). Inversion below mean 10, Hoermann's PTRS above.
template <class Engine>
std::uint64_t poisson(Engine& eng, double mean) {
    if (!(mean > 0.0)) return 0;
    if (mean < 10.0) {
        double p = std::exp(-mean);
        double cdf = p;
        const double u = uniform01(eng);
        std::uint64_t k = 0;
        while (u > cdf && k < 1000) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
            if (p == 0.0) break;
        }
        return k;
    }
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = uniform01(eng) - 0.5;
        const double v = uniform01(eng);
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -mean + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

/// Binomial(n, p) by summing Bernoulli trials; intended for small n.
template <class Engine>
std::uint64_t binomial_small(Engine& eng, std::uint64_t n, double p) {
    std::uint64_t k = 0;
    for (std::uint64_t i = 0; i < n; ++i) k += bernoulli(eng, p) ? 1 : 0;
    return k;
}

}  // namespace hag
