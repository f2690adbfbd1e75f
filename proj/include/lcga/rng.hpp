#pragma once

// Deterministic random streams keyed by a seed and a path of integer tags,
// e.g. stream(seed, {replication, bootstrap}). Streams never depend on the
// order in which they are requested, so work can be scheduled freely.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace lcga {

using Rng = std::mt19937_64;

// Tags used to separate otherwise equal index paths.
enum class StreamTag : std::uint64_t {
    em_restart = 1,
    bootstrap_resample = 2,
    simulate_subject = 3,
    experiment_data = 4,
    experiment_em = 5,
    experiment_bootstrap = 6,
    scan_k = 7,
};

inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::vector<std::uint32_t> words;
    words.reserve(2 * (path.size() + 1));
    auto push = [&words](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(seed);
    for (auto v : path) push(v);
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

inline std::uint64_t tag(StreamTag t) { return static_cast<std::uint64_t>(t); }

// Derive a child seed (used when a sub-computation takes a plain seed).
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    auto rng = make_stream(seed, path);
    return rng();
}

// Uniform double in [0, 1) from the top 53 bits; identical across standard libraries.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller on uniform01 draws; consumes exactly two words.
inline double standard_normal(Rng& rng) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    double u1 = uniform01(rng);
    double u2 = uniform01(rng);
    // 1 - u1 lies in (0, 1]
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(two_pi * u2);
}

// Uniform integer in [0, n) by rejection; unbiased and library-independent.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

}  // namespace lcga
