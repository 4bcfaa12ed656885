#pragma once

#include <cstdint>
#include <string_view>

namespace groupsim::rng {

/// 64-bit FNV-1a. Used to turn names into seed material; stable across
/// platforms, unlike std::hash.
constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t combine(std::uint64_t a, std::uint64_t b) noexcept {
    return mix(a ^ (mix(b) + 0x632be59bd9b4e019ULL));
}

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    constexpr explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    constexpr result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1) with 53 bits of resolution.
    constexpr double uniform() noexcept {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    constexpr bool bernoulli(double p) noexcept { return uniform() < p; }

private:
    std::uint64_t state_;
};

/// Independent stream for one (run, agent, day) triple.
inline SplitMix64 stream(std::uint64_t run_seed, std::string_view agent_id, int day) noexcept {
    return SplitMix64(combine(combine(run_seed, fnv1a(agent_id)), static_cast<std::uint64_t>(day)));
}

/// Deterministic value in [-1, 1] keyed by the given material.
inline double signed_unit(std::uint64_t key) noexcept {
    return static_cast<double>(mix(key) >> 11) * 0x1.0p-52 - 1.0;
}

}  // namespace groupsim::rng
