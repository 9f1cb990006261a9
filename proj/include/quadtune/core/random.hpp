#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace quadtune {

/// Engine used for every stochastic component. Seeded only through
/// derive_seed so that no ambient entropy enters a run.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_tag(std::string_view tag) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Named seed derivation: (base, component, indices...) -> child seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view component,
                                 std::initializer_list<std::uint64_t> indices = {}) noexcept
{
    std::uint64_t s = mix64(base ^ hash_tag(component));
    for (auto i : indices) s = mix64(s ^ mix64(i + 0x632be59bd9b4e019ULL));
    return s;
}

inline Rng make_rng(std::uint64_t base, std::string_view component,
                    std::initializer_list<std::uint64_t> indices = {})
{
    return Rng{derive_seed(base, component, indices)};
}

inline double uniform01(Rng& rng)
{
    return std::uniform_real_distribution<double>{0.0, 1.0}(rng);
}

inline double standard_normal(Rng& rng)
{
    return std::normal_distribution<double>{0.0, 1.0}(rng);
}

} // namespace quadtune
