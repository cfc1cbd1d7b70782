#ifndef POLYEQ_RNG_HPP
#define POLYEQ_RNG_HPP

#include <cstdint>
#include <random>

namespace polyeq {

/// splitmix64 step; used to derive independent sub-seeds from one seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Sub-seed for stream `index` of a root seed (stable under reordering).
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
    std::uint64_t s = root ^ (0xD1B54A32D192ED03ULL * (index + 1));
    return splitmix64(s);
}

/// Uniform double in [0, 1) from the engine's raw bits. The mt19937_64
/// sequence is fixed by the standard, so results are identical across
/// platforms (std::uniform_real_distribution is not portable).
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [-bound, bound).
inline double uniform_symmetric(std::mt19937_64& rng, double bound) {
    return bound * (2.0 * uniform_unit(rng) - 1.0);
}

} // namespace polyeq

#endif
