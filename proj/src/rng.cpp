#include "gcl/rng.hpp"

#include "gcl/gaussian.hpp"

namespace gcl::rng {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t state = seed;
    const std::uint64_t base = splitmix64(state);
    std::uint64_t mix = base ^ (stream * 0xD1B54A32D192ED03ULL);
    return splitmix64(mix);
}

double Stream::normal() { return gauss::quantile(uniform()); }

std::uint64_t Stream::below(std::uint64_t bound) {
    // Reject the top partial block so every residue is equally likely.
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % bound;
}

}  // namespace gcl::rng
