#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace gcl::rng {

/// One SplitMix64 step; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Seed of the independent stream `stream` under master seed `seed`.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// A reproducible generator: mt19937_64 seeded from SplitMix64(seed, stream).
/// Every draw is defined bit-exactly here (no std:: distributions), so
/// results match across standard libraries. Single owner; not thread-safe.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream) : engine_(stream_seed(seed, stream)) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on the open interval (0, 1): ((x >> 11) + 0.5) * 2^-53.
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard Gaussian by inversion.
    double normal();

    /// Uniform integer in [0, bound) by rejection (bound > 0).
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
};

/// Fisher-Yates shuffle driven by Stream::below.
template <typename T>
void shuffle(std::span<T> items, Stream& stream) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(stream.below(i));
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

}  // namespace gcl::rng
