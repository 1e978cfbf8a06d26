#pragma once
// Counter-based random streams. A stream is keyed by (seed, trial, tag) so any
// trial can be regenerated in isolation and the output never depends on which
// thread ran it or in what order.

#include <cstdint>
#include <limits>
#include <type_traits>

namespace trustfuse {

namespace detail {

inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

// SplitMix64 generator; satisfies UniformRandomBitGenerator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t state = 0) noexcept : state_(state) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += detail::golden_gamma;
        return detail::mix64(state_);
    }

    // Uniform double in [0, 1) built from the top 53 bits.
    constexpr double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// Independent stream for one (seed, trial, tag) triple.
inline constexpr SplitMix64 make_stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t tag) noexcept {
    std::uint64_t k = detail::mix64(seed + detail::golden_gamma);
    k = detail::mix64(k ^ (trial * 0xD1B54A32D192ED03ULL + 1));
    k = detail::mix64(k ^ (tag * 0xAEF17502108EF2D9ULL + 2));
    return SplitMix64(k);
}

// Uniform [0, 1) from any 64-bit URBG, using the same bit recipe as SplitMix64::uniform01.
template <class Rng>
double uniform01(Rng& rng) {
    static_assert(std::is_same_v<typename Rng::result_type, std::uint64_t>,
                  "uniform01 expects a 64-bit generator");
    static_assert(Rng::min() == 0 && Rng::max() == std::numeric_limits<std::uint64_t>::max(),
                  "uniform01 expects a full-range generator");
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace trustfuse
