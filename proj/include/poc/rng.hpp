#ifndef POC_RNG_HPP
#define POC_RNG_HPP

#include <cstdint>
#include <random>

namespace poc {

namespace detail {

// SplitMix64 finalizer; used to decorrelate derived stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Seedable random stream. Streams derived from the same master seed with
/// distinct indices are statistically independent; the same (seed, index)
/// always reproduces the same draw sequence.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(mix(seed)) {}

    /// Stream for replication / purpose `index` under `master_seed`.
    static RngStream derive(std::uint64_t master_seed, std::uint64_t index) {
        std::uint64_t s = master_seed;
        std::uint64_t a = detail::splitmix64(s);
        s ^= index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
        std::uint64_t b = detail::splitmix64(s);
        return RngStream(a ^ (b + index));
    }

    /// Child stream; advances this stream by one draw.
    RngStream split() {
        std::uint64_t s = engine_();
        return RngStream(s);
    }

    /// Uniform draw in [0, 1).
    double uniform() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
    }

    /// Standard normal draw.
    double normal() {
        return std::normal_distribution<double>(0.0, 1.0)(engine_);
    }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    static std::uint64_t mix(std::uint64_t seed) {
        std::uint64_t s = seed;
        return detail::splitmix64(s);
    }

    std::mt19937_64 engine_;
};

} // namespace poc

#endif // POC_RNG_HPP
