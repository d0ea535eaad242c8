#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bidshade {

// Seeded PRNG with explicitly coded samplers, so that a given seed produces
// the same stream regardless of standard-library version.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; consumes exactly two uniforms per call.
    double gaussian() {
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::mt19937_64 engine_;
};

namespace detail {
// splitmix64 mixing for substream seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}
} // namespace detail

// Independent named substreams derived from one master seed. Each consumer
// draws from its own stream, so changing the draw count of one component
// leaves every other component's sequence untouched.
struct RngStreams {
    Rng attributes;
    Rng sampling;
    Rng valuation;
    Rng market;
    Rng plant;

    explicit RngStreams(std::uint64_t master_seed)
        : attributes(stream_seed(master_seed, 1)),
          sampling(stream_seed(master_seed, 2)),
          valuation(stream_seed(master_seed, 3)),
          market(stream_seed(master_seed, 4)),
          plant(stream_seed(master_seed, 5)) {}

    static std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream_id) {
        return detail::splitmix64(detail::splitmix64(master) ^ stream_id);
    }
};

} // namespace bidshade
