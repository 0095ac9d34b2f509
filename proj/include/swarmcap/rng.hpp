#pragma once

#include <cmath>
#include <cstdint>

namespace swarmcap {

// Counter-seeded deterministic generator (splitmix64 core).
//
// Streams are derived by hashing (seed, stream id, step) so every entity at
// every timestep owns an independent generator. This keeps traces bit-identical
// regardless of evaluation order or parallelism, and identical across
// platforms (std::* distributions are implementation-defined, so we do not
// use them).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(mix(seed ^ 0x5851f42d4c957f2dULL)) {}

    static Rng for_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t step) {
        std::uint64_t h = mix(seed + 0x9e3779b97f4a7c15ULL);
        h = mix(h ^ (stream * 0xbf58476d1ce4e5b9ULL));
        h = mix(h ^ (step * 0x94d049bb133111ebULL));
        return Rng(h);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform in [0, n).
    int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

    // Box-Muller; draws exactly two uniforms per call.
    double normal(double mean, double stddev) {
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(6.283185307179586 * u2);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

// Stream tags for per-entity generators.
enum class RngStream : std::uint64_t {
    placement = 1,
    robot_sense = 2,
    robot_control = 3,
    target_motion = 4,
};

inline std::uint64_t stream_id(RngStream kind, std::uint64_t index) {
    return (static_cast<std::uint64_t>(kind) << 32) | index;
}

}  // namespace swarmcap
