#pragma once

#include <cstdint>
#include <numbers>

namespace nqlab {

/// Splittable counter-style stream built on splitmix64 (Steele/Lea/Flood).
/// Each (master_seed, stream_index) pair is an independent stream; trials
/// in a Monte Carlo ensemble take stream_index = trial number, so results
/// do not depend on how trials are scheduled across threads.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : state_(mix(master_seed ^ mix(stream_index * 0x9E3779B97F4A7C15ull + 1))) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    /// Uniform on (0, 1].
    double uniform_oc() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform on [0, 1).
    double uniform_co() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [0, 2*pi).
    double uniform_angle() { return uniform_co() * 2.0 * std::numbers::pi; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace nqlab
