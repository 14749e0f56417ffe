// rng.hpp — seeded counter-style random streams. Every (trajectory,
// oscillator) pair gets its own substream derived from the master seed, so
// ensembles are bitwise reproducible at any worker count.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace qsl::num {

// SplitMix64 output function.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Well-separated 64-bit stream key from (master seed, a, b).
inline std::uint64_t stream_key(std::uint64_t master, std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t k = mix64(master);
    k = mix64(k ^ a);
    k = mix64(k ^ b);
    return k;
}

// SplitMix64 stream with Box-Muller Gaussians.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t key) noexcept : state_(key) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform on (0, 1] — keeps log() finite in Box-Muller
    double uniform() noexcept {
        return 1.0 - static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // One Box-Muller pair of independent standard normals.
    void gaussian_pair(double& z0, double& z1) noexcept {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        z0 = r * std::cos(theta);
        z1 = r * std::sin(theta);
    }

    double gaussian() noexcept {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double z0, z1;
        gaussian_pair(z0, z1);
        spare_ = z1;
        have_spare_ = true;
        return z0;
    }

private:
    std::uint64_t state_;
    double spare_{0.0};
    bool have_spare_{false};
};

// Handle identifying one trajectory's family of substreams.
struct TrajectoryRng {
    std::uint64_t master_seed{0};
    std::uint64_t trajectory_index{0};

    GaussianStream oscillator_stream(std::uint64_t oscillator_index) const noexcept {
        return GaussianStream(stream_key(master_seed, trajectory_index, oscillator_index));
    }
};

} // namespace qsl::num
