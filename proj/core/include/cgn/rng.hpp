#pragma once

#include <cmath>
#include <cstdint>

namespace cgn {

/// Deterministic 64-bit generator (splitmix64 update). Used wherever results
/// must be reproducible bit-for-bit across platforms and standard-library
/// versions: synthetic datasets, power-iteration start vectors.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

private:
    std::uint64_t state_;
};

/// One standard normal draw (Box-Muller on two fresh uniforms; no cached
/// second value, so sequences stay reproducible and platform-independent,
/// unlike std::normal_distribution).
inline double gaussian(SplitMix64& rng) {
    const double u1 = 1.0 - rng.next_double();  // in (0, 1], keeps log finite
    const double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace cgn
