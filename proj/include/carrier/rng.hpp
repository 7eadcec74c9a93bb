#pragma once

#include <cstdint>
#include <cstddef>

namespace carrier {

/// Counter-based generator (Philox 2x64, 10 rounds). A stream is keyed by
/// (seed, stream id), so sample i of a Monte Carlo run draws from stream i
/// regardless of which worker executes it.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : key_(seed ^ mix(stream)), ctr_hi_(stream), ctr_lo_(0) {}

    std::uint64_t next_u64() {
        std::uint64_t x0 = ctr_lo_++, x1 = ctr_hi_;
        if (ctr_lo_ == 0) ++ctr_hi_;  // carry; unreachable in practice
        std::uint64_t k = key_;
        for (int round = 0; round < 10; ++round) {
            const unsigned __int128 prod = static_cast<unsigned __int128>(kMul) * x0;
            const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
            const std::uint64_t lo = static_cast<std::uint64_t>(prod);
            x0 = hi ^ k ^ x1;
            x1 = lo;
            k += kWeyl;
        }
        return x0;
    }

    /// Uniform in [0,1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n), n >= 1.
    std::uint64_t next_below(std::uint64_t n) {
        // multiply-shift with rejection (Lemire)
        std::uint64_t x = next_u64();
        unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
        std::uint64_t l = static_cast<std::uint64_t>(m);
        if (l < n) {
            std::uint64_t t = (0 - n) % n;
            while (l < t) {
                x = next_u64();
                m = static_cast<unsigned __int128>(x) * n;
                l = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    static constexpr std::uint64_t kMul = 0xD2B74407B1CE6E93ull;
    static constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t ctr_hi_;
    std::uint64_t ctr_lo_;
};

}  // namespace carrier
