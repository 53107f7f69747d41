#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace fba {

// Counter-seeded xoshiro256++ stream. A stream is fully determined by a base
// seed plus up to three stream labels, so independent streams can be handed
// out per (trial, frame, purpose) and results do not depend on execution
// order or thread count.
class Rng {
public:
    explicit Rng(std::uint64_t seed,
                 std::uint64_t label0 = 0,
                 std::uint64_t label1 = 0,
                 std::uint64_t label2 = 0) {
        std::uint64_t x = seed;
        x = splitmix(x + 0x9e3779b97f4a7c15ULL + label0);
        std::uint64_t a = x;
        x = splitmix(x + label1);
        std::uint64_t b = x;
        x = splitmix(x + label2);
        std::uint64_t c = x;
        std::uint64_t d = splitmix(x + 0x5851f42d4c957f2dULL);
        state_ = {a, b, c, d};
        // xoshiro must not start at the all-zero state
        if ((a | b | c | d) == 0) state_ = {1, 2, 3, 4};
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, n)
    std::uint64_t uniform_index(std::uint64_t n) {
        // modulo bias is negligible for n << 2^64 but reject anyway
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    // standard normal via Box-Muller (platform-independent, unlike
    // std::normal_distribution)
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double two_pi = 6.283185307179586476925286766559;
        spare_ = r * std::sin(two_pi * u2);
        has_spare_ = true;
        return r * std::cos(two_pi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace fba
