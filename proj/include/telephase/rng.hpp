#pragma once

#include <cmath>
#include <cstdint>

namespace telephase {

// Deterministic, platform-independent random stream: splitmix64 state advance
// with Box-Muller normals.  Substreams keyed by (seed, index) are independent
// and reproducible regardless of how work is scheduled across threads.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : state_(scramble(seed)) {}

    static RandomStream substream(std::uint64_t seed, std::uint64_t index) {
        RandomStream rs(0);
        rs.state_ = scramble(scramble(seed) ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
        rs.have_spare_ = false;
        return rs;
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - next_uniform();  // (0, 1], keeps log finite
        const double u2 = next_uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * 3.14159265358979323846 * u2;
        spare_ = rad * std::sin(ang);
        have_spare_ = true;
        return rad * std::cos(ang);
    }

    double next_normal(double mean, double sd) { return mean + sd * next_normal(); }

  private:
    static std::uint64_t scramble(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace telephase
