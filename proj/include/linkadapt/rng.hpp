#pragma once

#include <cmath>
#include <cstdint>

namespace linkadapt {

// Counter-based splitmix64 stream. Substreams derived from (master_seed,
// stream_index) are statistically independent, which keeps Monte Carlo
// trials reproducible regardless of how they are scheduled across workers.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(mix(seed + kGamma)) {}

    static Rng substream(std::uint64_t master_seed, std::uint64_t stream_index) {
        return Rng(mix(master_seed + kGamma * (stream_index + 1)));
    }

    std::uint64_t next_u64() {
        state_ += kGamma;
        return mix(state_);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Exponential with the given mean (mean = 1/rate).
    double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

    // Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        // Rejection-free modulo is fine here: n is tiny versus 2^64.
        return next_u64() % n;
    }

  private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

} // namespace linkadapt
