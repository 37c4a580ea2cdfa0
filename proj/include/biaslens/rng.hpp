#pragma once

// Deterministic random streams for the simulator.
//
// Generator: SplitMix64 (Steele, Lea & Flood, "Fast splittable pseudorandom
// number generators", OOPSLA 2014). Chosen because it is tiny, portable,
// and trivially splittable: each user gets an independent stream derived
// from (master seed, stream key), so corpus generation can be parallelized
// per user while staying bit-identical to the sequential run.

#include <cmath>
#include <cstdint>

namespace biaslens {

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). Modulo bias is negligible for the small n
    // used here and keeps the draw count per call fixed at one.
    std::uint64_t uniform_int(std::uint64_t n) { return next() % n; }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via the Marsaglia polar method. Uses only sqrt/log,
    // and caches the spare deviate, so draw counts stay deterministic.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

  private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Derives the seed of an independent substream. Two distinct keys yield
// uncorrelated streams for any master seed.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t key) {
    SplitMix64 g(master_seed ^ (0x9E3779B97F4A7C15ULL * (key + 1)));
    return g.next();
}

}  // namespace biaslens
