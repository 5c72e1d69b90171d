#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace gdl {

// SplitMix64 finalizer. Bijective on 64-bit words.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Stream kinds used to derive independent substreams from one run seed.
enum class StreamKind : uint64_t {
    Init = 1,      // filterbank initialization
    Spectral = 2,  // power-iteration probe
    Augment = 3,   // crop origin + flip/rotation bits, keyed by sample index
    Sigma = 4,     // per-sample noise level
    Noise = 5,     // per-sample AWGN field
    Shuffle = 6,   // dataset epoch shuffles
    EvalNoise = 7, // evaluation noise, keyed by (image index, sigma bits)
    Corpus = 8,    // synthetic corpus synthesis
    Test = 9,      // test-local draws
};

inline uint64_t stream_id(StreamKind kind, uint64_t index = 0) {
    return mix64((static_cast<uint64_t>(kind) << 48) ^ index);
}

// Counter-based generator: output i is mix64(key + i*GAMMA), so a stream is
// a pure function of (seed, stream, counter) and can be replayed from any
// offset. Gaussians come from Box-Muller on consecutive counter pairs.
class CounterRng {
public:
    CounterRng(uint64_t seed, uint64_t stream)
        : key_(mix64(mix64(seed) ^ stream)) {}

    CounterRng(uint64_t seed, StreamKind kind, uint64_t index = 0)
        : CounterRng(seed, stream_id(kind, index)) {}

    uint64_t next_u64() { return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ull); }

    // uniform in [0, 1), 53-bit resolution
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // uniform integer in [0, n)
    uint64_t next_below(uint64_t n) { return n ? next_u64() % n : 0; }

    std::pair<double, double> gaussian_pair() {
        double u1 = 1.0 - next_double();  // (0, 1]
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 6.283185307179586476925286766559 * u2;
        return {r * std::cos(t), r * std::sin(t)};
    }

    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        auto [z0, z1] = gaussian_pair();
        spare_ = z1;
        have_spare_ = true;
        return z0;
    }

private:
    uint64_t key_;
    uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace gdl
