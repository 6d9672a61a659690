#pragma once

#include <cstdint>

#include "vidiff/tensor.hpp"

namespace vidiff {

/// Deterministic counter-free random stream (splitmix64 core, Box-Muller
/// gaussians). Streams are explicit values: no global state, and keyed
/// substreams let per-frame work consume noise independently of execution
/// order.
class RngStream {
public:
    explicit RngStream(uint64_t seed) : state_(mix(seed ^ kStreamSalt)) {}

    /// Derives an independent stream from this stream's seed and a key.
    /// Does not consume from this stream.
    RngStream substream(uint64_t key) const {
        return RngStream(mix(state_ ^ mix(key + kKeySalt)), 0);
    }

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform in (0, 1]; strictly positive so log() below is safe.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (cosine branch).
    double gaussian() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    void fill_gaussian(Tensor& t) {
        for (double& x : t.v) x = gaussian();
    }

    Tensor gaussian_tensor(int h, int w, int c) {
        Tensor t(h, w, c);
        fill_gaussian(t);
        return t;
    }

private:
    RngStream(uint64_t raw_state, int) : state_(raw_state) {}

    static uint64_t mix(uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    static constexpr uint64_t kStreamSalt = 0xA076'1D64'78BD'642FULL;
    static constexpr uint64_t kKeySalt = 0xD2B7'4407'B1CE'6E93ULL;
    static constexpr double kPi = 3.14159265358979323846;

    uint64_t state_;
};

}  // namespace vidiff
