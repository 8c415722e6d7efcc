#pragma once

#include <cstdint>
#include <random>

namespace nocprio {

// Independent 64-bit stream selected by (seed, stream). Streams with different
// ids never share state, so adding a stream leaves the others untouched.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                          0x6e6f6370u};
        engine_.seed(seq);
    }

    std::uint64_t next() { return engine_(); }

    // Uniform on [0,1) with 53 random bits; identical on every platform.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

}  // namespace nocprio
