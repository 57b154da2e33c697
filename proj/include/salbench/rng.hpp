#pragma once

#include <cstdint>
#include <random>

namespace salbench {

// All randomness in the toolkit flows through this wrapper so results are
// reproducible bit-for-bit: mt19937_64 has a standardized output sequence
// and the uniform/normal transforms below avoid the implementation-defined
// std:: distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller (polar-free, deterministic).
    double normal();

    // Derives a decorrelated stream seed from (seed, stream, index) via two
    // splitmix64 rounds. Used for per-set / per-purpose substreams.
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                     std::uint64_t index = 0);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace salbench
