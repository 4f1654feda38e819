#pragma once

#include <cstdint>
#include <random>

#include "tailsim/types.hpp"

namespace tailsim {

// Deterministic random source. Wraps std::mt19937_64 but maps raw output to
// doubles and bounded integers itself, so streams are identical across
// standard-library implementations (the std distributions are not pinned).
class Rng {
public:
    explicit Rng(Seed seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // Uniform integer in [0, bound), rejection-sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t draw;
        do {
            draw = engine_();
        } while (draw >= limit);
        return draw % bound;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace tailsim
