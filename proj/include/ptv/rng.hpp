// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace ptv {

// Seeded random source used everywhere randomness is needed. Gaussian draws
// go through an explicit Box-Muller step so the sample stream depends only on
// the mt19937_64 state, not on the standard library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int lo, int hi_inclusive) {
        const auto span = static_cast<std::uint64_t>(hi_inclusive - lo) + 1;
        return lo + static_cast<int>(engine_() % span);
    }

    // Standard normal. Each draw consumes two uniforms; no cached spare, so
    // serialized engine state fully determines the stream.
    double normal() {
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    std::string serialize() const;
    void deserialize(const std::string& text);

private:
    std::mt19937_64 engine_;
};

}  // namespace ptv
