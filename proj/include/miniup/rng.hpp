#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace miniup {

/// Seeded RNG helpers built on mt19937_64 raw output only. The standard
/// distributions are implementation-defined, so everything that has to be
/// reproducible (init, shuffles, splits) goes through these.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next() { return gen_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n) via multiply-shift.
    uint64_t bounded(uint64_t n) {
        return static_cast<uint64_t>((static_cast<__uint128_t>(gen_()) * n) >> 64);
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

} // namespace miniup
