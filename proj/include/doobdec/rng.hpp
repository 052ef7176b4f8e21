#pragma once

#include <cstdint>
#include <vector>

namespace doobdec {

// Deterministic generator for reproducible reports: fixed algorithm, fixed
// mapping to doubles, no library distributions (their rounding is
// implementation-defined). splitmix64 core.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    // A point of the probability simplex with strictly positive coordinates.
    std::vector<double> simplex(int n, double floor = 1e-3) {
        std::vector<double> w(n);
        double sum = 0.0;
        for (auto& x : w) {
            x = floor + uniform01();
            sum += x;
        }
        for (auto& x : w) x /= sum;
        return w;
    }

private:
    std::uint64_t state_;
};

}  // namespace doobdec
