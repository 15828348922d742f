#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace hipmdp {

// SplitMix64-based generator. All randomness in the project flows through
// explicit Rng values so that runs are reproducible bit-for-bit across
// invocations of the same binary. std:: distributions are avoided because
// their sequences are implementation defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Inclusive range. Modulo bias is negligible for the small spans used here.
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

    // Box-Muller without a cached spare: two uniforms per draw, stateless
    // beyond the counter, so forked streams stay independent of call order.
    double normal() {
        double u1 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Child stream keyed by a label. Does not advance this generator, so the
    // set of streams a run produces is a pure function of (seed, labels).
    // Callers are responsible for label uniqueness.
    [[nodiscard]] Rng fork(std::string_view label) const {
        return Rng(mix(state_, fnv1a(label)));
    }

    [[nodiscard]] Rng fork(std::uint64_t salt) const {
        return Rng(mix(state_, salt * 0x9E3779B97F4A7C15ULL + 0x2545F4914F6CDD1DULL));
    }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xCBF29CE484222325ULL;
        for (const char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001B3ULL;
        }
        return h;
    }

private:
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        std::uint64_t z = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace hipmdp
