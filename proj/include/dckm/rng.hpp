#ifndef DCKM_RNG_HPP
#define DCKM_RNG_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace dckm {

/// mt19937_64 with hand-rolled uniform mappings so streams are identical
/// across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n); rejection sampling avoids modulo bias.
    std::size_t index(std::size_t n) {
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return static_cast<std::size_t>(r % bound);
    }

    std::vector<int> labels(std::size_t n, std::size_t k) {
        std::vector<int> out(n);
        for (auto& l : out) l = static_cast<int>(index(k));
        return out;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace dckm

#endif  // DCKM_RNG_HPP
