#ifndef SPOOFDET_RNG_HPP
#define SPOOFDET_RNG_HPP

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace spoofdet {

// Deterministic random source. std::mt19937_64 is bit-exact across
// platforms, but the standard distributions are not, so the draw helpers
// are implemented here directly. Every seeded pipeline stage owns one.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // [0, 1), 53-bit resolution
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // [lo, hi)
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // [0, n); n must be > 0
    std::size_t uniform_index(std::size_t n) {
        auto idx = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
        return idx < n ? idx : n - 1;
    }

    // Fisher-Yates; std::shuffle is implementation-defined, this is not
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 eng_;
};

} // namespace spoofdet

#endif
