#pragma once

// Self-contained deterministic RNG. The standard distributions are not pinned
// across library implementations, so everything that feeds persisted output
// goes through these routines instead.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <utility>
#include <vector>

namespace sizesweep {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Order-sensitive 64-bit mix of an arbitrary word sequence. Used to derive
// per-cell seeds from (master_seed, purpose, family, n, proportion, replicate)
// so runs reproduce across machines and scheduling orders.
inline uint64_t stable_hash(const uint64_t* words, size_t count) {
    uint64_t h = 0x9368e53c2f6af274ull;
    for (size_t i = 0; i < count; ++i) {
        h ^= words[i] + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        uint64_t s = h;
        h = splitmix64(s);
    }
    return h;
}

inline uint64_t stable_hash(std::initializer_list<uint64_t> words) {
    return stable_hash(words.begin(), words.size());
}

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() { return splitmix64(state_); }

    // Unbiased draw from [0, bound) via rejection.
    uint64_t below(uint64_t bound) {
        if (bound < 2) return 0;
        const uint64_t limit = ~uint64_t{0} - ~uint64_t{0} % bound;
        uint64_t x;
        do { x = next(); } while (x >= limit);
        return x % bound;
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return double(next() >> 11) * 0x1.0p-53; }

    int poisson(double mean) {
        // Knuth's product method; fine for the document lengths used here.
        const double threshold = std::exp(-mean);
        double product = uniform01();
        int k = 0;
        while (product > threshold) {
            ++k;
            product *= uniform01();
        }
        return k;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = size_t(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t state_;
};

}  // namespace sizesweep
