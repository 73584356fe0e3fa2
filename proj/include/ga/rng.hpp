#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace ga {

// SplitMix64. All seeded behavior in the project (shuffles, negative edge
// draws, example picks) goes through this generator so runs reproduce
// bit-for-bit across platforms.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform draw in [0, bound). bound must be > 0.
    uint64_t next_below(uint64_t bound) { return next() % bound; }

private:
    uint64_t state_;
};

// Fisher-Yates driven by SplitMix64.
template <typename T>
void seeded_shuffle(std::vector<T>& items, uint64_t seed) {
    SplitMix64 rng(seed);
    for (size_t i = items.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng.next_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

// FNV-1a, used to derive per-item sub-seeds from string identifiers.
inline uint64_t fnv1a64(std::string_view text) {
    uint64_t hash = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001B3ULL;
    }
    return hash;
}

} // namespace ga
