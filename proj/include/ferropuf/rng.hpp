#ifndef FERROPUF_RNG_HPP
#define FERROPUF_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace ferropuf {

// One 64-bit mixing step of the splitmix64 generator.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// FNV-1a over a label, used to fold stream names into seed keys.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Child-key derivation: the parent key, the stream label and an index are
// folded through splitmix64. Every component of an experiment gets its own
// stream this way, so results do not depend on evaluation order.
inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view label,
                                 std::uint64_t index = 0) {
    std::uint64_t s = parent ^ fnv1a64(label);
    std::uint64_t k = splitmix64(s);
    s = k + index * 0x9e3779b97f4a7c15ULL;
    return splitmix64(s);
}

/// A seeded random stream with hierarchical derivation.
///
/// Streams form a tree rooted at the experiment seed: `child(label, i)`
/// derives an independent stream keyed by (parent key, label, i). Two runs
/// with the same root seed produce bit-identical draws no matter how work
/// is scheduled, as long as each logical unit (device, cell, restart, ...)
/// draws only from its own stream.
class RngStream {
public:
    explicit RngStream(std::uint64_t key) : key_(key) {
        std::uint64_t s = key;
        const std::uint32_t w[8] = {
            static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s) >> 32),
            static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s) >> 32),
            static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s) >> 32),
            static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s) >> 32)};
        std::seed_seq seq(w, w + 8);
        engine_.seed(seq);
    }

    std::uint64_t key() const { return key_; }

    RngStream child(std::string_view label, std::uint64_t index = 0) const {
        return RngStream(derive_seed(key_, label, index));
    }

    double normal(double mean, double stddev) {
        return std::normal_distribution<double>(mean, stddev)(engine_);
    }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Fair bit.
    int bit() { return static_cast<int>(engine_() >> 63); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t key_;
    std::mt19937_64 engine_;
};

}  // namespace ferropuf

#endif
