#ifndef VALIRON_RNG_HPP
#define VALIRON_RNG_HPP

#include <cstdint>

namespace valiron {

// splitmix64: tiny, portable, and identical on every platform, which keeps
// the seeded corpora byte-reproducible (std::mt19937 distributions are not
// pinned across standard library implementations).
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : s_(seed) {}

    uint64_t next() {
        uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, bound)
    uint64_t below(uint64_t bound) { return bound ? next() % bound : 0; }

    // uniform in [0,1) with 53 bits
    double uniform01() { return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0); }

private:
    uint64_t s_;
};

// FNV-1a over bytes, for corpus digests.
inline uint64_t fnv1a(const void* data, size_t len, uint64_t h = 0xcbf29ce484222325ULL) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace valiron

#endif
