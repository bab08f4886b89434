#pragma once

#include <cstdint>

namespace sesum {

// splitmix64 finalizer; used to key substreams and to fill generator state.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// xoshiro256** keyed by (seed, stream). Substream `i` of a given seed is a pure
// function of the pair, so any partition of work across threads or processes can
// reproduce the exact same draws. Satisfies UniformRandomBitGenerator.
class RngStream {
  public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t k = seed;
        k = mix64(k ^ 0x6a09e667f3bcc908ull);
        k = mix64(k + stream);
        s_[0] = mix64(k);
        s_[1] = mix64(k + 1);
        s_[2] = mix64(k + 2);
        s_[3] = mix64(k + 3);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1; // all-zero state is absorbing
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on the open interval (0,1): never returns 0 or 1, so -log(u) is finite.
    double uniform_open() {
        const std::uint64_t v = (operator()() >> 11) | 1ull; // odd, in [1, 2^53-1]
        return static_cast<double>(v) * 0x1.0p-53;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

} // namespace sesum
