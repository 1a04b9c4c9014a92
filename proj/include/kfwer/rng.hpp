#pragma once

#include <cstdint>
#include <limits>

namespace kfwer {

// xoshiro256** with SplitMix64 seeding. Satisfies UniformRandomBitGenerator so
// it plugs into <random> distributions.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

private:
    std::uint64_t s_[4];
};

// Counter-based substream: the generator for (master seed, index) depends on
// nothing else, so work split across threads reproduces bit-for-bit.
Xoshiro256 substream(std::uint64_t master_seed, std::uint64_t index);

}  // namespace kfwer
