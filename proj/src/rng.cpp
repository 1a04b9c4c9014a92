#include "kfwer/rng.hpp"

namespace kfwer {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) {
    std::uint64_t state = seed;
    for (auto& word : s_) word = splitmix64(state);
}

Xoshiro256::result_type Xoshiro256::operator()() {
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

Xoshiro256 substream(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t state = master_seed ^ 0x6a09e667f3bcc909ULL;
    const std::uint64_t a = splitmix64(state);
    state = index + 0x3c6ef372fe94f82bULL;
    const std::uint64_t b = splitmix64(state);
    return Xoshiro256(a ^ rotl(b, 29) ^ (index * 0xd1342543de82ef95ULL));
}

}  // namespace kfwer
