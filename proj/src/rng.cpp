#include "hvp/tfhe/rng.hpp"

#include <cmath>
#include <cstring>
#include <random>

namespace hvp::tfhe {

namespace {

inline uint32_t rotl(uint32_t x, int k)
{
    return (x << k) | (x >> (32 - k));
}

inline void quarterRound(uint32_t& a, uint32_t& b, uint32_t& c, uint32_t& d)
{
    a += b;
    d = rotl(d ^ a, 16);
    c += d;
    b = rotl(b ^ c, 12);
    a += b;
    d = rotl(d ^ a, 8);
    c += d;
    b = rotl(b ^ c, 7);
}

void chachaBlock(const std::array<uint32_t, 16>& in,
                 std::array<uint32_t, 16>& out)
{
    out = in;
    for (int round = 0; round < 10; round++) {
        quarterRound(out[0], out[4], out[8], out[12]);
        quarterRound(out[1], out[5], out[9], out[13]);
        quarterRound(out[2], out[6], out[10], out[14]);
        quarterRound(out[3], out[7], out[11], out[15]);
        quarterRound(out[0], out[5], out[10], out[15]);
        quarterRound(out[1], out[6], out[11], out[12]);
        quarterRound(out[2], out[7], out[8], out[13]);
        quarterRound(out[3], out[4], out[9], out[14]);
    }
    for (int i = 0; i < 16; i++)
        out[i] += in[i];
}

uint64_t splitmix64(uint64_t& x)
{
    x += 0x9e3779b97f4a7c15ull;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

Csprng::Csprng(const std::array<uint32_t, 8>& key) : pos_(16)
{
    // "expand 32-byte k"
    state_[0] = 0x61707865;
    state_[1] = 0x3320646e;
    state_[2] = 0x79622d32;
    state_[3] = 0x6b206574;
    for (int i = 0; i < 8; i++)
        state_[4 + i] = key[i];
    state_[12] = 0;  // block counter
    state_[13] = 0;
    state_[14] = 0;  // nonce
    state_[15] = 0;
}

Csprng Csprng::fromEntropy()
{
    std::random_device rd;
    std::array<uint32_t, 8> key;
    for (auto& w : key)
        w = rd();
    return Csprng(key);
}

Csprng Csprng::fromSeed(uint64_t seed)
{
    std::array<uint32_t, 8> key;
    uint64_t s = seed;
    for (int i = 0; i < 4; i++) {
        uint64_t v = splitmix64(s);
        key[2 * i] = static_cast<uint32_t>(v);
        key[2 * i + 1] = static_cast<uint32_t>(v >> 32);
    }
    return Csprng(key);
}

void Csprng::refill()
{
    chachaBlock(state_, block_);
    pos_ = 0;
    if (++state_[12] == 0)
        ++state_[13];
}

uint32_t doubleToTorus32(double d)
{
    return static_cast<uint32_t>(
        static_cast<int64_t>(std::llround((d - std::floor(d)) * 4294967296.0)));
}

uint64_t doubleToTorus64(double d)
{
    double frac = d - std::floor(d);
    // 2^64 is not representable in an int64_t round; split into two halves.
    double hi = std::floor(frac * 4294967296.0);
    double lo = (frac * 4294967296.0 - hi) * 4294967296.0;
    return (static_cast<uint64_t>(hi) << 32) +
           static_cast<uint64_t>(static_cast<int64_t>(std::llround(lo)));
}

uint32_t NoiseSampler::noise32()
{
    if (sigma_ == 0.0)
        return 0;
    std::normal_distribution<double> gauss(0.0, sigma_);
    return doubleToTorus32(gauss(*rng_));
}

uint64_t NoiseSampler::noise64()
{
    if (sigma_ == 0.0)
        return 0;
    std::normal_distribution<double> gauss(0.0, sigma_);
    return doubleToTorus64(gauss(*rng_));
}

}  // namespace hvp::tfhe
