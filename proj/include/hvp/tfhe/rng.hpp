#ifndef HVP_TFHE_RNG_HPP
#define HVP_TFHE_RNG_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>

namespace hvp::tfhe {

// ChaCha20-based CSPRNG. Seedable for reproducible tests; fromEntropy()
// draws the key from std::random_device.
class Csprng {
public:
    using result_type = uint32_t;

    static constexpr result_type min()
    {
        return 0;
    }
    static constexpr result_type max()
    {
        return std::numeric_limits<result_type>::max();
    }

    static Csprng fromEntropy();
    static Csprng fromSeed(uint64_t seed);

    result_type operator()()
    {
        if (pos_ == block_.size())
            refill();
        return block_[pos_++];
    }

    uint64_t nextU64()
    {
        uint64_t lo = (*this)();
        uint64_t hi = (*this)();
        return lo | (hi << 32);
    }

private:
    explicit Csprng(const std::array<uint32_t, 8>& key);
    void refill();

    std::array<uint32_t, 16> state_;
    std::array<uint32_t, 16> block_;
    size_t pos_;
};

// Gaussian-plus-uniform sampler over the torus. sigma is a torus fraction;
// with sigma == 0 noise32()/noise64() return exactly 0 and draw nothing
// from the underlying generator. Virtual so tests can force degenerate
// masks.
class NoiseSampler {
public:
    NoiseSampler(Csprng& rng, double sigma) : rng_(&rng), sigma_(sigma) {}
    virtual ~NoiseSampler() = default;

    double sigma() const
    {
        return sigma_;
    }
    Csprng& rng()
    {
        return *rng_;
    }

    virtual uint32_t uniform32()
    {
        return (*rng_)();
    }
    virtual uint64_t uniform64()
    {
        return rng_->nextU64();
    }
    virtual uint32_t noise32();
    virtual uint64_t noise64();

private:
    Csprng* rng_;
    double sigma_;
};

// Fixed-point conversion of a real number onto the torus word.
uint32_t doubleToTorus32(double d);
uint64_t doubleToTorus64(double d);

}  // namespace hvp::tfhe

#endif
