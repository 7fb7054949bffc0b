#ifndef HVP_TFHE_CIPHERTEXT_HPP
#define HVP_TFHE_CIPHERTEXT_HPP

#include <cassert>
#include <cstdint>
#include <vector>

#include "hvp/tfhe/params.hpp"

namespace hvp::tfhe {

// Scalar LWE sample: (a, b) with b = a.s + mu(2m-1) + e. Levels 0 and 1 use
// 32-bit torus words; level 2 (inside circuit bootstrapping) uses 64-bit.
template <class T>
struct TlweSample {
    std::vector<T> a;
    T b = 0;
    uint8_t level = 0;

    static TlweSample zero(size_t dim, uint8_t level)
    {
        TlweSample c;
        c.a.assign(dim, 0);
        c.b = 0;
        c.level = level;
        return c;
    }
};

using Tlwe = TlweSample<uint32_t>;
using TlweLvl2 = TlweSample<uint64_t>;

// Ring LWE sample: a pair of degree-(N-1) torus polynomials.
template <class T>
struct TrlweSample {
    std::vector<T> a;
    std::vector<T> b;
    uint8_t level = 1;

    size_t N() const
    {
        return a.size();
    }

    static TrlweSample zero(size_t N, uint8_t level)
    {
        TrlweSample c;
        c.a.assign(N, 0);
        c.b.assign(N, 0);
        c.level = level;
        return c;
    }
};

using Trlwe = TrlweSample<uint32_t>;
using TrlweLvl2 = TrlweSample<uint64_t>;

// Ring GSW sample: 2l TRLWE-shaped rows. Rows 0..l-1 carry the gadget
// offset m/Bg^(i+1) on the a polynomial, rows l..2l-1 on the b polynomial.
template <class T>
struct TrgswSample {
    std::vector<TrlweSample<T>> rows;
    uint8_t level = 1;
};

using Trgsw = TrgswSample<uint32_t>;
using TrgswLvl2 = TrgswSample<uint64_t>;

struct SecretKey {
    std::vector<uint32_t> lv0;  // n bits
    std::vector<uint32_t> lv1;  // N1 bits
    std::vector<uint32_t> lv2;  // N2 bits
    const ParameterSet* params = nullptr;
};

// Keyless, noiseless ciphertexts of known constants.
Tlwe tlweTrivial(bool m, const ParameterSet& params);
Tlwe tlweTrivialLvl1(bool m, const ParameterSet& params);
Trlwe trlweTrivialMuAtZero(const ParameterSet& params);
template <class T>
TrgswSample<T> trgswTrivial(bool m, uint32_t N, uint32_t l, uint32_t BgBits,
                            uint8_t level);
Trgsw trgswTrivialLvl1(bool m, const ParameterSet& params);

}  // namespace hvp::tfhe

#endif
