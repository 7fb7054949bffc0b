#ifndef HVP_TFHE_PARAMS_HPP
#define HVP_TFHE_PARAMS_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace hvp::tfhe {

// Plaintext offset on the torus: 1/8, i.e. 2^29 on a 32-bit word and 2^61 on
// a 64-bit word.
inline constexpr uint32_t kMu32 = 1u << 29;
inline constexpr uint64_t kMu64 = 1ull << 61;

enum class MulBackend {
    Exact,  // schoolbook negacyclic convolution, bit-exact
    Fft,    // double-precision twisted FFT
};

// A named parameter set. Level 0 is scalar LWE over 32-bit torus words,
// level 1 is ring LWE over 32-bit words, level 2 is ring LWE over 64-bit
// words and is only used inside circuit bootstrapping.
struct ParameterSet {
    std::string name;

    // Level 0
    uint32_t n;
    double alpha0;

    // Level 1
    uint32_t N1;
    uint32_t l1;
    uint32_t Bg1Bits;
    double alpha1;

    // Level 2
    uint32_t N2;
    uint32_t l2;
    uint32_t Bg2Bits;
    double alpha2;

    // Identity key switch, level 1 -> level 0
    uint32_t ksBaseBits;
    uint32_t ksLen;

    // Private key switch, level 2 -> level 1 (circuit bootstrapping)
    uint32_t pksBaseBits;
    uint32_t pksLen;
    double alphaPks;

    MulBackend mul;

    bool deterministic() const
    {
        return alpha0 == 0.0 && alpha1 == 0.0 && alpha2 == 0.0 &&
               alphaPks == 0.0;
    }

    // Throws std::invalid_argument when structural invariants are broken.
    void validate() const;

    static const ParameterSet& tfhe80();
    static const ParameterSet& testDet();
    // Throws std::invalid_argument for unknown names.
    static const ParameterSet& byName(std::string_view name);
};

}  // namespace hvp::tfhe

#endif
