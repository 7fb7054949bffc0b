#ifndef HVP_TFHE_OPS_HPP
#define HVP_TFHE_OPS_HPP

#include <span>
#include <vector>

#include "hvp/tfhe/ciphertext.hpp"
#include "hvp/tfhe/params.hpp"
#include "hvp/tfhe/rng.hpp"

namespace hvp::tfhe {

// ---------------------------------------------------------------------------
// Key material

SecretKey genSecretKey(const ParameterSet& params, Csprng& rng);

// Identity key switch table, level-1 TLWE -> level-0 TLWE.
struct KeySwitchKey {
    uint32_t N1 = 0, t = 0, baseBits = 0, n = 0;
    std::vector<uint32_t> data;  // N1 x t x (2^baseBits - 1) x (n + 1)

    const uint32_t* entry(uint32_t i, uint32_t j, uint32_t u) const
    {
        const size_t stride = n + 1;
        const size_t perBase = (size_t{1} << baseBits) - 1;
        return data.data() + ((size_t{i} * t + j) * perBase + u) * stride;
    }
};

// Private key switch table, level-2 TLWE -> level-1 TRLWE of f(phase).
struct PrivKeySwitchKey {
    uint32_t N2 = 0, t = 0, baseBits = 0, N1 = 0;
    std::vector<uint32_t> data;  // (N2 + 1) x t x (2^baseBits - 1) x 2N1

    const uint32_t* entry(uint32_t i, uint32_t j, uint32_t u) const
    {
        const size_t stride = 2 * size_t{N1};
        const size_t perBase = (size_t{1} << baseBits) - 1;
        return data.data() + ((size_t{i} * t + j) * perBase + u) * stride;
    }
};

// A TRGSW in the form consumed by external products: the raw rows for the
// exact backend, or the transformed rows for the FFT backend.
template <class T>
struct PreparedTrgsw {
    MulBackend backend = MulBackend::Exact;
    uint8_t level = 1;
    uint32_t N = 0, l = 0, bgBits = 0;
    TrgswSample<T> raw;      // Exact
    std::vector<double> fd;  // Fft: (2l rows x 2 polys) x (re[M] im[M])

    const double* fdRow(uint32_t row, uint32_t poly) const
    {
        return fd.data() + (size_t{row} * 2 + poly) * N;
    }
};

template <class T>
PreparedTrgsw<T> prepareTrgsw(const TrgswSample<T>& c, MulBackend backend,
                              uint32_t bgBits);

// Evaluation key: everything Bob needs. Raw forms are kept for
// serialization; prepared forms are built eagerly on construction/load.
class BootstrappingKey {
public:
    static BootstrappingKey generate(const SecretKey& sk, Csprng& rng,
                                     bool withCircuitBootstrapping = true);

    const ParameterSet& params() const
    {
        return *params_;
    }
    bool hasCircuitBootstrapping() const
    {
        return hasCb_;
    }

    const std::vector<PreparedTrgsw<uint32_t>>& bk1() const
    {
        return bk1_;
    }
    const std::vector<PreparedTrgsw<uint64_t>>& bk2() const;
    const KeySwitchKey& ksk() const
    {
        return ksk_;
    }
    const PrivKeySwitchKey& pksNegS() const
    {
        return pksNegS_;
    }
    const PrivKeySwitchKey& pksId() const
    {
        return pksId_;
    }

    const std::vector<Trgsw>& bk1Raw() const
    {
        return bk1Raw_;
    }
    const std::vector<TrgswLvl2>& bk2Raw() const
    {
        return bk2Raw_;
    }

    // Used by deserialization.
    static BootstrappingKey fromParts(const ParameterSet& params,
                                      std::vector<Trgsw> bk1Raw,
                                      std::vector<TrgswLvl2> bk2Raw,
                                      KeySwitchKey ksk,
                                      PrivKeySwitchKey pksNegS,
                                      PrivKeySwitchKey pksId, bool hasCb);

private:
    BootstrappingKey() = default;
    void prepareAll();

    const ParameterSet* params_ = nullptr;
    bool hasCb_ = false;
    std::vector<Trgsw> bk1Raw_;
    std::vector<TrgswLvl2> bk2Raw_;
    std::vector<PreparedTrgsw<uint32_t>> bk1_;
    std::vector<PreparedTrgsw<uint64_t>> bk2_;
    KeySwitchKey ksk_;
    PrivKeySwitchKey pksNegS_, pksId_;
};

// ---------------------------------------------------------------------------
// Encryption and decryption

Tlwe tlweEncrypt(bool m, const SecretKey& sk, NoiseSampler& ns);
bool tlweDecrypt(const Tlwe& ct, const SecretKey& sk);
// phase = b - a.s; exposed for noise measurements and reports.
uint32_t tlwePhase(const Tlwe& ct, const SecretKey& sk);

Trlwe trlweEncrypt(const std::vector<uint32_t>& mBits, const SecretKey& sk,
                   NoiseSampler& ns);
std::vector<uint32_t> trlweDecrypt(const Trlwe& ct, const SecretKey& sk);
// Decrypts only coefficient k; O(N) instead of a full product.
bool trlweDecryptAt(const Trlwe& ct, size_t k, const SecretKey& sk);
uint32_t trlwePhaseAt(const Trlwe& ct, size_t k, const SecretKey& sk);

Trgsw trgswEncrypt(bool m, const SecretKey& sk, NoiseSampler& ns);

// ---------------------------------------------------------------------------
// LHE-mode operations

template <class T>
TrlweSample<T> externalProduct(const TrlweSample<T>& c,
                               const PreparedTrgsw<T>& g);

template <class T>
TrlweSample<T> cmux(const PreparedTrgsw<T>& sel, const TrlweSample<T>& c1,
                    const TrlweSample<T>& c0);
// Convenience forms that prepare the selector per call.
Trlwe cmux(const Trgsw& sel, const Trlwe& c1, const Trlwe& c0,
           const ParameterSet& params);

template <class T>
TlweSample<T> sampleExtract(const TrlweSample<T>& ct, size_t k);

// level-1 TLWE (dim N1) -> level-0 TLWE of the same plaintext.
Tlwe identityKeySwitch(const Tlwe& ct, const BootstrappingKey& bk);

// level-2 TLWE -> level-1 TRLWE of f(phase), f fixed by the table.
Trlwe privateKeySwitch(const TlweLvl2& ct, const PrivKeySwitchKey& pks);

// Blind rotation of a trivial test vector by the phase of a level-0 TLWE.
template <class T>
TrlweSample<T> blindRotate(const Tlwe& ct,
                           std::span<const PreparedTrgsw<T>> bk,
                           const TrlweSample<T>& testvec);

// ---------------------------------------------------------------------------
// FHE-mode operations

Tlwe gateBootstrap(const Tlwe& ct, const BootstrappingKey& bk);
// Bootstrap to a level-1 TRLWE whose coefficient 0 carries the bit; used by
// the RAM write bars for noise refresh.
Trlwe bootstrapToTrlwe(const Tlwe& ct, const BootstrappingKey& bk);

enum class GateKind {
    And,
    AndNot,
    Mux,
    Nand,
    Nor,
    Not,
    Or,
    OrNot,
    Xnor,
    Xor,
};

constexpr int gateArity(GateKind kind)
{
    switch (kind) {
    case GateKind::Not:
        return 1;
    case GateKind::Mux:
        return 3;
    default:
        return 2;
    }
}

const char* gateKindName(GateKind kind);

// inputs for Mux are {sel, a, b} and the result is sel ? a : b.
// Throws std::invalid_argument on arity mismatch.
Tlwe homGate(GateKind kind, std::span<const Tlwe> inputs,
             const BootstrappingKey& bk);

Trlwe homMuxNoSeIks(const Tlwe& sel, const Tlwe& a, const Tlwe& b,
                    const BootstrappingKey& bk);

Trgsw circuitBootstrap(const Tlwe& ct, const BootstrappingKey& bk);

// Gadget-only TRGSW negation: NOT(c) = trivial(1) - c.
Trgsw trgswNot(const Trgsw& c, const ParameterSet& params);

}  // namespace hvp::tfhe

#endif
