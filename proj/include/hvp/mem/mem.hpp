#ifndef HVP_MEM_MEM_HPP
#define HVP_MEM_MEM_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "hvp/tfhe/ops.hpp"
#include "hvp/tfhe/serialize.hpp"

namespace hvp::mem {

// v address bits, w data bits; RAM capacity is w * 2^v bits.
struct MemoryGeometry {
    uint32_t v = 8;
    uint32_t w = 16;

    uint32_t words() const
    {
        return 1u << v;
    }
    size_t bits() const
    {
        return size_t{w} << v;
    }
    size_t imageBytes() const
    {
        return bits() / 8;
    }
};

// w * 2^v level-1 TRLWE cells, one plaintext bit each at coefficient 0.
// Block j holds bit j of every word: cells[j * 2^v + A].
struct EncryptedRam {
    MemoryGeometry geom;
    std::vector<tfhe::Trlwe> cells;

    const tfhe::Trlwe& cell(uint32_t bit, uint32_t addr) const
    {
        return cells[size_t{bit} * geom.words() + addr];
    }
    tfhe::Trlwe& cell(uint32_t bit, uint32_t addr)
    {
        return cells[size_t{bit} * geom.words() + addr];
    }
};

// ROM bits packed along polynomial coefficients (vertical packing): LUT t
// coefficient c carries ROM bit t*N1 + c, bits taken LSB-first per byte.
// A 32-bit block therefore occupies 32 consecutive coefficients
// (horizontal packing of the fetch word).
struct EncryptedRom {
    uint32_t depthBytes = 0;
    std::vector<tfhe::Trlwe> luts;

    uint32_t blocks() const
    {
        return depthBytes / 4;
    }
    uint32_t addrBits() const;
};

// One TRGSW selector per address bit, LSB first.
struct RamAddress {
    std::vector<tfhe::Trgsw> bits;
};

// Selectors transformed for the active multiply backend, plus their
// negations for constant-0 address comparison.
struct PreparedAddress {
    std::vector<tfhe::PreparedTrgsw<uint32_t>> sel;
    std::vector<tfhe::PreparedTrgsw<uint32_t>> notSel;
};

PreparedAddress prepareAddress(const RamAddress& addr,
                               const tfhe::ParameterSet& params);

// Circuit-bootstraps one TRGSW selector per TLWE address bit.
RamAddress addressToTrgsw(std::span<const tfhe::Tlwe> addrBits,
                          const tfhe::BootstrappingKey& bk,
                          unsigned threads = 1);

// CMUX-tree read: w outputs, one per data bit; bit i of the addressed word
// sits at coefficient 0 of output i. Address LSB drives the deepest layer.
std::vector<tfhe::Trlwe> ramReadUnit(const EncryptedRam& ram,
                                     const PreparedAddress& addr,
                                     unsigned threads = 1);

struct ControlOut {
    std::vector<tfhe::Tlwe> readOut;      // level 0, processor facing
    std::vector<tfhe::Trlwe> controlled;  // write data or read data
};

ControlOut ramControlUnit(std::span<const tfhe::Trlwe> read,
                          const tfhe::Tlwe& writeFlag,
                          std::span<const tfhe::Tlwe> writeData,
                          const tfhe::BootstrappingKey& bk,
                          unsigned threads = 1);

// w * 2^v write bars: per cell a chain of v address-comparison CMUXes and a
// final bootstrap that refreshes the noise.
EncryptedRam ramWriteUnit(const EncryptedRam& ram, const PreparedAddress& addr,
                          std::span<const tfhe::Trlwe> controlled,
                          const tfhe::BootstrappingKey& bk,
                          unsigned threads = 1);

struct RamCycleOut {
    std::vector<tfhe::Tlwe> readOut;
    EncryptedRam ram;
};

// One single-port memory cycle: read-before-write at one shared address.
RamCycleOut ramCycle(const EncryptedRam& ram,
                     std::span<const tfhe::Tlwe> addrBits,
                     const tfhe::Tlwe& writeFlag,
                     std::span<const tfhe::Tlwe> writeData,
                     const tfhe::BootstrappingKey& bk, unsigned threads = 1);

// Fetches the 32-bit block at the given block address (LSB-first
// selectors, width rom.addrBits()).
std::vector<tfhe::Tlwe> romRead(const EncryptedRom& rom,
                                const PreparedAddress& addr,
                                const tfhe::BootstrappingKey& bk,
                                unsigned threads = 1);

// sk == nullptr selects trivial-ciphertext mode (no key, no randomness).
EncryptedRam encryptRam(std::span<const uint8_t> image, MemoryGeometry geom,
                        const tfhe::ParameterSet& params,
                        const tfhe::SecretKey* sk, tfhe::NoiseSampler* ns);
std::vector<uint8_t> decryptRam(const EncryptedRam& ram,
                                const tfhe::SecretKey& sk);
EncryptedRom encryptRom(std::span<const uint8_t> image,
                        const tfhe::ParameterSet& params,
                        const tfhe::SecretKey* sk, tfhe::NoiseSampler* ns);
std::vector<uint8_t> decryptRom(const EncryptedRom& rom,
                                const tfhe::SecretKey& sk);

// ---------------------------------------------------------------------------
// Analytic cost model

enum class CostKind {
    CmuxRam,
    CmuxRom,
    GateRamLowerBound,
};

struct CostEstimate {
    uint64_t gateEquivalents = 0;
    uint64_t cmuxCount = 0;
};

// Gate-equivalents: 10v + w(2^v+1) for CMUX RAM, 10v + w for CMUX ROM, and
// w * 2(2^v - 1) two-input gates for a gate-constructed memory.
CostEstimate costEstimate(MemoryGeometry geom, CostKind kind);

uint64_t ramReadCmuxCount(MemoryGeometry geom);
uint64_t ramWriteCmuxCount(MemoryGeometry geom);
// CMUX count of one ROM fetch for the given image size and ring degree.
uint64_t romCmuxCount(uint32_t depthBytes, uint32_t N1);

// ---------------------------------------------------------------------------
// Serialization (module-1 container with a geometry header)

std::vector<uint8_t> serializeRam(const EncryptedRam& ram,
                                  const tfhe::ParameterSet& params);
EncryptedRam deserializeRam(const std::vector<uint8_t>& bytes);
void writeRam(BinWriter& w, const EncryptedRam& ram);
EncryptedRam readRam(BinReader& r);

std::vector<uint8_t> serializeRom(const EncryptedRom& rom,
                                  const tfhe::ParameterSet& params);
EncryptedRom deserializeRom(const std::vector<uint8_t>& bytes);
void writeRom(BinWriter& w, const EncryptedRom& rom);
EncryptedRom readRom(BinReader& r);

}  // namespace hvp::mem

#endif
