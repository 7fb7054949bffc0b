#include "hvp/mem/mem.hpp"

#include <bit>
#include <cassert>
#include <stdexcept>

#include "hvp/common/parallel.hpp"
#include "hvp/tfhe/poly.hpp"

namespace hvp::mem {

using namespace hvp::tfhe;

uint32_t EncryptedRom::addrBits() const
{
    const uint32_t b = blocks();
    assert(std::has_single_bit(b));
    return static_cast<uint32_t>(std::countr_zero(b));
}

PreparedAddress prepareAddress(const RamAddress& addr,
                               const ParameterSet& params)
{
    PreparedAddress out;
    out.sel.reserve(addr.bits.size());
    out.notSel.reserve(addr.bits.size());
    for (const Trgsw& g : addr.bits) {
        out.sel.push_back(prepareTrgsw<uint32_t>(g, params.mul, params.Bg1Bits));
        // Comparison against a constant 0 bit: subtract a trivial TRGSW of 1
        // and invert the sign of every coefficient.
        out.notSel.push_back(prepareTrgsw<uint32_t>(trgswNot(g, params),
                                                    params.mul,
                                                    params.Bg1Bits));
    }
    return out;
}

RamAddress addressToTrgsw(std::span<const Tlwe> addrBits,
                          const BootstrappingKey& bk, unsigned threads)
{
    RamAddress out;
    out.bits.resize(addrBits.size());
    parallelFor(threads, addrBits.size(), [&](size_t i) {
        out.bits[i] = circuitBootstrap(addrBits[i], bk);
    });
    return out;
}

std::vector<Trlwe> ramReadUnit(const EncryptedRam& ram,
                               const PreparedAddress& addr, unsigned threads)
{
    const uint32_t v = ram.geom.v;
    const uint32_t w = ram.geom.w;
    if (addr.sel.size() != v)
        throw std::invalid_argument("ramReadUnit: address width mismatch");
    if (ram.cells.size() != ram.geom.bits())
        throw std::invalid_argument("ramReadUnit: cell count mismatch");

    std::vector<Trlwe> out(w);
    parallelFor(threads, w, [&](size_t j) {
        std::vector<Trlwe> layer(ram.cells.begin() + j * ram.geom.words(),
                                 ram.cells.begin() + (j + 1) * ram.geom.words());
        for (uint32_t d = 0; d < v; d++) {
            const size_t half = layer.size() / 2;
            for (size_t k = 0; k < half; k++)
                layer[k] = cmux(addr.sel[d], layer[2 * k + 1], layer[2 * k]);
            layer.resize(half);
        }
        out[j] = std::move(layer[0]);
    });
    return out;
}

ControlOut ramControlUnit(std::span<const Trlwe> read, const Tlwe& writeFlag,
                          std::span<const Tlwe> writeData,
                          const BootstrappingKey& bk, unsigned threads)
{
    if (read.size() != writeData.size())
        throw std::invalid_argument("ramControlUnit: width mismatch");
    const size_t w = read.size();
    ControlOut out;
    out.readOut.resize(w);
    out.controlled.resize(w);
    parallelFor(threads, w, [&](size_t j) {
        out.readOut[j] = identityKeySwitch(sampleExtract(read[j], 0), bk);
        out.controlled[j] =
            homMuxNoSeIks(writeFlag, writeData[j], out.readOut[j], bk);
    });
    return out;
}

EncryptedRam ramWriteUnit(const EncryptedRam& ram, const PreparedAddress& addr,
                          std::span<const Trlwe> controlled,
                          const BootstrappingKey& bk, unsigned threads)
{
    const uint32_t v = ram.geom.v;
    const uint32_t w = ram.geom.w;
    if (addr.sel.size() != v || controlled.size() != w)
        throw std::invalid_argument("ramWriteUnit: geometry mismatch");

    EncryptedRam next;
    next.geom = ram.geom;
    next.cells.resize(ram.cells.size());
    const uint32_t words = ram.geom.words();
    parallelFor(threads, ram.cells.size(), [&](size_t idx) {
        const uint32_t j = static_cast<uint32_t>(idx / words);
        const uint32_t A = static_cast<uint32_t>(idx % words);
        const Trlwe& old = ram.cell(j, A);
        // Address-match chain: the controlled word survives only when every
        // address bit equals the cell's constant address.
        Trlwe t = cmux((A & 1) ? addr.sel[0] : addr.notSel[0], controlled[j],
                       old);
        for (uint32_t d = 1; d < v; d++)
            t = cmux((A >> d & 1) ? addr.sel[d] : addr.notSel[d], t, old);
        // Refresh the CMUX-chain noise.
        next.cell(j, A) =
            bootstrapToTrlwe(identityKeySwitch(sampleExtract(t, 0), bk), bk);
    });
    return next;
}

RamCycleOut ramCycle(const EncryptedRam& ram, std::span<const Tlwe> addrBits,
                     const Tlwe& writeFlag, std::span<const Tlwe> writeData,
                     const BootstrappingKey& bk, unsigned threads)
{
    if (addrBits.size() != ram.geom.v)
        throw std::invalid_argument("ramCycle: address width mismatch");
    const RamAddress addr = addressToTrgsw(addrBits, bk, threads);
    const PreparedAddress prep = prepareAddress(addr, bk.params());
    std::vector<Trlwe> read = ramReadUnit(ram, prep, threads);
    ControlOut ctl = ramControlUnit(read, writeFlag, writeData, bk, threads);
    RamCycleOut out{std::move(ctl.readOut),
                    ramWriteUnit(ram, prep, ctl.controlled, bk, threads)};
    return out;
}

std::vector<Tlwe> romRead(const EncryptedRom& rom, const PreparedAddress& addr,
                          const BootstrappingKey& bk, unsigned threads)
{
    const ParameterSet& p = bk.params();
    const uint32_t N = p.N1;
    const uint32_t vrom = rom.addrBits();
    if (addr.sel.size() != vrom)
        throw std::invalid_argument("romRead: address width mismatch");
    const uint32_t blocksPerLut = N / 32;
    const uint32_t lowBits = std::min(
        vrom, static_cast<uint32_t>(std::countr_zero(blocksPerLut)));
    const uint32_t highBits = vrom - lowBits;
    assert(rom.luts.size() == (size_t{1} << highBits));

    // High address bits select the LUT through a CMUX tree.
    std::vector<Trlwe> layer = rom.luts;
    for (uint32_t d = 0; d < highBits; d++) {
        const size_t half = layer.size() / 2;
        for (size_t k = 0; k < half; k++)
            layer[k] =
                cmux(addr.sel[lowBits + d], layer[2 * k + 1], layer[2 * k]);
        layer.resize(half);
    }
    Trlwe acc = std::move(layer[0]);

    // Low bits shift the selected block down to coefficient 0 through
    // monomial-rotation CMUXes.
    for (uint32_t d = 0; d < lowBits; d++) {
        const uint32_t shift = 32u << d;
        Trlwe rotated = Trlwe::zero(N, 1);
        polyRotate(rotated.a.data(), acc.a.data(), N, 2 * N - shift);
        polyRotate(rotated.b.data(), acc.b.data(), N, 2 * N - shift);
        acc = cmux(addr.sel[d], rotated, acc);
    }

    std::vector<Tlwe> out(32);
    parallelFor(threads, 32, [&](size_t k) {
        out[k] = identityKeySwitch(sampleExtract(acc, k), bk);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Encryption

namespace {

bool imageBit(std::span<const uint8_t> image, size_t bit)
{
    return (image[bit / 8] >> (bit % 8)) & 1;
}

Trlwe encryptBitPoly(const std::vector<uint32_t>& bits, const SecretKey* sk,
                     NoiseSampler* ns, const ParameterSet& params)
{
    if (sk != nullptr)
        return trlweEncrypt(bits, *sk, *ns);
    Trlwe c = Trlwe::zero(params.N1, 1);
    for (uint32_t i = 0; i < params.N1; i++)
        c.b[i] = bits[i] ? kMu32 : static_cast<uint32_t>(0) - kMu32;
    return c;
}

}  // namespace

EncryptedRam encryptRam(std::span<const uint8_t> image, MemoryGeometry geom,
                        const ParameterSet& p, const SecretKey* sk,
                        NoiseSampler* ns)
{
    if (image.size() != geom.imageBytes())
        throw std::invalid_argument("encryptRam: image size mismatch");
    if (sk != nullptr && sk->params != &p)
        throw std::invalid_argument("encryptRam: key/parameter mismatch");

    EncryptedRam ram;
    ram.geom = geom;
    ram.cells.reserve(geom.bits());
    std::vector<uint32_t> mv(p.N1, 0);
    for (uint32_t j = 0; j < geom.w; j++) {
        for (uint32_t A = 0; A < geom.words(); A++) {
            mv[0] = imageBit(image, size_t{A} * geom.w + j) ? 1 : 0;
            ram.cells.push_back(encryptBitPoly(mv, sk, ns, p));
        }
    }
    return ram;
}

std::vector<uint8_t> decryptRam(const EncryptedRam& ram, const SecretKey& sk)
{
    std::vector<uint8_t> image(ram.geom.imageBytes(), 0);
    for (uint32_t j = 0; j < ram.geom.w; j++)
        for (uint32_t A = 0; A < ram.geom.words(); A++)
            if (trlweDecryptAt(ram.cell(j, A), 0, sk)) {
                const size_t bit = size_t{A} * ram.geom.w + j;
                image[bit / 8] |= 1u << (bit % 8);
            }
    return image;
}

EncryptedRom encryptRom(std::span<const uint8_t> image,
                        const ParameterSet& params, const SecretKey* sk,
                        NoiseSampler* ns)
{
    if (image.empty() || image.size() % 4 != 0 ||
        !std::has_single_bit(image.size() / 4))
        throw std::invalid_argument(
            "encryptRom: image must hold a power-of-two number of 32-bit blocks");
    if (sk != nullptr && sk->params != &params)
        throw std::invalid_argument("encryptRom: key/parameter mismatch");
    EncryptedRom rom;
    rom.depthBytes = static_cast<uint32_t>(image.size());
    const size_t totalBits = image.size() * 8;
    const uint32_t blocksPerLut = params.N1 / 32;
    const uint32_t lowBits = std::min(
        rom.addrBits(), static_cast<uint32_t>(std::countr_zero(blocksPerLut)));
    const size_t numLuts = size_t{1} << (rom.addrBits() - lowBits);

    std::vector<uint32_t> bits(params.N1);
    for (size_t t = 0; t < numLuts; t++) {
        for (uint32_t c = 0; c < params.N1; c++) {
            const size_t bit = t * params.N1 + c;
            bits[c] = bit < totalBits && imageBit(image, bit) ? 1 : 0;
        }
        rom.luts.push_back(encryptBitPoly(bits, sk, ns, params));
    }
    return rom;
}

std::vector<uint8_t> decryptRom(const EncryptedRom& rom, const SecretKey& sk)
{
    std::vector<uint8_t> image(rom.depthBytes, 0);
    const size_t totalBits = size_t{rom.depthBytes} * 8;
    const uint32_t N1 = sk.params->N1;
    for (size_t t = 0; t < rom.luts.size(); t++) {
        const auto bits = trlweDecrypt(rom.luts[t], sk);
        for (uint32_t c = 0; c < N1; c++) {
            const size_t bit = t * N1 + c;
            if (bit < totalBits && bits[c])
                image[bit / 8] |= 1u << (bit % 8);
        }
    }
    return image;
}

// ---------------------------------------------------------------------------
// Cost model

uint64_t ramReadCmuxCount(MemoryGeometry geom)
{
    return uint64_t{geom.w} * ((uint64_t{1} << geom.v) - 1);
}

uint64_t ramWriteCmuxCount(MemoryGeometry geom)
{
    return (uint64_t{geom.w} << geom.v) * geom.v;
}

uint64_t romCmuxCount(uint32_t depthBytes, uint32_t N1)
{
    const uint32_t blocks = depthBytes / 4;
    const uint32_t vrom = static_cast<uint32_t>(std::countr_zero(blocks));
    const uint32_t blocksPerLut = N1 / 32;
    const uint32_t lowBits =
        std::min(vrom, static_cast<uint32_t>(std::countr_zero(blocksPerLut)));
    const uint32_t highBits = vrom - lowBits;
    return ((uint64_t{1} << highBits) - 1) + lowBits;
}

CostEstimate costEstimate(MemoryGeometry geom, CostKind kind)
{
    CostEstimate e;
    const uint64_t v = geom.v, w = geom.w;
    const uint64_t words = uint64_t{1} << geom.v;
    switch (kind) {
    case CostKind::CmuxRam:
        e.gateEquivalents = 10 * v + w * (words + 1);
        e.cmuxCount = ramReadCmuxCount(geom) + ramWriteCmuxCount(geom);
        break;
    case CostKind::CmuxRom:
        e.gateEquivalents = 10 * v + w;
        e.cmuxCount = romCmuxCount(static_cast<uint32_t>(words * geom.w / 8),
                                   ParameterSet::tfhe80().N1);
        break;
    case CostKind::GateRamLowerBound:
        e.gateEquivalents = w * 2 * (words - 1);
        e.cmuxCount = 0;
        break;
    }
    return e;
}

// ---------------------------------------------------------------------------
// Serialization

void writeRam(BinWriter& w, const EncryptedRam& ram)
{
    w.u32(ram.geom.v);
    w.u32(ram.geom.w);
    w.u32(static_cast<uint32_t>(ram.cells.size()));
    for (const Trlwe& c : ram.cells)
        writeTrlwe(w, c);
}

EncryptedRam readRam(BinReader& r)
{
    EncryptedRam ram;
    ram.geom.v = r.u32();
    ram.geom.w = r.u32();
    const uint32_t count = r.u32();
    if (count != ram.geom.bits())
        throw std::runtime_error("corrupt RAM: cell count mismatch");
    ram.cells.resize(count);
    for (auto& c : ram.cells)
        c = readTrlwe(r);
    return ram;
}

std::vector<uint8_t> serializeRam(const EncryptedRam& ram,
                                  const ParameterSet& params)
{
    BinWriter w;
    writeHeader(w, kTagRam, params.name);
    writeRam(w, ram);
    return w.take();
}

EncryptedRam deserializeRam(const std::vector<uint8_t>& bytes)
{
    BinReader r(bytes);
    expectHeader(r, kTagRam);
    return readRam(r);
}

void writeRom(BinWriter& w, const EncryptedRom& rom)
{
    w.u32(rom.depthBytes);
    w.u32(static_cast<uint32_t>(rom.luts.size()));
    for (const Trlwe& c : rom.luts)
        writeTrlwe(w, c);
}

EncryptedRom readRom(BinReader& r)
{
    EncryptedRom rom;
    rom.depthBytes = r.u32();
    const uint32_t count = r.u32();
    rom.luts.resize(count);
    for (auto& c : rom.luts)
        c = readTrlwe(r);
    return rom;
}

std::vector<uint8_t> serializeRom(const EncryptedRom& rom,
                                  const ParameterSet& params)
{
    BinWriter w;
    writeHeader(w, kTagRom, params.name);
    writeRom(w, rom);
    return w.take();
}

EncryptedRom deserializeRom(const std::vector<uint8_t>& bytes)
{
    BinReader r(bytes);
    expectHeader(r, kTagRom);
    return readRom(r);
}

}  // namespace hvp::mem
