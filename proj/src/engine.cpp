#include "hvp/netlist/engine.hpp"

namespace hvp::netlist {

namespace {

bool plainGate(CellKind kind, bool a, bool b, bool s)
{
    switch (kind) {
    case CellKind::And:
        return a && b;
    case CellKind::AndNot:
        return a && !b;
    case CellKind::Mux:
        return s ? a : b;
    case CellKind::Nand:
        return !(a && b);
    case CellKind::Nor:
        return !(a || b);
    case CellKind::Not:
        return !a;
    case CellKind::Or:
        return a || b;
    case CellKind::OrNot:
        return a || !b;
    case CellKind::Xnor:
        return a == b;
    case CellKind::Xor:
        return a != b;
    default:
        throw std::runtime_error("not a gate");
    }
}

tfhe::GateKind toTfheGate(CellKind kind)
{
    switch (kind) {
    case CellKind::And:
        return tfhe::GateKind::And;
    case CellKind::AndNot:
        return tfhe::GateKind::AndNot;
    case CellKind::Mux:
        return tfhe::GateKind::Mux;
    case CellKind::Nand:
        return tfhe::GateKind::Nand;
    case CellKind::Nor:
        return tfhe::GateKind::Nor;
    case CellKind::Not:
        return tfhe::GateKind::Not;
    case CellKind::Or:
        return tfhe::GateKind::Or;
    case CellKind::OrNot:
        return tfhe::GateKind::OrNot;
    case CellKind::Xnor:
        return tfhe::GateKind::Xnor;
    case CellKind::Xor:
        return tfhe::GateKind::Xor;
    default:
        throw std::runtime_error("not a gate");
    }
}

}  // namespace

PlainBackend::Bit PlainBackend::gate(CellKind kind,
                                     std::span<const Bit* const> in) const
{
    if (kind == CellKind::Not)
        return plainGate(kind, *in[0], false, false) ? 1 : 0;
    if (kind == CellKind::Mux)
        return plainGate(kind, *in[1], *in[2], *in[0]) ? 1 : 0;
    return plainGate(kind, *in[0], *in[1], false) ? 1 : 0;
}

std::vector<PlainBackend::Bit> PlainBackend::romRead(
    const Rom& rom, std::span<const Bit* const> addr) const
{
    uint32_t block = 0;
    for (size_t i = 0; i < addr.size(); i++)
        if (*addr[i])
            block |= 1u << i;
    const size_t blocks = rom.image.size() / 4;
    if (block >= blocks)
        throw std::runtime_error("ROM address out of range");
    std::vector<Bit> out(32);
    for (int k = 0; k < 32; k++)
        out[k] = (rom.image[4 * block + k / 8] >> (k % 8)) & 1;
    return out;
}

std::vector<PlainBackend::Bit> PlainBackend::ramCycle(
    Ram& ram, std::span<const Bit* const> addr, const Bit& wflag,
    std::span<const Bit* const> wdata) const
{
    uint32_t a = 0;
    for (size_t i = 0; i < addr.size(); i++)
        if (*addr[i])
            a |= 1u << i;
    const uint32_t old = ram.words.at(a);
    if (wflag) {
        uint32_t w = 0;
        for (size_t i = 0; i < wdata.size(); i++)
            if (*wdata[i])
                w |= 1u << i;
        ram.words[a] = w;
    }
    std::vector<Bit> out(wdata.size());
    for (size_t i = 0; i < wdata.size(); i++)
        out[i] = (old >> i) & 1;
    return out;
}

TfheBackend::Bit TfheBackend::gate(CellKind kind,
                                   std::span<const Bit* const> in) const
{
    std::vector<Bit> args;
    args.reserve(in.size());
    for (const Bit* p : in)
        args.push_back(*p);
    return tfhe::homGate(toTfheGate(kind), args, *bk);
}

std::vector<TfheBackend::Bit> TfheBackend::romRead(
    const Rom& rom, std::span<const Bit* const> addr) const
{
    std::vector<Bit> bits;
    bits.reserve(addr.size());
    for (const Bit* p : addr)
        bits.push_back(*p);
    mem::RamAddress sel = mem::addressToTrgsw(bits, *bk, threads);
    return mem::romRead(rom.enc, mem::prepareAddress(sel, bk->params()), *bk,
                        threads);
}

std::vector<TfheBackend::Bit> TfheBackend::ramCycle(
    Ram& ram, std::span<const Bit* const> addr, const Bit& wflag,
    std::span<const Bit* const> wdata) const
{
    std::vector<Bit> addrBits, wdataBits;
    for (const Bit* p : addr)
        addrBits.push_back(*p);
    for (const Bit* p : wdata)
        wdataBits.push_back(*p);
    mem::RamCycleOut out =
        mem::ramCycle(ram.enc, addrBits, wflag, wdataBits, *bk, threads);
    ram.enc = std::move(out.ram);
    return std::move(out.readOut);
}

uint64_t netlistHash(const Netlist& nl)
{
    uint64_t h = 1469598103934665603ull;
    auto mix = [&](uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    mix(nl.netCount);
    mix(nl.cells.size());
    for (const auto& c : nl.cells) {
        mix(static_cast<uint64_t>(c.id));
        mix(static_cast<uint64_t>(c.kind));
        for (int x : c.inputs)
            mix(static_cast<uint64_t>(x) + 0x9e3779b9);
        for (int x : c.outputs)
            mix(static_cast<uint64_t>(x) + 0x7f4a7c15);
    }
    return h;
}

}  // namespace hvp::netlist
