#include "hvp/netlist/snapshot.hpp"

#include <cstring>

#include "hvp/tfhe/serialize.hpp"

namespace hvp::netlist {

namespace {

enum : uint8_t { kBackendPlain = 0, kBackendTfhe = 1 };

void writeCommonHeader(BinWriter& w, uint8_t backendTag,
                       const std::string& paramName, const Netlist& nl,
                       uint64_t cycle)
{
    w.bytes(kSnapshotMagic, 4);
    w.u16(kSnapshotVersion);
    w.u8(backendTag);
    w.str(paramName);
    w.str(nl.name);
    w.u64(netlistHash(nl));
    w.u64(cycle);
}

struct CommonHeader {
    uint8_t backendTag;
    std::string paramName;
    std::string netlistName;
    uint64_t hash;
    uint64_t cycle;
};

CommonHeader readCommonHeader(BinReader& r)
{
    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, kSnapshotMagic, 4) != 0)
        throw std::runtime_error("bad snapshot magic (expected HVPS)");
    const uint16_t version = r.u16();
    if (version != kSnapshotVersion)
        throw std::runtime_error("unsupported snapshot version " +
                                 std::to_string(version));
    CommonHeader h;
    h.backendTag = r.u8();
    h.paramName = r.str();
    h.netlistName = r.str();
    h.hash = r.u64();
    h.cycle = r.u64();
    return h;
}

void checkNetlist(const CommonHeader& h, const Netlist& nl)
{
    if (h.netlistName != nl.name || h.hash != netlistHash(nl))
        throw std::runtime_error("snapshot was taken on netlist '" +
                                 h.netlistName + "', not '" + nl.name + "'");
}

}  // namespace

std::vector<uint8_t> snapshotSave(const Evaluator<PlainBackend>& ev)
{
    BinWriter w;
    writeCommonHeader(w, kBackendPlain, "plain", ev.netlist(), ev.cycle());
    const auto& dffs = ev.dffState();
    w.u32(static_cast<uint32_t>(dffs.size()));
    for (uint8_t b : dffs)
        w.u8(b);
    w.u8(ev.hasRam() ? 1 : 0);
    if (ev.hasRam()) {
        w.u32(ev.ram().geom.v);
        w.u32(ev.ram().geom.w);
        w.u32vec(ev.ram().words);
    }
    w.u8(ev.hasRom() ? 1 : 0);
    if (ev.hasRom()) {
        w.u32(static_cast<uint32_t>(ev.rom().image.size()));
        w.bytes(ev.rom().image.data(), ev.rom().image.size());
    }
    return w.take();
}

std::vector<uint8_t> snapshotSave(const Evaluator<TfheBackend>& ev)
{
    BinWriter w;
    writeCommonHeader(w, kBackendTfhe, ev.backend().bk->params().name,
                      ev.netlist(), ev.cycle());
    const auto& dffs = ev.dffState();
    w.u32(static_cast<uint32_t>(dffs.size()));
    for (const auto& b : dffs)
        tfhe::writeTlwe(w, b);
    w.u8(ev.hasRam() ? 1 : 0);
    if (ev.hasRam())
        mem::writeRam(w, ev.ram().enc);
    w.u8(ev.hasRom() ? 1 : 0);
    if (ev.hasRom())
        mem::writeRom(w, ev.rom().enc);
    return w.take();
}

Evaluator<PlainBackend> snapshotLoad(const Netlist& nl, PlainBackend backend,
                                     const std::vector<uint8_t>& bytes)
{
    BinReader r(bytes);
    CommonHeader h = readCommonHeader(r);
    if (h.backendTag != kBackendPlain)
        throw std::runtime_error("snapshot backend is not 'plain'");
    checkNetlist(h, nl);

    Evaluator<PlainBackend> ev(nl, backend);
    ev.setCycle(h.cycle);
    const uint32_t dffCount = r.u32();
    std::vector<uint8_t> dffs(dffCount);
    for (auto& b : dffs)
        b = r.u8();
    ev.setDffStateRaw(std::move(dffs));
    if (r.u8()) {
        PlainBackend::Ram ram;
        ram.geom.v = r.u32();
        ram.geom.w = r.u32();
        ram.words = r.u32vec();
        ev.setRam(std::move(ram));
    }
    if (r.u8()) {
        PlainBackend::Rom rom;
        rom.image.resize(r.u32());
        r.raw(rom.image.data(), rom.image.size());
        ev.setRom(std::move(rom));
    }
    return ev;
}

Evaluator<TfheBackend> snapshotLoad(const Netlist& nl, TfheBackend backend,
                                    const std::vector<uint8_t>& bytes)
{
    BinReader r(bytes);
    CommonHeader h = readCommonHeader(r);
    if (h.backendTag != kBackendTfhe)
        throw std::runtime_error("snapshot backend is not 'tfhe'");
    if (h.paramName != backend.bk->params().name)
        throw std::runtime_error("snapshot parameter set '" + h.paramName +
                                 "' does not match key '" +
                                 backend.bk->params().name + "'");
    checkNetlist(h, nl);

    Evaluator<TfheBackend> ev(nl, backend);
    ev.setCycle(h.cycle);
    const uint32_t dffCount = r.u32();
    std::vector<tfhe::Tlwe> dffs(dffCount);
    for (auto& b : dffs)
        b = tfhe::readTlwe(r);
    ev.setDffStateRaw(std::move(dffs));
    if (r.u8()) {
        TfheBackend::Ram ram;
        ram.enc = mem::readRam(r);
        ev.setRam(std::move(ram));
    }
    if (r.u8()) {
        TfheBackend::Rom rom;
        rom.enc = mem::readRom(r);
        ev.setRom(std::move(rom));
    }
    return ev;
}

SnapshotInfo snapshotPeek(const std::vector<uint8_t>& bytes)
{
    BinReader r(bytes);
    CommonHeader h = readCommonHeader(r);
    SnapshotInfo info;
    info.backendTag = h.backendTag == kBackendPlain ? "plain" : "tfhe";
    info.paramName = h.paramName;
    info.netlistName = h.netlistName;
    return info;
}

}  // namespace hvp::netlist
