#include "hvp/tfhe/serialize.hpp"

namespace hvp::tfhe {

void writeHeader(BinWriter& w, uint8_t tag, const std::string& paramName)
{
    w.bytes(kMagic, 4);
    w.u8(tag);
    w.u16(kFormatVersion);
    w.str(paramName);
}

FileHeader readHeader(BinReader& r)
{
    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("bad file magic (expected HVP1)");
    FileHeader h;
    h.tag = r.u8();
    h.version = r.u16();
    h.paramName = r.str();
    return h;
}

FileHeader expectHeader(BinReader& r, uint8_t tag)
{
    FileHeader h = readHeader(r);
    if (h.tag != tag)
        throw std::runtime_error("unexpected file type tag " +
                                 std::to_string(h.tag) + " (expected " +
                                 std::to_string(tag) + ")");
    if (h.version != kFormatVersion)
        throw std::runtime_error("unsupported format version " +
                                 std::to_string(h.version));
    return h;
}

void writeTlwe(BinWriter& w, const Tlwe& c)
{
    w.u8(c.level);
    w.u32vec(c.a);
    w.u32(c.b);
}

Tlwe readTlwe(BinReader& r)
{
    Tlwe c;
    c.level = r.u8();
    c.a = r.u32vec();
    c.b = r.u32();
    return c;
}

void writeTrlwe(BinWriter& w, const Trlwe& c)
{
    w.u8(c.level);
    w.u32vec(c.a);
    w.u32vec(c.b);
}

Trlwe readTrlwe(BinReader& r)
{
    Trlwe c;
    c.level = r.u8();
    c.a = r.u32vec();
    c.b = r.u32vec();
    if (c.a.size() != c.b.size())
        throw std::runtime_error("corrupt TRLWE: mismatched polynomials");
    return c;
}

void writeTrgsw(BinWriter& w, const Trgsw& c)
{
    w.u8(c.level);
    w.u32(static_cast<uint32_t>(c.rows.size()));
    for (const auto& row : c.rows) {
        w.u32vec(row.a);
        w.u32vec(row.b);
    }
}

Trgsw readTrgsw(BinReader& r)
{
    Trgsw c;
    c.level = r.u8();
    const uint32_t rows = r.u32();
    c.rows.resize(rows);
    for (auto& row : c.rows) {
        row.level = c.level;
        row.a = r.u32vec();
        row.b = r.u32vec();
    }
    return c;
}

void writeTrgswLvl2(BinWriter& w, const TrgswLvl2& c)
{
    w.u8(c.level);
    w.u32(static_cast<uint32_t>(c.rows.size()));
    for (const auto& row : c.rows) {
        w.u64vec(row.a);
        w.u64vec(row.b);
    }
}

TrgswLvl2 readTrgswLvl2(BinReader& r)
{
    TrgswLvl2 c;
    c.level = r.u8();
    const uint32_t rows = r.u32();
    c.rows.resize(rows);
    for (auto& row : c.rows) {
        row.level = c.level;
        row.a = r.u64vec();
        row.b = r.u64vec();
    }
    return c;
}

std::vector<uint8_t> serializeSecretKey(const SecretKey& sk)
{
    BinWriter w;
    writeHeader(w, kTagSecretKey, sk.params->name);
    w.u32vec(sk.lv0);
    w.u32vec(sk.lv1);
    w.u32vec(sk.lv2);
    return w.take();
}

SecretKey deserializeSecretKey(const std::vector<uint8_t>& bytes)
{
    BinReader r(bytes);
    FileHeader h = expectHeader(r, kTagSecretKey);
    SecretKey sk;
    sk.params = &ParameterSet::byName(h.paramName);
    sk.lv0 = r.u32vec();
    sk.lv1 = r.u32vec();
    sk.lv2 = r.u32vec();
    if (sk.lv0.size() != sk.params->n || sk.lv1.size() != sk.params->N1 ||
        sk.lv2.size() != sk.params->N2)
        throw std::runtime_error("secret key does not match parameter set");
    return sk;
}

namespace {

void writeKsk(BinWriter& w, const KeySwitchKey& k)
{
    w.u32(k.N1);
    w.u32(k.t);
    w.u32(k.baseBits);
    w.u32(k.n);
    w.u32vec(k.data);
}

KeySwitchKey readKsk(BinReader& r)
{
    KeySwitchKey k;
    k.N1 = r.u32();
    k.t = r.u32();
    k.baseBits = r.u32();
    k.n = r.u32();
    k.data = r.u32vec();
    return k;
}

void writePks(BinWriter& w, const PrivKeySwitchKey& k)
{
    w.u32(k.N2);
    w.u32(k.t);
    w.u32(k.baseBits);
    w.u32(k.N1);
    w.u32vec(k.data);
}

PrivKeySwitchKey readPks(BinReader& r)
{
    PrivKeySwitchKey k;
    k.N2 = r.u32();
    k.t = r.u32();
    k.baseBits = r.u32();
    k.N1 = r.u32();
    k.data = r.u32vec();
    return k;
}

}  // namespace

std::vector<uint8_t> serializeBootstrappingKey(const BootstrappingKey& bk)
{
    BinWriter w;
    writeHeader(w, kTagBootstrappingKey, bk.params().name);
    w.u8(bk.hasCircuitBootstrapping() ? 1 : 0);
    w.u32(static_cast<uint32_t>(bk.bk1Raw().size()));
    for (const auto& g : bk.bk1Raw())
        writeTrgsw(w, g);
    w.u32(static_cast<uint32_t>(bk.bk2Raw().size()));
    for (const auto& g : bk.bk2Raw())
        writeTrgswLvl2(w, g);
    writeKsk(w, bk.ksk());
    if (bk.hasCircuitBootstrapping()) {
        writePks(w, bk.pksNegS());
        writePks(w, bk.pksId());
    }
    return w.take();
}

BootstrappingKey deserializeBootstrappingKey(const std::vector<uint8_t>& bytes)
{
    BinReader r(bytes);
    FileHeader h = expectHeader(r, kTagBootstrappingKey);
    const ParameterSet& params = ParameterSet::byName(h.paramName);
    const bool hasCb = r.u8() != 0;
    std::vector<Trgsw> bk1(r.u32());
    for (auto& g : bk1)
        g = readTrgsw(r);
    std::vector<TrgswLvl2> bk2(r.u32());
    for (auto& g : bk2)
        g = readTrgswLvl2(r);
    KeySwitchKey ksk = readKsk(r);
    PrivKeySwitchKey pksNegS, pksId;
    if (hasCb) {
        pksNegS = readPks(r);
        pksId = readPks(r);
    }
    return BootstrappingKey::fromParts(params, std::move(bk1), std::move(bk2),
                                       std::move(ksk), std::move(pksNegS),
                                       std::move(pksId), hasCb);
}

std::vector<uint8_t> serializeTlwe(const Tlwe& c, const ParameterSet& params)
{
    BinWriter w;
    writeHeader(w, kTagTlwe, params.name);
    writeTlwe(w, c);
    return w.take();
}

Tlwe deserializeTlwe(const std::vector<uint8_t>& bytes)
{
    BinReader r(bytes);
    expectHeader(r, kTagTlwe);
    return readTlwe(r);
}

}  // namespace hvp::tfhe
