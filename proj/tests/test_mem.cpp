#include <doctest.h>

#include <vector>

#include "hvp/common/parallel.hpp"
#include "hvp/mem/mem.hpp"
#include "hvp/tfhe/counters.hpp"

using namespace hvp;
using namespace hvp::tfhe;
using namespace hvp::mem;

namespace {

struct Fixture {
    Csprng rng = Csprng::fromSeed(515253);
    const ParameterSet& det = ParameterSet::testDet();
    SecretKey sk = genSecretKey(det, rng);
    BootstrappingKey bk = BootstrappingKey::generate(sk, rng, true);
    NoiseSampler ns{rng, 0.0};
};

Fixture& fx()
{
    static Fixture f;
    return f;
}

// Single-port read-before-write reference model.
struct PlainRam {
    MemoryGeometry geom;
    std::vector<uint32_t> words;

    explicit PlainRam(MemoryGeometry g) : geom(g), words(g.words(), 0) {}

    uint32_t cycle(uint32_t addr, bool wflag, uint32_t wdata)
    {
        const uint32_t old = words[addr];
        if (wflag)
            words[addr] = wdata & ((1u << geom.w) - 1);
        return old;
    }
};

std::vector<uint8_t> wordsToImage(const std::vector<uint32_t>& words,
                                  MemoryGeometry geom)
{
    std::vector<uint8_t> image(geom.imageBytes(), 0);
    for (uint32_t A = 0; A < geom.words(); A++)
        for (uint32_t j = 0; j < geom.w; j++)
            if (words[A] >> j & 1) {
                const size_t bit = size_t{A} * geom.w + j;
                image[bit / 8] |= 1u << (bit % 8);
            }
    return image;
}

std::vector<Tlwe> encryptWord(uint32_t value, uint32_t width, Fixture& f)
{
    std::vector<Tlwe> bits;
    for (uint32_t i = 0; i < width; i++)
        bits.push_back(tlweEncrypt((value >> i & 1) != 0, f.sk, f.ns));
    return bits;
}

uint32_t decryptWord(std::span<const Tlwe> bits, const SecretKey& sk)
{
    uint32_t v = 0;
    for (size_t i = 0; i < bits.size(); i++)
        if (tlweDecrypt(bits[i], sk))
            v |= 1u << i;
    return v;
}

uint32_t decryptTrlweWord(std::span<const Trlwe> bits, const SecretKey& sk)
{
    uint32_t v = 0;
    for (size_t i = 0; i < bits.size(); i++)
        if (trlweDecryptAt(bits[i], 0, sk))
            v |= 1u << i;
    return v;
}

unsigned testThreads()
{
    return hardwareThreads();
}

}  // namespace

TEST_CASE("ram image round trips through encryption")
{
    auto& f = fx();
    MemoryGeometry geom{4, 8};

    SUBCASE("all-zero image decrypts to all zeros")
    {
        std::vector<uint8_t> image(geom.imageBytes(), 0);
        EncryptedRam ram = encryptRam(image, geom, f.det, &f.sk, &f.ns);
        CHECK(decryptRam(ram, f.sk) == image);
    }

    SUBCASE("random images round trip, 20 trials")
    {
        for (int trial = 0; trial < 20; trial++) {
            std::vector<uint8_t> image(geom.imageBytes());
            for (auto& b : image)
                b = static_cast<uint8_t>(f.rng());
            EncryptedRam ram = encryptRam(image, geom, f.det, &f.sk, &f.ns);
            CHECK(decryptRam(ram, f.sk) == image);
        }
    }

    SUBCASE("size mismatch is rejected")
    {
        std::vector<uint8_t> image(3);
        CHECK_THROWS(encryptRam(image, geom, f.det, &f.sk, &f.ns));
    }
}

TEST_CASE("trivial-mode memory decrypts under any secret key")
{
    auto& f = fx();
    MemoryGeometry geom{3, 8};
    std::vector<uint8_t> image(geom.imageBytes());
    for (auto& b : image)
        b = static_cast<uint8_t>(f.rng());
    EncryptedRam ram = encryptRam(image, geom, f.det, nullptr, nullptr);
    EncryptedRom rom = encryptRom(std::vector<uint8_t>(64, 0xA5), f.det,
                                  nullptr, nullptr);
    for (uint64_t s = 0; s < 3; s++) {
        Csprng rng = Csprng::fromSeed(7100 + s);
        SecretKey other = genSecretKey(f.det, rng);
        CHECK(decryptRam(ram, other) == image);
        CHECK(decryptRom(rom, other) == std::vector<uint8_t>(64, 0xA5));
    }
}

TEST_CASE("address_to_trgsw produces working selectors and counts")
{
    auto& f = fx();
    opCounters().reset();
    auto addrBits = encryptWord(0, 8, f);
    RamAddress addr = addressToTrgsw(addrBits, f.bk, testThreads());
    CHECK(addr.bits.size() == 8);
    CHECK(opCounters().circuitBootstrap.load() == 8);

    // Trivial 0 bits behave as selector 0 in a CMUX, tested per bit.
    std::vector<Tlwe> trivialBits(4, tlweTrivial(false, f.det));
    RamAddress triv = addressToTrgsw(trivialBits, f.bk, testThreads());
    PreparedAddress prep = prepareAddress(triv, f.det);
    std::vector<uint32_t> p(f.det.N1, 1), q(f.det.N1, 0);
    for (const auto& sel : prep.sel) {
        auto out = trlweDecrypt(cmux(sel, trlweEncrypt(p, f.sk, f.ns),
                                     trlweEncrypt(q, f.sk, f.ns)),
                                f.sk);
        CHECK(out == q);
    }
}

TEST_CASE("ram read unit fetches the addressed word")
{
    auto& f = fx();
    MemoryGeometry geom{2, 4};
    // Words {0, 1, 2, 3} at addresses 0..3.
    std::vector<uint32_t> words{0, 1, 2, 3};
    EncryptedRam ram =
        encryptRam(wordsToImage(words, geom), geom, f.det, &f.sk, &f.ns);

    for (uint32_t A = 0; A < 4; A++) {
        RamAddress addr = addressToTrgsw(encryptWord(A, 2, f), f.bk);
        PreparedAddress prep = prepareAddress(addr, f.det);
        auto read = ramReadUnit(ram, prep, testThreads());
        CHECK(decryptTrlweWord(read, f.sk) == words[A]);
    }
}

TEST_CASE("ram read unit cmux count matches w(2^v - 1)")
{
    auto& f = fx();
    MemoryGeometry geom{8, 16};
    std::vector<uint8_t> image(geom.imageBytes(), 0);
    EncryptedRam ram = encryptRam(image, geom, f.det, &f.sk, &f.ns);
    RamAddress addr = addressToTrgsw(encryptWord(77, 8, f), f.bk);
    PreparedAddress prep = prepareAddress(addr, f.det);
    opCounters().reset();
    ramReadUnit(ram, prep, testThreads());
    CHECK(opCounters().cmux.load() == 4080);
    CHECK(ramReadCmuxCount(geom) == 4080);
}

TEST_CASE("ram control unit multiplexes on the write flag")
{
    auto& f = fx();
    MemoryGeometry geom{3, 16};
    std::vector<uint32_t> words(geom.words());
    for (auto& w : words)
        w = f.rng() & 0xFFFF;
    EncryptedRam ram =
        encryptRam(wordsToImage(words, geom), geom, f.det, &f.sk, &f.ns);
    const uint32_t A = 5;
    RamAddress addr = addressToTrgsw(encryptWord(A, 3, f), f.bk);
    auto read = ramReadUnit(ram, prepareAddress(addr, f.det), testThreads());

    SUBCASE("wflag = 0 passes the read word through")
    {
        auto ctl = ramControlUnit(read, tlweEncrypt(false, f.sk, f.ns),
                                  encryptWord(0xBEEF, 16, f), f.bk,
                                  testThreads());
        CHECK(decryptWord(ctl.readOut, f.sk) == words[A]);
        uint32_t got = 0;
        for (size_t j = 0; j < 16; j++) {
            Tlwe bit = identityKeySwitch(sampleExtract(ctl.controlled[j], 0),
                                         f.bk);
            if (tlweDecrypt(bit, f.sk))
                got |= 1u << j;
        }
        CHECK(got == words[A]);
    }

    SUBCASE("wflag = 1 selects the write data")
    {
        auto ctl = ramControlUnit(read, tlweEncrypt(true, f.sk, f.ns),
                                  encryptWord(0xBEEF, 16, f), f.bk,
                                  testThreads());
        uint32_t got = 0;
        for (size_t j = 0; j < 16; j++) {
            Tlwe bit = identityKeySwitch(sampleExtract(ctl.controlled[j], 0),
                                         f.bk);
            if (tlweDecrypt(bit, f.sk))
                got |= 1u << j;
        }
        CHECK(got == 0xBEEF);
    }

    SUBCASE("read_out equals the plaintext RAM word for random states")
    {
        for (int trial = 0; trial < 100; trial++) {
            std::vector<uint32_t> ws(geom.words());
            for (auto& w : ws)
                w = f.rng() & 0xFFFF;
            EncryptedRam r2 =
                encryptRam(wordsToImage(ws, geom), geom, f.det, &f.sk, &f.ns);
            const uint32_t a2 = f.rng() & 7;
            RamAddress ad = addressToTrgsw(encryptWord(a2, 3, f), f.bk);
            auto rd =
                ramReadUnit(r2, prepareAddress(ad, f.det), testThreads());
            auto ctl = ramControlUnit(rd, tlweEncrypt(false, f.sk, f.ns),
                                      encryptWord(0, 16, f), f.bk,
                                      testThreads());
            CHECK(decryptWord(ctl.readOut, f.sk) == ws[a2]);
        }
    }
}

TEST_CASE("ram write unit writes exactly one word and refreshes the rest")
{
    auto& f = fx();
    MemoryGeometry geom{3, 8};
    std::vector<uint32_t> words(geom.words());
    for (auto& w : words)
        w = f.rng() & 0xFF;
    EncryptedRam ram =
        encryptRam(wordsToImage(words, geom), geom, f.det, &f.sk, &f.ns);

    SUBCASE("write X to A, read back everything, exhaustive at v=3")
    {
        for (uint32_t A = 0; A < geom.words(); A++) {
            const uint32_t X = f.rng() & 0xFF;
            auto out = ramCycle(ram, encryptWord(A, 3, f),
                                tlweEncrypt(true, f.sk, f.ns),
                                encryptWord(X, 8, f), f.bk, testThreads());
            // Read result reflects the pre-write contents.
            CHECK(decryptWord(out.readOut, f.sk) == words[A]);
            auto image = decryptRam(out.ram, f.sk);
            std::vector<uint32_t> expect = words;
            expect[A] = X;
            CHECK(image == wordsToImage(expect, geom));
        }
    }

    SUBCASE("wflag=0 leaves the whole RAM unchanged")
    {
        auto out = ramCycle(ram, encryptWord(2, 3, f),
                            tlweEncrypt(false, f.sk, f.ns),
                            encryptWord(0xFF, 8, f), f.bk, testThreads());
        CHECK(decryptRam(out.ram, f.sk) == wordsToImage(words, geom));
    }
}

TEST_CASE("ram write unit cmux count matches w * 2^v * v")
{
    auto& f = fx();
    MemoryGeometry geom{8, 16};
    std::vector<uint8_t> image(geom.imageBytes(), 0);
    EncryptedRam ram = encryptRam(image, geom, f.det, &f.sk, &f.ns);
    RamAddress addr = addressToTrgsw(encryptWord(3, 8, f), f.bk);
    PreparedAddress prep = prepareAddress(addr, f.det);
    std::vector<Trlwe> controlled(16, trlweTrivialMuAtZero(f.det));
    opCounters().reset();
    ramWriteUnit(ram, prep, controlled, f.bk, testThreads());
    CHECK(opCounters().cmux.load() == 32768);
    CHECK(ramWriteCmuxCount(geom) == 32768);
}

TEST_CASE("ram cycles track a plaintext model, 1000 ops at v=4 w=8")
{
    auto& f = fx();
    MemoryGeometry geom{4, 8};
    PlainRam model(geom);
    for (auto& w : model.words)
        w = f.rng() & 0xFF;
    EncryptedRam ram = encryptRam(wordsToImage(model.words, geom), geom,
                                  f.det, &f.sk, &f.ns);

    for (int op = 0; op < 1000; op++) {
        const uint32_t addr = f.rng() & 15;
        const bool wflag = (f.rng() & 1) != 0;
        const uint32_t wdata = f.rng() & 0xFF;
        auto out = ramCycle(ram, encryptWord(addr, 4, f),
                            tlweEncrypt(wflag, f.sk, f.ns),
                            encryptWord(wdata, 8, f), f.bk, testThreads());
        const uint32_t expectRead = model.cycle(addr, wflag, wdata);
        REQUIRE(decryptWord(out.readOut, f.sk) == expectRead);
        ram = std::move(out.ram);
    }
    CHECK(decryptRam(ram, f.sk) == wordsToImage(model.words, geom));
}

TEST_CASE("read of the written address returns the old value")
{
    auto& f = fx();
    MemoryGeometry geom{2, 4};
    std::vector<uint32_t> words{1, 2, 3, 4};
    EncryptedRam ram =
        encryptRam(wordsToImage(words, geom), geom, f.det, &f.sk, &f.ns);
    auto out = ramCycle(ram, encryptWord(1, 2, f),
                        tlweEncrypt(true, f.sk, f.ns), encryptWord(9, 4, f),
                        f.bk, testThreads());
    CHECK(decryptWord(out.readOut, f.sk) == 2);  // old value
    auto image = decryptRam(out.ram, f.sk);
    std::vector<uint32_t> expect{1, 9, 3, 4};
    CHECK(image == wordsToImage(expect, geom));
}

TEST_CASE("write-bar refresh keeps cells decodable over 10000 cycles")
{
    // Deterministic parameters make this exact; the production-parameter
    // companion runs in the acceptance suite.
    auto& f = fx();
    MemoryGeometry geom{2, 2};
    PlainRam model(geom);
    EncryptedRam ram = encryptRam(wordsToImage(model.words, geom), geom,
                                  f.det, &f.sk, &f.ns);
    Csprng rng = Csprng::fromSeed(99);
    for (int op = 0; op < 10000; op++) {
        const uint32_t addr = rng() & 3;
        const bool wflag = (rng() & 1) != 0;
        const uint32_t wdata = rng() & 3;
        auto out = ramCycle(ram, encryptWord(addr, 2, f),
                            tlweEncrypt(wflag, f.sk, f.ns),
                            encryptWord(wdata, 2, f), f.bk, testThreads());
        model.cycle(addr, wflag, wdata);
        ram = std::move(out.ram);
    }
    CHECK(decryptRam(ram, f.sk) == wordsToImage(model.words, geom));
}

TEST_CASE("rom read returns every block exactly, exhaustive")
{
    auto& f = fx();
    std::vector<uint8_t> image(512);
    for (auto& b : image)
        b = static_cast<uint8_t>(f.rng());
    EncryptedRom rom = encryptRom(image, f.det, &f.sk, &f.ns);
    CHECK(decryptRom(rom, f.sk) == image);
    CHECK(rom.addrBits() == 7);

    for (uint32_t blk = 0; blk < 128; blk++) {
        RamAddress addr = addressToTrgsw(encryptWord(blk, 7, f), f.bk);
        auto out = romRead(rom, prepareAddress(addr, f.det), f.bk,
                           testThreads());
        uint32_t got = 0;
        for (int k = 0; k < 32; k++)
            if (tlweDecrypt(out[k], f.sk))
                got |= 1u << k;
        const uint32_t expect = static_cast<uint32_t>(image[4 * blk]) |
                                static_cast<uint32_t>(image[4 * blk + 1]) << 8 |
                                static_cast<uint32_t>(image[4 * blk + 2]) << 16 |
                                static_cast<uint32_t>(image[4 * blk + 3]) << 24;
        REQUIRE(got == expect);
    }
}

TEST_CASE("rom is immutable: reads do not change its serialization")
{
    auto& f = fx();
    std::vector<uint8_t> image(64);
    for (auto& b : image)
        b = static_cast<uint8_t>(f.rng());
    EncryptedRom rom = encryptRom(image, f.det, &f.sk, &f.ns);
    auto before = serializeRom(rom, f.det);
    for (uint32_t blk = 0; blk < 16; blk++) {
        RamAddress addr = addressToTrgsw(encryptWord(blk, 4, f), f.bk);
        romRead(rom, prepareAddress(addr, f.det), f.bk, testThreads());
    }
    CHECK(serializeRom(rom, f.det) == before);
}

TEST_CASE("rom cmux count at the paper-scale geometry is 8")
{
    // 512-byte ROM packed into N1=1024 LUTs: 3 tree CMUXes + 5 rotations.
    CHECK(romCmuxCount(512, 1024) == 8);

    auto& f = fx();
    // At the deterministic test geometry (N1=64) the same image costs more.
    std::vector<uint8_t> image(512, 0);
    EncryptedRom rom = encryptRom(image, f.det, &f.sk, &f.ns);
    RamAddress addr = addressToTrgsw(encryptWord(0, 7, f), f.bk);
    PreparedAddress prep = prepareAddress(addr, f.det);
    opCounters().reset();
    romRead(rom, prep, f.bk, testThreads());
    CHECK(opCounters().cmux.load() == romCmuxCount(512, f.det.N1));
}

TEST_CASE("cost model reproduces the closed forms")
{
    MemoryGeometry geom{8, 16};
    CHECK(costEstimate(geom, CostKind::CmuxRom).gateEquivalents == 96);
    CHECK(costEstimate(geom, CostKind::CmuxRam).gateEquivalents == 4192);
    CHECK(costEstimate(geom, CostKind::GateRamLowerBound).gateEquivalents ==
          8160);

    // CMUX memory beats the two-input-gate construction wherever
    // w >= 10v / (2^v - 3).
    for (uint32_t v = 2; v <= 10; v++)
        for (uint32_t w : {1u, 2u, 8u, 16u, 32u}) {
            const double bound = 10.0 * v / ((1u << v) - 3);
            if (w >= bound) {
                MemoryGeometry g{v, w};
                CHECK(costEstimate(g, CostKind::CmuxRam).gateEquivalents <
                      costEstimate(g, CostKind::GateRamLowerBound)
                          .gateEquivalents);
            }
        }
}

TEST_CASE("ram serialization round trips")
{
    auto& f = fx();
    MemoryGeometry geom{3, 4};
    std::vector<uint8_t> image(geom.imageBytes());
    for (auto& b : image)
        b = static_cast<uint8_t>(f.rng());
    EncryptedRam ram = encryptRam(image, geom, f.det, &f.sk, &f.ns);
    auto bytes = serializeRam(ram, f.det);
    EncryptedRam back = deserializeRam(bytes);
    CHECK(back.geom.v == 3);
    CHECK(back.geom.w == 4);
    CHECK(decryptRam(back, f.sk) == image);
    CHECK(serializeRam(back, f.det) == bytes);
}
