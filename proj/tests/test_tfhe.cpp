#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "hvp/common/parallel.hpp"
#include "hvp/tfhe/counters.hpp"
#include "hvp/tfhe/fft.hpp"
#include "hvp/tfhe/ops.hpp"
#include "hvp/tfhe/poly.hpp"
#include "hvp/tfhe/serialize.hpp"

using namespace hvp;
using namespace hvp::tfhe;

namespace {

// Test double that pins the mask to zero so encryption formulas can be
// checked coefficient by coefficient.
class ZeroMaskSampler : public NoiseSampler {
public:
    using NoiseSampler::NoiseSampler;
    uint32_t uniform32() override
    {
        return 0;
    }
    uint64_t uniform64() override
    {
        return 0;
    }
};

struct Fixture {
    Csprng rng = Csprng::fromSeed(20200729);
    const ParameterSet& det = ParameterSet::testDet();
    const ParameterSet& prod = ParameterSet::tfhe80();
    SecretKey skDet = genSecretKey(det, rng);
    SecretKey skProd = genSecretKey(prod, rng);
    BootstrappingKey bkDet = BootstrappingKey::generate(skDet, rng, true);
    BootstrappingKey bkProd = BootstrappingKey::generate(skProd, rng, false);

    NoiseSampler detSampler{rng, 0.0};
    NoiseSampler prodSampler{rng, prod.alpha0};
};

Fixture& fx()
{
    static Fixture f;
    return f;
}

bool truth(GateKind kind, bool a, bool b, bool c = false)
{
    switch (kind) {
    case GateKind::And:
        return a && b;
    case GateKind::AndNot:
        return a && !b;
    case GateKind::Nand:
        return !(a && b);
    case GateKind::Nor:
        return !(a || b);
    case GateKind::Or:
        return a || b;
    case GateKind::OrNot:
        return a || !b;
    case GateKind::Xnor:
        return a == b;
    case GateKind::Xor:
        return a != b;
    case GateKind::Not:
        return !a;
    case GateKind::Mux:
        return a ? b : c;
    }
    return false;
}

double phaseError(const Tlwe& ct, const SecretKey& sk, bool m)
{
    const uint32_t expected =
        m ? kMu32 : static_cast<uint32_t>(0) - kMu32;
    const int32_t err = static_cast<int32_t>(tlwePhase(ct, sk) - expected);
    return std::abs(static_cast<double>(err)) / 4294967296.0;
}

double stddevOfErrors(const std::vector<double>& errs)
{
    double sum2 = 0;
    for (double e : errs)
        sum2 += e * e;
    return std::sqrt(sum2 / static_cast<double>(errs.size()));
}

}  // namespace

TEST_CASE("parameter sets validate and resolve by name")
{
    CHECK(ParameterSet::byName("tfhe-80").n == 500);
    CHECK(ParameterSet::byName("test-det").deterministic());
    CHECK(!ParameterSet::tfhe80().deterministic());
    CHECK_THROWS(ParameterSet::byName("nope"));
}

TEST_CASE("fft negacyclic product matches schoolbook")
{
    Csprng rng = Csprng::fromSeed(7);
    for (uint32_t N : {64u, 1024u}) {
        std::vector<int32_t> digits(N);
        std::vector<uint32_t> poly(N);
        for (auto& d : digits)
            d = static_cast<int32_t>(rng() % 1024) - 512;
        for (auto& p : poly)
            p = rng();

        std::vector<uint32_t> exact(N, 0);
        polyMulAccExact(exact.data(), digits.data(), poly.data(), N);

        const FftPlan& plan = fftPlan(N);
        const size_t M = plan.M();
        std::vector<double> dre(M), dim(M), pre(M), pim(M);
        plan.forward(dre.data(), dim.data(), digits.data());
        plan.forward(pre.data(), pim.data(), poly.data());
        for (size_t k = 0; k < M; k++) {
            const double xr = dre[k] * pre[k] - dim[k] * pim[k];
            const double xi = dre[k] * pim[k] + dim[k] * pre[k];
            dre[k] = xr;
            dim[k] = xi;
        }
        std::vector<uint32_t> viaFft(N);
        plan.inverseToTorus(viaFft.data(), dre.data(), dim.data());

        for (uint32_t i = 0; i < N; i++) {
            const int32_t diff =
                static_cast<int32_t>(viaFft[i] - exact[i]);
            CHECK(std::abs(diff) <= 4);
        }
    }
}

TEST_CASE("fft negacyclic product matches schoolbook on 64-bit words")
{
    Csprng rng = Csprng::fromSeed(8);
    const uint32_t N = 2048;
    std::vector<int32_t> digits(N);
    std::vector<uint64_t> poly(N);
    for (auto& d : digits)
        d = static_cast<int32_t>(rng() % 512) - 256;
    for (auto& p : poly)
        p = (static_cast<uint64_t>(rng()) << 32) | rng();

    std::vector<uint64_t> exact(N, 0);
    polyMulAccExact(exact.data(), digits.data(), poly.data(), N);

    const FftPlan& plan = fftPlan(N);
    const size_t M = plan.M();
    std::vector<double> dre(M), dim(M), pre(M), pim(M);
    plan.forward(dre.data(), dim.data(), digits.data());
    plan.forward(pre.data(), pim.data(), poly.data());
    for (size_t k = 0; k < M; k++) {
        const double xr = dre[k] * pre[k] - dim[k] * pim[k];
        const double xi = dre[k] * pim[k] + dim[k] * pre[k];
        dre[k] = xr;
        dim[k] = xi;
    }
    std::vector<uint64_t> viaFft(N);
    plan.inverseToTorus(viaFft.data(), dre.data(), dim.data());

    for (uint32_t i = 0; i < N; i++) {
        const int64_t diff = static_cast<int64_t>(viaFft[i] - exact[i]);
        // Error budget: far below the level-2 margin of 2^43.
        CHECK(std::abs(diff) <= (int64_t{1} << 30));
    }
}

TEST_CASE("gen_secret_key: lengths, determinism, distinctness")
{
    Csprng rng = Csprng::fromSeed(1);
    SecretKey sk = genSecretKey(ParameterSet::tfhe80(), rng);
    CHECK(sk.lv0.size() == 500);
    for (uint32_t b : sk.lv0)
        CHECK((b == 0 || b == 1));

    // Fixed seed reproduces the key.
    Csprng r1 = Csprng::fromSeed(42), r2 = Csprng::fromSeed(42);
    SecretKey k1 = genSecretKey(ParameterSet::testDet(), r1);
    SecretKey k2 = genSecretKey(ParameterSet::testDet(), r2);
    CHECK(k1.lv0 == k2.lv0);
    CHECK(k1.lv1 == k2.lv1);
    CHECK(k1.lv2 == k2.lv2);

    // Distinct seeds give distinct keys.
    for (uint64_t s = 0; s < 10; s++) {
        Csprng ra = Csprng::fromSeed(1000 + s), rb = Csprng::fromSeed(2000 + s);
        SecretKey ka = genSecretKey(ParameterSet::testDet(), ra);
        SecretKey kb = genSecretKey(ParameterSet::testDet(), rb);
        CHECK(ka.lv0 != kb.lv0);
    }
}

TEST_CASE("tlwe encryption formula with forced zero mask and noise")
{
    auto& f = fx();
    Csprng rng = Csprng::fromSeed(3);
    ZeroMaskSampler zs(rng, 0.0);
    Tlwe one = tlweEncrypt(true, f.skDet, zs);
    CHECK(one.b == kMu32);
    for (uint32_t x : one.a)
        CHECK(x == 0);
    Tlwe zero = tlweEncrypt(false, f.skDet, zs);
    CHECK(zero.b == static_cast<uint32_t>(0) - kMu32);
}

TEST_CASE("tlwe round trip at production parameters, 1000 trials")
{
    auto& f = fx();
    Csprng rng = Csprng::fromSeed(4);
    NoiseSampler ns(rng, f.prod.alpha0);
    for (int i = 0; i < 1000; i++) {
        const bool m = (rng() & 1) != 0;
        CHECK(tlweDecrypt(tlweEncrypt(m, f.skProd, ns), f.skProd) == m);
    }
}

TEST_CASE("tlwe decrypt of explicit trivial vectors")
{
    auto& f = fx();
    CHECK(tlweDecrypt(tlweTrivial(true, f.det), f.skDet) == true);
    CHECK(tlweDecrypt(tlweTrivial(false, f.det), f.skDet) == false);
    Tlwe t = tlweTrivial(true, f.det);
    CHECK(t.b == kMu32);
    for (uint32_t x : t.a)
        CHECK(x == 0);
}

TEST_CASE("trivial ciphertexts decrypt under every secret key")
{
    auto& f = fx();
    for (uint64_t s = 0; s < 5; s++) {
        Csprng rng = Csprng::fromSeed(900 + s);
        SecretKey sk = genSecretKey(f.det, rng);
        CHECK(tlweDecrypt(tlweTrivial(true, f.det), sk) == true);
        CHECK(tlweDecrypt(tlweTrivial(false, f.det), sk) == false);
    }
}

TEST_CASE("hom gate accepts mixed trivial and real inputs")
{
    auto& f = fx();
    Csprng rng = Csprng::fromSeed(5);
    NoiseSampler ns(rng, 0.0);
    Tlwe real = tlweEncrypt(true, f.skDet, ns);
    Tlwe triv = tlweTrivial(true, f.det);
    std::vector<Tlwe> in{triv, real};
    CHECK(tlweDecrypt(homGate(GateKind::And, in, f.bkDet), f.skDet) == true);
}

TEST_CASE("trlwe encryption formula and round trips")
{
    auto& f = fx();
    Csprng rng = Csprng::fromSeed(6);

    SUBCASE("all-zero message with zero mask gives b = -mu everywhere")
    {
        ZeroMaskSampler zs(rng, 0.0);
        std::vector<uint32_t> zeros(f.det.N1, 0);
        Trlwe ct = trlweEncrypt(zeros, f.skDet, zs);
        for (uint32_t i = 0; i < f.det.N1; i++) {
            CHECK(ct.a[i] == 0);
            CHECK(ct.b[i] == static_cast<uint32_t>(0) - kMu32);
        }
    }

    SUBCASE("random messages round trip, 100 trials")
    {
        NoiseSampler ns(rng, 0.0);
        for (int trial = 0; trial < 100; trial++) {
            std::vector<uint32_t> m(f.det.N1);
            for (auto& b : m)
                b = rng() & 1;
            CHECK(trlweDecrypt(trlweEncrypt(m, f.skDet, ns), f.skDet) == m);
        }
    }

    SUBCASE("random messages round trip at production, 20 trials")
    {
        NoiseSampler ns(rng, f.prod.alpha1);
        for (int trial = 0; trial < 20; trial++) {
            std::vector<uint32_t> m(f.prod.N1);
            for (auto& b : m)
                b = rng() & 1;
            CHECK(trlweDecrypt(trlweEncrypt(m, f.skProd, ns), f.skProd) == m);
        }
    }

    SUBCASE("basis vector X^k recovers exactly coefficient k")
    {
        NoiseSampler ns(rng, 0.0);
        const uint32_t k = 13;
        std::vector<uint32_t> m(f.det.N1, 0);
        m[k] = 1;
        auto bits = trlweDecrypt(trlweEncrypt(m, f.skDet, ns), f.skDet);
        for (uint32_t i = 0; i < f.det.N1; i++)
            CHECK(bits[i] == (i == k ? 1 : 0));
    }
}

TEST_CASE("trgsw of zero adds no gadget offset")
{
    auto& f = fx();
    Csprng rng = Csprng::fromSeed(9);
    ZeroMaskSampler zs(rng, 0.0);
    Trgsw g = trgswEncrypt(false, f.skDet, zs);
    for (const auto& row : g.rows)
        for (uint32_t i = 0; i < f.det.N1; i++) {
            CHECK(row.a[i] == 0);
            CHECK(row.b[i] == 0);
        }
}

TEST_CASE("trgsw as cmux selector, 100 trials per value")
{
    auto& f = fx();
    Csprng rng = Csprng::fromSeed(10);
    NoiseSampler ns(rng, 0.0);
    for (int trial = 0; trial < 100; trial++) {
        std::vector<uint32_t> p(f.det.N1), q(f.det.N1);
        for (auto& b : p)
            b = rng() & 1;
        for (auto& b : q)
            b = rng() & 1;
        Trlwe c1 = trlweEncrypt(p, f.skDet, ns);
        Trlwe c0 = trlweEncrypt(q, f.skDet, ns);
        Trgsw sel1 = trgswEncrypt(true, f.skDet, ns);
        Trgsw sel0 = trgswEncrypt(false, f.skDet, ns);
        CHECK(trlweDecrypt(cmux(sel1, c1, c0, f.det), f.skDet) == p);
        CHECK(trlweDecrypt(cmux(sel0, c1, c0, f.det), f.skDet) == q);
    }
}

TEST_CASE("cmux with plaintext-known selector equals the plaintext mux")
{
    auto& f = fx();
    Csprng rng = Csprng::fromSeed(11);
    NoiseSampler ns(rng, 0.0);
    for (int s = 0; s <= 1; s++) {
        std::vector<uint32_t> p(f.det.N1), q(f.det.N1);
        for (auto& b : p)
            b = rng() & 1;
        for (auto& b : q)
            b = rng() & 1;
        Trgsw sel = trgswEncrypt(s == 1, f.skDet, ns);
        auto out = trlweDecrypt(
            cmux(sel, trlweEncrypt(p, f.skDet, ns),
                 trlweEncrypt(q, f.skDet, ns), f.det),
            f.skDet);
        for (uint32_t i = 0; i < f.det.N1; i++)
            CHECK(out[i] == (s ? p[i] : q[i]));
    }
}

TEST_CASE("cmux chain of 255 at production parameters still decrypts")
{
    auto& f = fx();
    Csprng rng = Csprng::fromSeed(12);
    NoiseSampler ns(rng, f.prod.alpha1);
    std::vector<uint32_t> p(f.prod.N1), q(f.prod.N1);
    for (auto& b : p)
        b = rng() & 1;
    for (auto& b : q)
        b = rng() & 1;
    Trlwe acc = trlweEncrypt(p, f.skProd, ns);
    Trlwe other = trlweEncrypt(q, f.skProd, ns);
    PreparedTrgsw<uint32_t> sel = prepareTrgsw<uint32_t>(
        trgswEncrypt(true, f.skProd, ns), f.prod.mul, f.prod.Bg1Bits);
    for (int i = 0; i < 255; i++)
        acc = cmux(sel, acc, other);
    CHECK(trlweDecrypt(acc, f.skProd) == p);
}

TEST_CASE("sample extract recovers every coefficient and adds no noise")
{
    auto& f = fx();
    Csprng rng = Csprng::fromSeed(13);
    NoiseSampler ns(rng, 0.0);
    std::vector<uint32_t> m(f.det.N1);
    for (auto& b : m)
        b = rng() & 1;
    Trlwe ct = trlweEncrypt(m, f.skDet, ns);
    for (uint32_t k = 0; k < f.det.N1; k++) {
        Tlwe e = sampleExtract(ct, k);
        CHECK(tlweDecrypt(e, f.skDet) == (m[k] == 1));
        // Exactly zero added noise: phases agree bit for bit.
        CHECK(tlwePhase(e, f.skDet) == trlwePhaseAt(ct, k, f.skDet));
    }
    CHECK_THROWS(sampleExtract(ct, f.det.N1));
}

TEST_CASE("identity key switch")
{
    auto& f = fx();
    Csprng rng = Csprng::fromSeed(14);

    SUBCASE("round trip at production, 100 trials")
    {
        NoiseSampler ns(rng, f.prod.alpha1);
        for (int i = 0; i < 100; i++) {
            const bool m = (rng() & 1) != 0;
            std::vector<uint32_t> mv(f.prod.N1, 0);
            mv[0] = m;
            Tlwe lvl1 = sampleExtract(trlweEncrypt(mv, f.skProd, ns), 0);
            Tlwe lvl0 = identityKeySwitch(lvl1, f.bkProd);
            CHECK(lvl0.level == 0);
            CHECK(tlweDecrypt(lvl0, f.skProd) == m);
        }
    }

    SUBCASE("output noise variance exceeds input noise variance")
    {
        NoiseSampler ns(rng, f.prod.alpha1);
        std::vector<double> inErr, outErr;
        for (int i = 0; i < 1000; i++) {
            std::vector<uint32_t> mv(f.prod.N1, 0);
            mv[0] = 1;
            Tlwe lvl1 = sampleExtract(trlweEncrypt(mv, f.skProd, ns), 0);
            inErr.push_back(phaseError(lvl1, f.skProd, true));
            outErr.push_back(
                phaseError(identityKeySwitch(lvl1, f.bkProd), f.skProd, true));
        }
        const double vIn = stddevOfErrors(inErr);
        const double vOut = stddevOfErrors(outErr);
        CHECK(vOut > vIn);
    }

    SUBCASE("deterministic parameters preserve the plaintext exactly")
    {
        NoiseSampler ns(rng, 0.0);
        std::vector<uint32_t> mv(f.det.N1, 0);
        mv[0] = 1;
        Tlwe lvl1 = sampleExtract(trlweEncrypt(mv, f.skDet, ns), 0);
        Tlwe lvl0 = identityKeySwitch(lvl1, f.bkDet);
        CHECK(tlwePhase(lvl0, f.skDet) == kMu32);
    }
}

TEST_CASE("gate bootstrap restores noise and preserves the plaintext")
{
    auto& f = fx();
    Csprng rng = Csprng::fromSeed(15);
    NoiseSampler ns(rng, f.prod.alpha0);

    SUBCASE("fresh ciphertexts")
    {
        for (int m = 0; m <= 1; m++) {
            Tlwe ct = tlweEncrypt(m != 0, f.skProd, ns);
            CHECK(tlweDecrypt(gateBootstrap(ct, f.bkProd), f.skProd) ==
                  (m != 0));
        }
    }

    SUBCASE("noise inflated to 0.9 mu still decodes, 100 trials")
    {
        for (int i = 0; i < 100; i++) {
            const bool m = (rng() & 1) != 0;
            Tlwe ct = tlweEncrypt(m, f.skProd, ns);
            const uint32_t inflate =
                static_cast<uint32_t>(0.9 * kMu32) * ((i & 1) ? 1u : -1u);
            ct.b += inflate;
            CHECK(tlweDecrypt(gateBootstrap(ct, f.bkProd), f.skProd) == m);
        }
    }

    SUBCASE("1000 consecutive bootstraps never flip the bit")
    {
        Tlwe ct = tlweEncrypt(true, f.skProd, ns);
        for (int i = 0; i < 1000; i++)
            ct = gateBootstrap(ct, f.bkProd);
        CHECK(tlweDecrypt(ct, f.skProd) == true);
    }
}

TEST_CASE("bootstrapped outputs stay at the refresh noise level")
{
    // Reference level: the empirical std of a single bootstrap of a fresh
    // input. Every bootstrapped operation must stay within 2x of it.
    auto& f = fx();
    const int kSamples = 1000;
    std::vector<double> refErr(kSamples), andErr(kSamples), muxErr(kSamples);
    parallelFor(hardwareThreads(), kSamples, [&](size_t i) {
        Csprng rng = Csprng::fromSeed(16000 + i);
        NoiseSampler ns(rng, f.prod.alpha0);
        Tlwe one = tlweEncrypt(true, f.skProd, ns);
        Tlwe zero = tlweEncrypt(false, f.skProd, ns);
        refErr[i] = phaseError(gateBootstrap(one, f.bkProd), f.skProd, true);
        std::vector<Tlwe> andIn{one, one};
        andErr[i] =
            phaseError(homGate(GateKind::And, andIn, f.bkProd), f.skProd, true);
        std::vector<Tlwe> muxIn{zero, zero, one};
        muxErr[i] =
            phaseError(homGate(GateKind::Mux, muxIn, f.bkProd), f.skProd, true);
    });
    const double ref = stddevOfErrors(refErr);
    CHECK(stddevOfErrors(andErr) <= 2.0 * ref);
    CHECK(stddevOfErrors(muxErr) <= 2.0 * ref);
    CHECK(ref < 0.01);  // sanity: bootstrapped noise is far from mu = 1/8
}

TEST_CASE("homomorphic gates match plaintext truth tables")
{
    auto& f = fx();
    Csprng rng = Csprng::fromSeed(17);
    NoiseSampler ns(rng, 0.0);

    SUBCASE("NAND over all four pairs")
    {
        const bool expected[4] = {true, true, true, false};
        int idx = 0;
        for (int a = 0; a <= 1; a++)
            for (int b = 0; b <= 1; b++) {
                std::vector<Tlwe> in{tlweEncrypt(a != 0, f.skDet, ns),
                                     tlweEncrypt(b != 0, f.skDet, ns)};
                CHECK(tlweDecrypt(homGate(GateKind::Nand, in, f.bkDet),
                                  f.skDet) == expected[idx]);
                idx++;
            }
    }

    SUBCASE("all two-input kinds, exhaustive")
    {
        for (GateKind kind :
             {GateKind::And, GateKind::AndNot, GateKind::Nand, GateKind::Nor,
              GateKind::Or, GateKind::OrNot, GateKind::Xnor, GateKind::Xor}) {
            for (int a = 0; a <= 1; a++)
                for (int b = 0; b <= 1; b++) {
                    std::vector<Tlwe> in{tlweEncrypt(a != 0, f.skDet, ns),
                                         tlweEncrypt(b != 0, f.skDet, ns)};
                    CHECK(tlweDecrypt(homGate(kind, in, f.bkDet), f.skDet) ==
                          truth(kind, a != 0, b != 0));
                }
        }
    }

    SUBCASE("MUX over all eight triples")
    {
        for (int s = 0; s <= 1; s++)
            for (int a = 0; a <= 1; a++)
                for (int b = 0; b <= 1; b++) {
                    std::vector<Tlwe> in{tlweEncrypt(s != 0, f.skDet, ns),
                                         tlweEncrypt(a != 0, f.skDet, ns),
                                         tlweEncrypt(b != 0, f.skDet, ns)};
                    CHECK(tlweDecrypt(homGate(GateKind::Mux, in, f.bkDet),
                                      f.skDet) == (s ? a != 0 : b != 0));
                }
    }

    SUBCASE("NOT adds no randomness; double negation is byte-identical")
    {
        Tlwe ct = tlweEncrypt(true, f.skDet, ns);
        std::vector<Tlwe> in1{ct};
        Tlwe once = homGate(GateKind::Not, in1, f.bkDet);
        CHECK(tlweDecrypt(once, f.skDet) == false);
        std::vector<Tlwe> in2{once};
        Tlwe twice = homGate(GateKind::Not, in2, f.bkDet);
        CHECK(twice.b == ct.b);
        CHECK(std::memcmp(twice.a.data(), ct.a.data(),
                          ct.a.size() * sizeof(uint32_t)) == 0);
    }

    SUBCASE("arity is checked")
    {
        std::vector<Tlwe> one{tlweEncrypt(true, f.skDet, ns)};
        CHECK_THROWS(homGate(GateKind::And, one, f.bkDet));
    }
}

TEST_CASE("half adder over TFHE: A=B=1 gives S=0, C=1")
{
    auto& f = fx();
    Csprng rng = Csprng::fromSeed(18);
    NoiseSampler ns(rng, 0.0);
    for (int a = 0; a <= 1; a++)
        for (int b = 0; b <= 1; b++) {
            Tlwe A = tlweEncrypt(a != 0, f.skDet, ns);
            Tlwe B = tlweEncrypt(b != 0, f.skDet, ns);
            std::vector<Tlwe> ab{A, B};
            Tlwe d = homGate(GateKind::Nand, ab, f.bkDet);
            std::vector<Tlwe> ad{A, d};
            Tlwe e = homGate(GateKind::Nand, ad, f.bkDet);
            std::vector<Tlwe> db{d, B};
            Tlwe g = homGate(GateKind::Nand, db, f.bkDet);
            std::vector<Tlwe> eg{e, g};
            Tlwe S = homGate(GateKind::Nand, eg, f.bkDet);
            std::vector<Tlwe> dd{d};
            Tlwe C = homGate(GateKind::Not, dd, f.bkDet);
            CHECK(tlweDecrypt(S, f.skDet) == ((a ^ b) != 0));
            CHECK(tlweDecrypt(C, f.skDet) == ((a & b) != 0));
        }
}

TEST_CASE("hom mux without SE and IKS yields a usable TRLWE")
{
    auto& f = fx();
    Csprng rng = Csprng::fromSeed(19);
    NoiseSampler ns(rng, 0.0);
    for (int s = 0; s <= 1; s++)
        for (int a = 0; a <= 1; a++)
            for (int b = 0; b <= 1; b++) {
                Trlwe out = homMuxNoSeIks(tlweEncrypt(s != 0, f.skDet, ns),
                                          tlweEncrypt(a != 0, f.skDet, ns),
                                          tlweEncrypt(b != 0, f.skDet, ns),
                                          f.bkDet);
                Tlwe lvl0 = identityKeySwitch(sampleExtract(out, 0), f.bkDet);
                CHECK(tlweDecrypt(lvl0, f.skDet) == (s ? a != 0 : b != 0));
            }
}

TEST_CASE("circuit bootstrap produces working cmux selectors")
{
    auto& f = fx();
    Csprng rng = Csprng::fromSeed(20);
    NoiseSampler ns(rng, 0.0);

    SUBCASE("selector 1 picks the first input, 50 trials")
    {
        for (int i = 0; i < 50; i++) {
            std::vector<uint32_t> p(f.det.N1), q(f.det.N1);
            for (auto& x : p)
                x = rng() & 1;
            for (auto& x : q)
                x = rng() & 1;
            Trgsw sel = circuitBootstrap(tlweEncrypt(true, f.skDet, ns),
                                         f.bkDet);
            auto got = trlweDecrypt(cmux(sel, trlweEncrypt(p, f.skDet, ns),
                                         trlweEncrypt(q, f.skDet, ns), f.det),
                                    f.skDet);
            CHECK(got == p);
        }
    }

    SUBCASE("selector 0 picks the second input, 50 trials")
    {
        for (int i = 0; i < 50; i++) {
            std::vector<uint32_t> p(f.det.N1), q(f.det.N1);
            for (auto& x : p)
                x = rng() & 1;
            for (auto& x : q)
                x = rng() & 1;
            Trgsw sel = circuitBootstrap(tlweEncrypt(false, f.skDet, ns),
                                         f.bkDet);
            auto got = trlweDecrypt(cmux(sel, trlweEncrypt(p, f.skDet, ns),
                                         trlweEncrypt(q, f.skDet, ns), f.det),
                                    f.skDet);
            CHECK(got == q);
        }
    }

    SUBCASE("trivial input behaves as selector 1")
    {
        std::vector<uint32_t> p(f.det.N1, 1), q(f.det.N1, 0);
        Trgsw sel = circuitBootstrap(tlweTrivial(true, f.det), f.bkDet);
        auto got = trlweDecrypt(cmux(sel, trlweEncrypt(p, f.skDet, ns),
                                     trlweEncrypt(q, f.skDet, ns), f.det),
                                f.skDet);
        CHECK(got == p);
    }

    SUBCASE("trgswNot flips a circuit-bootstrapped selector")
    {
        std::vector<uint32_t> p(f.det.N1, 1), q(f.det.N1, 0);
        Trgsw sel = circuitBootstrap(tlweEncrypt(true, f.skDet, ns), f.bkDet);
        Trgsw nsel = trgswNot(sel, f.det);
        auto got = trlweDecrypt(cmux(nsel, trlweEncrypt(p, f.skDet, ns),
                                     trlweEncrypt(q, f.skDet, ns), f.det),
                                f.skDet);
        CHECK(got == q);
    }
}

TEST_CASE("serialization round trips")
{
    auto& f = fx();
    Csprng rng = Csprng::fromSeed(21);
    NoiseSampler ns(rng, 0.0);

    SUBCASE("secret key")
    {
        auto bytes = serializeSecretKey(f.skDet);
        SecretKey back = deserializeSecretKey(bytes);
        CHECK(back.lv0 == f.skDet.lv0);
        CHECK(back.lv1 == f.skDet.lv1);
        CHECK(back.lv2 == f.skDet.lv2);
        CHECK(serializeSecretKey(back) == bytes);
    }

    SUBCASE("tlwe")
    {
        Tlwe ct = tlweEncrypt(true, f.skDet, ns);
        auto bytes = serializeTlwe(ct, f.det);
        Tlwe back = deserializeTlwe(bytes);
        CHECK(back.a == ct.a);
        CHECK(back.b == ct.b);
    }

    SUBCASE("bootstrapping key keeps working after a round trip")
    {
        auto bytes = serializeBootstrappingKey(f.bkDet);
        BootstrappingKey back = deserializeBootstrappingKey(bytes);
        std::vector<Tlwe> in{tlweEncrypt(true, f.skDet, ns),
                             tlweEncrypt(false, f.skDet, ns)};
        CHECK(tlweDecrypt(homGate(GateKind::Or, in, back), f.skDet) == true);
        CHECK(back.hasCircuitBootstrapping());
    }

    SUBCASE("wrong magic and truncation are rejected")
    {
        auto bytes = serializeSecretKey(f.skDet);
        bytes[0] = 'X';
        CHECK_THROWS(deserializeSecretKey(bytes));
        auto good = serializeSecretKey(f.skDet);
        good.resize(good.size() / 2);
        CHECK_THROWS(deserializeSecretKey(good));
    }
}
