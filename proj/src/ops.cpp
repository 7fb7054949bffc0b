#include "hvp/tfhe/ops.hpp"

#include <cassert>
#include <stdexcept>

#include "hvp/tfhe/counters.hpp"
#include "hvp/tfhe/fft.hpp"
#include "hvp/tfhe/poly.hpp"

namespace hvp::tfhe {

OpCounters& opCounters()
{
    static OpCounters counters;
    return counters;
}

namespace {

// Per-thread scratch to keep external products allocation-free.
struct Scratch {
    std::vector<int32_t> digits;
    std::vector<double> re, im;
    std::vector<double> accARe, accAIm, accBRe, accBIm;
    std::vector<uint32_t> tmp32;
    std::vector<uint64_t> tmp64;
};

Scratch& scratch()
{
    thread_local Scratch s;
    return s;
}

template <class T>
std::vector<T>& scratchTmp(Scratch& s);

template <>
std::vector<uint32_t>& scratchTmp<uint32_t>(Scratch& s)
{
    return s.tmp32;
}
template <>
std::vector<uint64_t>& scratchTmp<uint64_t>(Scratch& s)
{
    return s.tmp64;
}

uint32_t modSwitch(uint32_t m, uint32_t phase)
{
    const uint64_t interval = ((1ull << 63) / m) * 2;
    const uint64_t half = interval / 2;
    return static_cast<uint32_t>(((static_cast<uint64_t>(phase) << 32) + half) /
                                 interval);
}

template <class T>
void trlweAddInPlace(TrlweSample<T>& acc, const TrlweSample<T>& x)
{
    const size_t N = acc.N();
    for (size_t i = 0; i < N; i++) {
        acc.a[i] += x.a[i];
        acc.b[i] += x.b[i];
    }
}

template <class T>
TrlweSample<T> trlweSub(const TrlweSample<T>& x, const TrlweSample<T>& y)
{
    TrlweSample<T> r = x;
    const size_t N = r.N();
    for (size_t i = 0; i < N; i++) {
        r.a[i] -= y.a[i];
        r.b[i] -= y.b[i];
    }
    return r;
}

// Dimension/level bookkeeping for the two ring levels.
template <class T>
struct LevelTraits;

template <>
struct LevelTraits<uint32_t> {
    static constexpr uint8_t level = 1;
    static uint32_t N(const ParameterSet& p)
    {
        return p.N1;
    }
    static uint32_t l(const ParameterSet& p)
    {
        return p.l1;
    }
    static uint32_t bgBits(const ParameterSet& p)
    {
        return p.Bg1Bits;
    }
    static double alpha(const ParameterSet& p)
    {
        return p.alpha1;
    }
    static const std::vector<uint32_t>& key(const SecretKey& sk)
    {
        return sk.lv1;
    }
};

template <>
struct LevelTraits<uint64_t> {
    static constexpr uint8_t level = 2;
    static uint32_t N(const ParameterSet& p)
    {
        return p.N2;
    }
    static uint32_t l(const ParameterSet& p)
    {
        return p.l2;
    }
    static uint32_t bgBits(const ParameterSet& p)
    {
        return p.Bg2Bits;
    }
    static double alpha(const ParameterSet& p)
    {
        return p.alpha2;
    }
    static const std::vector<uint32_t>& key(const SecretKey& sk)
    {
        return sk.lv2;
    }
};

template <class T>
T sampleNoise(NoiseSampler& ns);

template <>
uint32_t sampleNoise<uint32_t>(NoiseSampler& ns)
{
    return ns.noise32();
}
template <>
uint64_t sampleNoise<uint64_t>(NoiseSampler& ns)
{
    return ns.noise64();
}

template <class T>
T sampleUniform(NoiseSampler& ns);

template <>
uint32_t sampleUniform<uint32_t>(NoiseSampler& ns)
{
    return ns.uniform32();
}
template <>
uint64_t sampleUniform<uint64_t>(NoiseSampler& ns)
{
    return ns.uniform64();
}

// Fresh TRLWE encryption of zero at the ring level selected by T.
template <class T>
TrlweSample<T> trlweEncryptZero(const SecretKey& sk, NoiseSampler& ns,
                                double alpha)
{
    const ParameterSet& p = *sk.params;
    const uint32_t N = LevelTraits<T>::N(p);
    const auto& key = LevelTraits<T>::key(sk);

    TrlweSample<T> c = TrlweSample<T>::zero(N, LevelTraits<T>::level);
    for (uint32_t i = 0; i < N; i++)
        c.a[i] = sampleUniform<T>(ns);
    polyMulBinary(c.b.data(), c.a.data(), key.data(), N);
    if (alpha != 0.0) {
        NoiseSampler noise(ns.rng(), alpha);
        for (uint32_t i = 0; i < N; i++)
            c.b[i] += sampleNoise<T>(noise);
    }
    return c;
}

template <class T>
TrgswSample<T> trgswEncryptAtLevel(bool m, const SecretKey& sk,
                                   NoiseSampler& ns)
{
    const ParameterSet& p = *sk.params;
    const uint32_t l = LevelTraits<T>::l(p);
    const uint32_t bgBits = LevelTraits<T>::bgBits(p);
    constexpr uint32_t W = sizeof(T) * 8;

    TrgswSample<T> c;
    c.level = LevelTraits<T>::level;
    c.rows.reserve(2 * l);
    for (uint32_t r = 0; r < 2 * l; r++)
        c.rows.push_back(
            trlweEncryptZero<T>(sk, ns, LevelTraits<T>::alpha(p)));
    if (m) {
        for (uint32_t i = 0; i < l; i++) {
            const T h = static_cast<T>(1) << (W - (i + 1) * bgBits);
            c.rows[i].a[0] += h;
            c.rows[l + i].b[0] += h;
        }
    }
    return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// Trivial ciphertexts

Tlwe tlweTrivial(bool m, const ParameterSet& params)
{
    Tlwe c = Tlwe::zero(params.n, 0);
    c.b = m ? kMu32 : static_cast<uint32_t>(0) - kMu32;
    return c;
}

Tlwe tlweTrivialLvl1(bool m, const ParameterSet& params)
{
    Tlwe c = Tlwe::zero(params.N1, 1);
    c.b = m ? kMu32 : static_cast<uint32_t>(0) - kMu32;
    return c;
}

Trlwe trlweTrivialMuAtZero(const ParameterSet& params)
{
    Trlwe c = Trlwe::zero(params.N1, 1);
    c.b[0] = kMu32;
    return c;
}

template <class T>
TrgswSample<T> trgswTrivial(bool m, uint32_t N, uint32_t l, uint32_t bgBits,
                            uint8_t level)
{
    constexpr uint32_t W = sizeof(T) * 8;
    TrgswSample<T> c;
    c.level = level;
    c.rows.assign(2 * l, TrlweSample<T>::zero(N, level));
    if (m) {
        for (uint32_t i = 0; i < l; i++) {
            const T h = static_cast<T>(1) << (W - (i + 1) * bgBits);
            c.rows[i].a[0] += h;
            c.rows[l + i].b[0] += h;
        }
    }
    return c;
}

template TrgswSample<uint32_t> trgswTrivial<uint32_t>(bool, uint32_t, uint32_t,
                                                      uint32_t, uint8_t);
template TrgswSample<uint64_t> trgswTrivial<uint64_t>(bool, uint32_t, uint32_t,
                                                      uint32_t, uint8_t);

Trgsw trgswTrivialLvl1(bool m, const ParameterSet& params)
{
    return trgswTrivial<uint32_t>(m, params.N1, params.l1, params.Bg1Bits, 1);
}

// ---------------------------------------------------------------------------
// Key generation

SecretKey genSecretKey(const ParameterSet& params, Csprng& rng)
{
    params.validate();
    SecretKey sk;
    sk.params = &params;
    sk.lv0.resize(params.n);
    sk.lv1.resize(params.N1);
    sk.lv2.resize(params.N2);
    for (auto& b : sk.lv0)
        b = rng() & 1;
    for (auto& b : sk.lv1)
        b = rng() & 1;
    for (auto& b : sk.lv2)
        b = rng() & 1;
    return sk;
}

namespace {

KeySwitchKey genKeySwitchKey(const SecretKey& sk, Csprng& rng)
{
    const ParameterSet& p = *sk.params;
    KeySwitchKey ksk;
    ksk.N1 = p.N1;
    ksk.t = p.ksLen;
    ksk.baseBits = p.ksBaseBits;
    ksk.n = p.n;
    const size_t perBase = (size_t{1} << ksk.baseBits) - 1;
    ksk.data.resize(size_t{ksk.N1} * ksk.t * perBase * (ksk.n + 1));

    NoiseSampler ns(rng, p.alpha0);
    size_t pos = 0;
    for (uint32_t i = 0; i < ksk.N1; i++) {
        for (uint32_t j = 0; j < ksk.t; j++) {
            for (uint32_t u = 0; u < perBase; u++) {
                const uint32_t msg = sk.lv1[i] * (u + 1)
                                     << (32 - (j + 1) * ksk.baseBits);
                uint32_t b = msg + ns.noise32();
                for (uint32_t k = 0; k < ksk.n; k++) {
                    const uint32_t a = ns.uniform32();
                    ksk.data[pos + k] = a;
                    b += a * sk.lv0[k];
                }
                ksk.data[pos + ksk.n] = b;
                pos += ksk.n + 1;
            }
        }
    }
    return ksk;
}

// func is a polynomial over Z (int64 per coefficient); the table encrypts
// func * key2[i] * (u+1) / base^(j+1) under the level-1 key.
PrivKeySwitchKey genPrivKeySwitchKey(const SecretKey& sk, Csprng& rng,
                                     const std::vector<int64_t>& func)
{
    const ParameterSet& p = *sk.params;
    PrivKeySwitchKey pks;
    pks.N2 = p.N2;
    pks.t = p.pksLen;
    pks.baseBits = p.pksBaseBits;
    pks.N1 = p.N1;
    const size_t perBase = (size_t{1} << pks.baseBits) - 1;
    pks.data.resize((size_t{pks.N2} + 1) * pks.t * perBase * 2 * pks.N1);

    NoiseSampler ns(rng, p.alphaPks);
    size_t pos = 0;
    for (uint32_t i = 0; i <= pks.N2; i++) {
        // Key factor; the final position stands for the b coefficient.
        const uint32_t factor =
            i < pks.N2 ? sk.lv2[i] : static_cast<uint32_t>(-1);
        for (uint32_t j = 0; j < pks.t; j++) {
            for (uint32_t u = 0; u < perBase; u++) {
                Trlwe c = trlweEncryptZero<uint32_t>(sk, ns, p.alphaPks);
                const uint32_t scale =
                    (u + 1) * factor << (32 - (j + 1) * pks.baseBits);
                for (uint32_t k = 0; k < pks.N1; k++)
                    c.b[k] += static_cast<uint32_t>(func[k]) * scale;
                for (uint32_t k = 0; k < pks.N1; k++)
                    pks.data[pos + k] = c.a[k];
                for (uint32_t k = 0; k < pks.N1; k++)
                    pks.data[pos + pks.N1 + k] = c.b[k];
                pos += 2 * size_t{pks.N1};
            }
        }
    }
    return pks;
}

}  // namespace

BootstrappingKey BootstrappingKey::generate(const SecretKey& sk, Csprng& rng,
                                            bool withCircuitBootstrapping)
{
    const ParameterSet& p = *sk.params;
    BootstrappingKey bk;
    bk.params_ = &p;
    bk.hasCb_ = withCircuitBootstrapping;

    NoiseSampler ns(rng, 0.0);
    bk.bk1Raw_.reserve(p.n);
    for (uint32_t i = 0; i < p.n; i++)
        bk.bk1Raw_.push_back(trgswEncryptAtLevel<uint32_t>(sk.lv0[i], sk, ns));
    if (withCircuitBootstrapping) {
        bk.bk2Raw_.reserve(p.n);
        for (uint32_t i = 0; i < p.n; i++)
            bk.bk2Raw_.push_back(
                trgswEncryptAtLevel<uint64_t>(sk.lv0[i], sk, ns));
    }
    bk.ksk_ = genKeySwitchKey(sk, rng);
    if (withCircuitBootstrapping) {
        std::vector<int64_t> negS(p.N1);
        for (uint32_t i = 0; i < p.N1; i++)
            negS[i] = -static_cast<int64_t>(sk.lv1[i]);
        std::vector<int64_t> id(p.N1, 0);
        id[0] = 1;
        bk.pksNegS_ = genPrivKeySwitchKey(sk, rng, negS);
        bk.pksId_ = genPrivKeySwitchKey(sk, rng, id);
    }
    bk.prepareAll();
    return bk;
}

BootstrappingKey BootstrappingKey::fromParts(
    const ParameterSet& params, std::vector<Trgsw> bk1Raw,
    std::vector<TrgswLvl2> bk2Raw, KeySwitchKey ksk, PrivKeySwitchKey pksNegS,
    PrivKeySwitchKey pksId, bool hasCb)
{
    BootstrappingKey bk;
    bk.params_ = &params;
    bk.hasCb_ = hasCb;
    bk.bk1Raw_ = std::move(bk1Raw);
    bk.bk2Raw_ = std::move(bk2Raw);
    bk.ksk_ = std::move(ksk);
    bk.pksNegS_ = std::move(pksNegS);
    bk.pksId_ = std::move(pksId);
    bk.prepareAll();
    return bk;
}

void BootstrappingKey::prepareAll()
{
    const ParameterSet& p = *params_;
    bk1_.clear();
    bk1_.reserve(bk1Raw_.size());
    for (const auto& g : bk1Raw_)
        bk1_.push_back(prepareTrgsw<uint32_t>(g, p.mul, p.Bg1Bits));
    bk2_.clear();
    bk2_.reserve(bk2Raw_.size());
    for (const auto& g : bk2Raw_)
        bk2_.push_back(prepareTrgsw<uint64_t>(g, p.mul, p.Bg2Bits));
}

const std::vector<PreparedTrgsw<uint64_t>>& BootstrappingKey::bk2() const
{
    if (!hasCb_)
        throw std::runtime_error(
            "bootstrapping key lacks circuit bootstrapping material");
    return bk2_;
}

// ---------------------------------------------------------------------------
// Encryption / decryption

Tlwe tlweEncrypt(bool m, const SecretKey& sk, NoiseSampler& ns)
{
    const ParameterSet& p = *sk.params;
    Tlwe c;
    c.level = 0;
    c.a.resize(p.n);
    c.b = (m ? kMu32 : static_cast<uint32_t>(0) - kMu32) + ns.noise32();
    for (uint32_t i = 0; i < p.n; i++) {
        c.a[i] = ns.uniform32();
        c.b += c.a[i] * sk.lv0[i];
    }
    return c;
}

uint32_t tlwePhase(const Tlwe& ct, const SecretKey& sk)
{
    const std::vector<uint32_t>& key = ct.level == 0 ? sk.lv0 : sk.lv1;
    assert(ct.a.size() == key.size());
    uint32_t phase = ct.b;
    for (size_t i = 0; i < ct.a.size(); i++)
        phase -= ct.a[i] * key[i];
    return phase;
}

bool tlweDecrypt(const Tlwe& ct, const SecretKey& sk)
{
    // sgn(0) decodes as +1.
    return static_cast<int32_t>(tlwePhase(ct, sk)) >= 0;
}

Trlwe trlweEncrypt(const std::vector<uint32_t>& mBits, const SecretKey& sk,
                   NoiseSampler& ns)
{
    const ParameterSet& p = *sk.params;
    if (mBits.size() != p.N1)
        throw std::invalid_argument("trlweEncrypt: message length != N1");
    Trlwe c = trlweEncryptZero<uint32_t>(sk, ns, ns.sigma());
    for (uint32_t i = 0; i < p.N1; i++)
        c.b[i] += mBits[i] ? kMu32 : static_cast<uint32_t>(0) - kMu32;
    return c;
}

namespace {

std::vector<uint32_t> trlwePhasePoly(const Trlwe& ct, const SecretKey& sk)
{
    const size_t N = ct.N();
    std::vector<uint32_t> mul(N);
    polyMulBinary(mul.data(), ct.a.data(), sk.lv1.data(), N);
    std::vector<uint32_t> phase(N);
    for (size_t i = 0; i < N; i++)
        phase[i] = ct.b[i] - mul[i];
    return phase;
}

}  // namespace

std::vector<uint32_t> trlweDecrypt(const Trlwe& ct, const SecretKey& sk)
{
    std::vector<uint32_t> phase = trlwePhasePoly(ct, sk);
    std::vector<uint32_t> bits(phase.size());
    for (size_t i = 0; i < phase.size(); i++)
        bits[i] = static_cast<int32_t>(phase[i]) >= 0 ? 1 : 0;
    return bits;
}

uint32_t trlwePhaseAt(const Trlwe& ct, size_t k, const SecretKey& sk)
{
    const size_t N = ct.N();
    assert(k < N);
    // (a * s)[k] = sum_{i+j=k} a_i s_j - sum_{i+j=k+N} a_i s_j
    uint32_t acc = 0;
    for (size_t j = 0; j <= k; j++)
        acc += ct.a[k - j] * sk.lv1[j];
    for (size_t j = k + 1; j < N; j++)
        acc -= ct.a[k + N - j] * sk.lv1[j];
    return ct.b[k] - acc;
}

bool trlweDecryptAt(const Trlwe& ct, size_t k, const SecretKey& sk)
{
    return static_cast<int32_t>(trlwePhaseAt(ct, k, sk)) >= 0;
}

Trgsw trgswEncrypt(bool m, const SecretKey& sk, NoiseSampler& ns)
{
    return trgswEncryptAtLevel<uint32_t>(m, sk, ns);
}

// ---------------------------------------------------------------------------
// External product, CMUX

template <class T>
PreparedTrgsw<T> prepareTrgsw(const TrgswSample<T>& c, MulBackend backend,
                              uint32_t bgBits)
{
    PreparedTrgsw<T> g;
    g.backend = backend;
    g.level = c.level;
    g.N = static_cast<uint32_t>(c.rows.at(0).N());
    g.l = static_cast<uint32_t>(c.rows.size() / 2);
    g.bgBits = bgBits;
    if (backend == MulBackend::Exact) {
        g.raw = c;
    }
    else {
        const FftPlan& plan = fftPlan(g.N);
        const size_t M = plan.M();
        g.fd.resize(size_t{2} * g.l * 2 * 2 * M);
        double* out = g.fd.data();
        for (const auto& row : c.rows) {
            plan.forward(out, out + M, row.a.data());
            out += 2 * M;
            plan.forward(out, out + M, row.b.data());
            out += 2 * M;
        }
    }
    return g;
}

template PreparedTrgsw<uint32_t> prepareTrgsw<uint32_t>(const Trgsw&,
                                                        MulBackend, uint32_t);
template PreparedTrgsw<uint64_t> prepareTrgsw<uint64_t>(const TrgswLvl2&,
                                                        MulBackend, uint32_t);

template <class T>
TrlweSample<T> externalProduct(const TrlweSample<T>& c,
                               const PreparedTrgsw<T>& g)
{
    const uint32_t N = g.N;
    const uint32_t l = g.l;
    assert(c.N() == N);
    Scratch& s = scratch();
    s.digits.resize(size_t{2} * l * N);
    decomposePoly(s.digits.data(), c.a.data(), N, l, g.bgBits);
    decomposePoly(s.digits.data() + size_t{l} * N, c.b.data(), N, l, g.bgBits);

    TrlweSample<T> out = TrlweSample<T>::zero(N, c.level);
    if (g.backend == MulBackend::Exact) {
        for (uint32_t r = 0; r < 2 * l; r++) {
            const int32_t* d = s.digits.data() + size_t{r} * N;
            polyMulAccExact(out.a.data(), d, g.raw.rows[r].a.data(), N);
            polyMulAccExact(out.b.data(), d, g.raw.rows[r].b.data(), N);
        }
    }
    else {
        const FftPlan& plan = fftPlan(N);
        const size_t M = plan.M();
        s.re.resize(M);
        s.im.resize(M);
        s.accARe.assign(M, 0.0);
        s.accAIm.assign(M, 0.0);
        s.accBRe.assign(M, 0.0);
        s.accBIm.assign(M, 0.0);
        for (uint32_t r = 0; r < 2 * l; r++) {
            plan.forward(s.re.data(), s.im.data(),
                         s.digits.data() + size_t{r} * N);
            const double* ga = g.fdRow(r, 0);
            const double* gb = g.fdRow(r, 1);
            for (size_t k = 0; k < M; k++) {
                const double xr = s.re[k], xi = s.im[k];
                s.accARe[k] += xr * ga[k] - xi * ga[M + k];
                s.accAIm[k] += xr * ga[M + k] + xi * ga[k];
                s.accBRe[k] += xr * gb[k] - xi * gb[M + k];
                s.accBIm[k] += xr * gb[M + k] + xi * gb[k];
            }
        }
        plan.inverseToTorus(out.a.data(), s.accARe.data(), s.accAIm.data());
        plan.inverseToTorus(out.b.data(), s.accBRe.data(), s.accBIm.data());
    }
    return out;
}

template Trlwe externalProduct<uint32_t>(const Trlwe&,
                                         const PreparedTrgsw<uint32_t>&);
template TrlweLvl2 externalProduct<uint64_t>(const TrlweLvl2&,
                                             const PreparedTrgsw<uint64_t>&);

template <class T>
TrlweSample<T> cmux(const PreparedTrgsw<T>& sel, const TrlweSample<T>& c1,
                    const TrlweSample<T>& c0)
{
    opCounters().cmux.fetch_add(1, std::memory_order_relaxed);
    TrlweSample<T> out = externalProduct(trlweSub(c1, c0), sel);
    trlweAddInPlace(out, c0);
    return out;
}

template Trlwe cmux<uint32_t>(const PreparedTrgsw<uint32_t>&, const Trlwe&,
                              const Trlwe&);
template TrlweLvl2 cmux<uint64_t>(const PreparedTrgsw<uint64_t>&,
                                  const TrlweLvl2&, const TrlweLvl2&);

Trlwe cmux(const Trgsw& sel, const Trlwe& c1, const Trlwe& c0,
           const ParameterSet& params)
{
    return cmux(prepareTrgsw<uint32_t>(sel, params.mul, params.Bg1Bits), c1,
                c0);
}

template <class T>
TlweSample<T> sampleExtract(const TrlweSample<T>& ct, size_t k)
{
    const size_t N = ct.N();
    if (k >= N)
        throw std::out_of_range("sampleExtract: index out of range");
    TlweSample<T> out;
    out.level = ct.level;
    out.a.resize(N);
    for (size_t i = 0; i <= k; i++)
        out.a[i] = ct.a[k - i];
    for (size_t i = k + 1; i < N; i++)
        out.a[i] = static_cast<T>(0) - ct.a[N + k - i];
    out.b = ct.b[k];
    return out;
}

template Tlwe sampleExtract<uint32_t>(const Trlwe&, size_t);
template TlweLvl2 sampleExtract<uint64_t>(const TrlweLvl2&, size_t);

// ---------------------------------------------------------------------------
// Key switching

Tlwe identityKeySwitch(const Tlwe& ct, const BootstrappingKey& bk)
{
    opCounters().identityKeySwitch.fetch_add(1, std::memory_order_relaxed);
    const KeySwitchKey& ksk = bk.ksk();
    assert(ct.level == 1 && ct.a.size() == ksk.N1);
    const uint32_t baseBits = ksk.baseBits;
    const uint32_t t = ksk.t;
    const uint32_t mask = (1u << baseBits) - 1;
    // Rounding offset of half the smallest digit; zero when the digits
    // already cover the whole word.
    const uint32_t offset =
        baseBits * t >= 32 ? 0 : 1u << (32 - (1 + baseBits * t));

    Tlwe out = Tlwe::zero(ksk.n, 0);
    out.b = ct.b;
    for (uint32_t i = 0; i < ksk.N1; i++) {
        const uint32_t v = ct.a[i] + offset;
        for (uint32_t j = 0; j < t; j++) {
            const uint32_t d = (v >> (32 - (j + 1) * baseBits)) & mask;
            if (d == 0)
                continue;
            const uint32_t* row = ksk.entry(i, j, d - 1);
            for (uint32_t k = 0; k < ksk.n; k++)
                out.a[k] -= row[k];
            out.b -= row[ksk.n];
        }
    }
    return out;
}

Trlwe privateKeySwitch(const TlweLvl2& ct, const PrivKeySwitchKey& pks)
{
    opCounters().privateKeySwitch.fetch_add(1, std::memory_order_relaxed);
    assert(ct.a.size() == pks.N2);
    const uint32_t baseBits = pks.baseBits;
    const uint32_t t = pks.t;
    const uint64_t mask = (uint64_t{1} << baseBits) - 1;
    const uint64_t offset = baseBits * t >= 64
                                ? 0
                                : uint64_t{1} << (64 - (1 + baseBits * t));

    Trlwe out = Trlwe::zero(pks.N1, 1);
    for (uint32_t i = 0; i <= pks.N2; i++) {
        const uint64_t v = (i < pks.N2 ? ct.a[i] : ct.b) + offset;
        for (uint32_t j = 0; j < t; j++) {
            const uint64_t d = (v >> (64 - (j + 1) * baseBits)) & mask;
            if (d == 0)
                continue;
            const uint32_t* row =
                pks.entry(i, j, static_cast<uint32_t>(d - 1));
            for (uint32_t k = 0; k < pks.N1; k++)
                out.a[k] -= row[k];
            for (uint32_t k = 0; k < pks.N1; k++)
                out.b[k] -= row[pks.N1 + k];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Blind rotation and bootstrapping

template <class T>
TrlweSample<T> blindRotate(const Tlwe& ct,
                           std::span<const PreparedTrgsw<T>> bk,
                           const TrlweSample<T>& testvec)
{
    opCounters().blindRotate.fetch_add(1, std::memory_order_relaxed);
    assert(ct.level == 0 && ct.a.size() == bk.size());
    const uint32_t N = static_cast<uint32_t>(testvec.N());
    const uint32_t twoN = 2 * N;

    Scratch& s = scratch();
    std::vector<T>& tmp = scratchTmp<T>(s);
    tmp.resize(N);

    TrlweSample<T> acc = TrlweSample<T>::zero(N, testvec.level);
    const uint32_t rot = (twoN - modSwitch(twoN, ct.b)) % twoN;
    polyRotate(acc.a.data(), testvec.a.data(), N, rot);
    polyRotate(acc.b.data(), testvec.b.data(), N, rot);

    TrlweSample<T> diff = TrlweSample<T>::zero(N, testvec.level);
    for (size_t i = 0; i < ct.a.size(); i++) {
        const uint32_t bara = modSwitch(twoN, ct.a[i]);
        if (bara == 0)
            continue;
        polyMulByXkMinusOne(diff.a.data(), acc.a.data(), N, bara);
        polyMulByXkMinusOne(diff.b.data(), acc.b.data(), N, bara);
        trlweAddInPlace(acc, externalProduct(diff, bk[i]));
    }
    return acc;
}

template Trlwe blindRotate<uint32_t>(const Tlwe&,
                                     std::span<const PreparedTrgsw<uint32_t>>,
                                     const Trlwe&);
template TrlweLvl2 blindRotate<uint64_t>(
    const Tlwe&, std::span<const PreparedTrgsw<uint64_t>>, const TrlweLvl2&);

Trlwe bootstrapToTrlwe(const Tlwe& ct, const BootstrappingKey& bk)
{
    const ParameterSet& p = bk.params();
    Trlwe testvec = Trlwe::zero(p.N1, 1);
    for (uint32_t i = 0; i < p.N1; i++)
        testvec.b[i] = kMu32;
    return blindRotate<uint32_t>(ct, bk.bk1(), testvec);
}

Tlwe gateBootstrap(const Tlwe& ct, const BootstrappingKey& bk)
{
    return identityKeySwitch(sampleExtract(bootstrapToTrlwe(ct, bk), 0), bk);
}

// ---------------------------------------------------------------------------
// Homomorphic gates

namespace {

struct Term {
    int coeff;
    const Tlwe* ct;
};

Tlwe linComb(std::initializer_list<Term> terms, uint32_t bias, uint32_t n)
{
    Tlwe out = Tlwe::zero(n, 0);
    out.b = bias;
    for (const Term& t : terms) {
        assert(t.ct->level == 0 && t.ct->a.size() == n);
        switch (t.coeff) {
        case 1:
            for (uint32_t i = 0; i < n; i++)
                out.a[i] += t.ct->a[i];
            out.b += t.ct->b;
            break;
        case -1:
            for (uint32_t i = 0; i < n; i++)
                out.a[i] -= t.ct->a[i];
            out.b -= t.ct->b;
            break;
        case 2:
            for (uint32_t i = 0; i < n; i++)
                out.a[i] += 2 * t.ct->a[i];
            out.b += 2 * t.ct->b;
            break;
        case -2:
            for (uint32_t i = 0; i < n; i++)
                out.a[i] -= 2 * t.ct->a[i];
            out.b -= 2 * t.ct->b;
            break;
        default:
            assert(false);
        }
    }
    return out;
}

constexpr uint32_t negMu = static_cast<uint32_t>(0) - kMu32;

}  // namespace

const char* gateKindName(GateKind kind)
{
    switch (kind) {
    case GateKind::And:
        return "AND";
    case GateKind::AndNot:
        return "ANDNOT";
    case GateKind::Mux:
        return "MUX";
    case GateKind::Nand:
        return "NAND";
    case GateKind::Nor:
        return "NOR";
    case GateKind::Not:
        return "NOT";
    case GateKind::Or:
        return "OR";
    case GateKind::OrNot:
        return "ORNOT";
    case GateKind::Xnor:
        return "XNOR";
    case GateKind::Xor:
        return "XOR";
    }
    return "?";
}

Tlwe homGate(GateKind kind, std::span<const Tlwe> in,
             const BootstrappingKey& bk)
{
    const ParameterSet& p = bk.params();
    const uint32_t n = p.n;
    if (in.size() != static_cast<size_t>(gateArity(kind)))
        throw std::invalid_argument(std::string("homGate: bad arity for ") +
                                    gateKindName(kind));

    switch (kind) {
    case GateKind::Not: {
        Tlwe out = in[0];
        for (auto& x : out.a)
            x = static_cast<uint32_t>(0) - x;
        out.b = static_cast<uint32_t>(0) - out.b;
        return out;
    }
    case GateKind::And:
        return gateBootstrap(linComb({{1, &in[0]}, {1, &in[1]}}, negMu, n),
                             bk);
    case GateKind::Nand:
        return gateBootstrap(linComb({{-1, &in[0]}, {-1, &in[1]}}, kMu32, n),
                             bk);
    case GateKind::Or:
        return gateBootstrap(linComb({{1, &in[0]}, {1, &in[1]}}, kMu32, n),
                             bk);
    case GateKind::Nor:
        return gateBootstrap(linComb({{-1, &in[0]}, {-1, &in[1]}}, negMu, n),
                             bk);
    case GateKind::Xor:
        return gateBootstrap(
            linComb({{2, &in[0]}, {2, &in[1]}}, 2 * kMu32, n), bk);
    case GateKind::Xnor:
        return gateBootstrap(
            linComb({{-2, &in[0]}, {-2, &in[1]}}, 2 * negMu, n), bk);
    case GateKind::AndNot:  // in0 AND NOT in1
        return gateBootstrap(linComb({{1, &in[0]}, {-1, &in[1]}}, negMu, n),
                             bk);
    case GateKind::OrNot:  // in0 OR NOT in1
        return gateBootstrap(linComb({{1, &in[0]}, {-1, &in[1]}}, kMu32, n),
                             bk);
    case GateKind::Mux: {
        // in = {sel, a, b}: sel ? a : b
        const Tlwe u = linComb({{1, &in[0]}, {1, &in[1]}}, negMu, n);
        const Tlwe v = linComb({{-1, &in[0]}, {1, &in[2]}}, negMu, n);
        const Tlwe t1 = sampleExtract(bootstrapToTrlwe(u, bk), 0);
        const Tlwe t2 = sampleExtract(bootstrapToTrlwe(v, bk), 0);
        Tlwe sum;
        sum.level = 1;
        sum.a.resize(p.N1);
        for (uint32_t i = 0; i < p.N1; i++)
            sum.a[i] = t1.a[i] + t2.a[i];
        sum.b = t1.b + t2.b + kMu32;
        return identityKeySwitch(sum, bk);
    }
    }
    throw std::invalid_argument("homGate: unknown kind");
}

Trlwe homMuxNoSeIks(const Tlwe& sel, const Tlwe& a, const Tlwe& b,
                    const BootstrappingKey& bk)
{
    const ParameterSet& p = bk.params();
    const Tlwe u = linComb({{1, &sel}, {1, &a}}, negMu, p.n);
    const Tlwe v = linComb({{-1, &sel}, {1, &b}}, negMu, p.n);
    Trlwe t1 = bootstrapToTrlwe(u, bk);
    const Trlwe t2 = bootstrapToTrlwe(v, bk);
    trlweAddInPlace(t1, t2);
    t1.b[0] += kMu32;
    return t1;
}

// ---------------------------------------------------------------------------
// Circuit bootstrapping

Trgsw circuitBootstrap(const Tlwe& ct, const BootstrappingKey& bk)
{
    opCounters().circuitBootstrap.fetch_add(1, std::memory_order_relaxed);
    const ParameterSet& p = bk.params();
    const uint32_t l = p.l1;

    Trgsw out;
    out.level = 1;
    out.rows.resize(2 * l);
    for (uint32_t i = 0; i < l; i++) {
        const uint64_t h = uint64_t{1} << (64 - (i + 1) * p.Bg1Bits);
        TrlweLvl2 testvec = TrlweLvl2::zero(p.N2, 2);
        for (uint32_t k = 0; k < p.N2; k++)
            testvec.b[k] = h / 2;
        TlweLvl2 t2 =
            sampleExtract(blindRotate<uint64_t>(ct, bk.bk2(), testvec), 0);
        t2.b += h / 2;
        out.rows[i] = privateKeySwitch(t2, bk.pksNegS());
        out.rows[l + i] = privateKeySwitch(t2, bk.pksId());
    }
    return out;
}

Trgsw trgswNot(const Trgsw& c, const ParameterSet& params)
{
    Trgsw out = trgswTrivialLvl1(true, params);
    for (size_t r = 0; r < out.rows.size(); r++) {
        for (uint32_t i = 0; i < params.N1; i++) {
            out.rows[r].a[i] -= c.rows[r].a[i];
            out.rows[r].b[i] -= c.rows[r].b[i];
        }
    }
    return out;
}

}  // namespace hvp::tfhe
