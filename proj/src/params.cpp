#include "hvp/tfhe/params.hpp"

#include <cmath>
#include <stdexcept>

namespace hvp::tfhe {

namespace {

bool isPow2(uint32_t x)
{
    return x != 0 && (x & (x - 1)) == 0;
}

}  // namespace

void ParameterSet::validate() const
{
    if (n == 0 || N1 == 0 || N2 == 0)
        throw std::invalid_argument("parameter set: zero dimension");
    if (!isPow2(N1) || !isPow2(N2))
        throw std::invalid_argument("parameter set: N1, N2 must be powers of two");
    if (l1 * Bg1Bits > 32 || l2 * Bg2Bits > 64)
        throw std::invalid_argument("parameter set: gadget exceeds torus word");
    if (ksBaseBits * ksLen > 32 || pksBaseBits * pksLen > 64)
        throw std::invalid_argument("parameter set: key switch digits exceed torus word");
    if (alpha0 < 0 || alpha1 < 0 || alpha2 < 0 || alphaPks < 0)
        throw std::invalid_argument("parameter set: negative noise");
}

const ParameterSet& ParameterSet::tfhe80()
{
    static const ParameterSet p = [] {
        ParameterSet q;
        q.name = "tfhe-80";
        q.n = 500;
        q.alpha0 = 2.44e-5;
        q.N1 = 1024;
        q.l1 = 2;
        q.Bg1Bits = 10;
        q.alpha1 = 3.73e-9;
        q.N2 = 2048;
        q.l2 = 4;
        q.Bg2Bits = 9;
        q.alpha2 = std::pow(2.0, -44);
        q.ksBaseBits = 2;
        q.ksLen = 8;
        q.pksBaseBits = 3;
        q.pksLen = 10;
        q.alphaPks = std::pow(2.0, -31);
        q.mul = MulBackend::Fft;
        q.validate();
        return q;
    }();
    return p;
}

const ParameterSet& ParameterSet::testDet()
{
    // Insecure, test-only set. All noise is zero and every digit
    // decomposition covers the full torus word, so evaluation is exact
    // integer arithmetic and fully deterministic.
    static const ParameterSet p = [] {
        ParameterSet q;
        q.name = "test-det";
        q.n = 16;
        q.alpha0 = 0.0;
        q.N1 = 64;
        q.l1 = 2;
        q.Bg1Bits = 16;
        q.alpha1 = 0.0;
        q.N2 = 128;
        q.l2 = 4;
        q.Bg2Bits = 16;
        q.alpha2 = 0.0;
        q.ksBaseBits = 4;
        q.ksLen = 8;
        q.pksBaseBits = 4;
        q.pksLen = 8;
        q.alphaPks = 0.0;
        q.mul = MulBackend::Exact;
        q.validate();
        return q;
    }();
    return p;
}

const ParameterSet& ParameterSet::byName(std::string_view name)
{
    if (name == "tfhe-80")
        return tfhe80();
    if (name == "test-det")
        return testDet();
    throw std::invalid_argument("unknown parameter set: " + std::string(name));
}

}  // namespace hvp::tfhe
