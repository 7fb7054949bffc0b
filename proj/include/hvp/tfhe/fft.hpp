#ifndef HVP_TFHE_FFT_HPP
#define HVP_TFHE_FFT_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace hvp::tfhe {

// Negacyclic polynomial transform over T[X]/(X^N+1) built on a complex FFT
// of size N/2 with an e^{i*pi*j/N} twist. Torus words are carried as
// signed-integer-valued doubles; products are reduced mod 2^width on the
// way back. The rounding error budget is below 2^-30 of the torus per
// multiplication, far under the smallest noise parameter in use.
class FftPlan {
public:
    explicit FftPlan(size_t N);

    size_t N() const
    {
        return N_;
    }
    size_t M() const
    {
        return M_;
    }

    // p (length N, signed interpretation) -> M complex points.
    template <class S>
    void forward(double* re, double* im, const S* p) const;

    // M complex points -> N torus words (mod 2^width).
    template <class T>
    void inverseToTorus(T* out, double* re, double* im) const;

private:
    void fftDif(double* re, double* im) const;
    void ifftDit(double* re, double* im) const;

    size_t N_, M_;
    std::vector<double> twRe_, twIm_;        // e^{-2 pi i j / M}, j < M/2
    std::vector<double> twistRe_, twistIm_;  // e^{i pi j / N}, j < M
};

const FftPlan& fftPlan(size_t N);

inline uint32_t torusFromDouble32(double x)
{
    return static_cast<uint32_t>(static_cast<int64_t>(std::llrint(x)));
}

inline uint64_t torusFromDouble64(double x)
{
    constexpr double kTwo64 = 18446744073709551616.0;
    constexpr double kTwo63 = 9223372036854775808.0;
    x -= kTwo64 * std::nearbyint(x / kTwo64);
    if (x >= kTwo63)
        x -= kTwo64;
    if (x < -kTwo63)
        x += kTwo64;
    return static_cast<uint64_t>(static_cast<int64_t>(std::llrint(x)));
}

template <class S>
void FftPlan::forward(double* re, double* im, const S* p) const
{
    using Signed = std::conditional_t<sizeof(S) == 8, int64_t, int32_t>;
    for (size_t j = 0; j < M_; j++) {
        const double x = static_cast<double>(static_cast<Signed>(p[j]));
        const double y = static_cast<double>(static_cast<Signed>(p[j + M_]));
        re[j] = x * twistRe_[j] - y * twistIm_[j];
        im[j] = x * twistIm_[j] + y * twistRe_[j];
    }
    fftDif(re, im);
}

template <class T>
void FftPlan::inverseToTorus(T* out, double* re, double* im) const
{
    ifftDit(re, im);
    const double scale = 1.0 / static_cast<double>(M_);
    for (size_t j = 0; j < M_; j++) {
        // untwist: multiply by conj(twist[j]) and scale
        const double x = re[j] * scale;
        const double y = im[j] * scale;
        const double cr = x * twistRe_[j] + y * twistIm_[j];
        const double ci = y * twistRe_[j] - x * twistIm_[j];
        if constexpr (sizeof(T) == 8) {
            out[j] = torusFromDouble64(cr);
            out[j + M_] = torusFromDouble64(ci);
        }
        else {
            out[j] = torusFromDouble32(cr);
            out[j + M_] = torusFromDouble32(ci);
        }
    }
}

}  // namespace hvp::tfhe

#endif
