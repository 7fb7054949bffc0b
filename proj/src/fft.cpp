#include "hvp/tfhe/fft.hpp"

#include <memory>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace hvp::tfhe {

FftPlan::FftPlan(size_t N) : N_(N), M_(N / 2)
{
    if (N < 4 || (N & (N - 1)) != 0)
        throw std::invalid_argument("FFT size must be a power of two >= 4");
    twRe_.resize(M_ / 2);
    twIm_.resize(M_ / 2);
    for (size_t j = 0; j < M_ / 2; j++) {
        const double ang = -2.0 * std::numbers::pi * static_cast<double>(j) /
                           static_cast<double>(M_);
        twRe_[j] = std::cos(ang);
        twIm_[j] = std::sin(ang);
    }
    twistRe_.resize(M_);
    twistIm_.resize(M_);
    for (size_t j = 0; j < M_; j++) {
        const double ang = std::numbers::pi * static_cast<double>(j) /
                           static_cast<double>(N_);
        twistRe_[j] = std::cos(ang);
        twistIm_[j] = std::sin(ang);
    }
}

// Decimation in frequency; natural order in, bit-reversed order out.
void FftPlan::fftDif(double* re, double* im) const
{
    for (size_t len = M_ >> 1; len > 0; len >>= 1) {
        const size_t stride = M_ / (len << 1);
        for (size_t base = 0; base < M_; base += len << 1) {
            for (size_t k = 0; k < len; k++) {
                const double wr = twRe_[k * stride];
                const double wi = twIm_[k * stride];
                const size_t i0 = base + k;
                const size_t i1 = i0 + len;
                const double ur = re[i0], ui = im[i0];
                const double vr = re[i1], vi = im[i1];
                re[i0] = ur + vr;
                im[i0] = ui + vi;
                const double dr = ur - vr;
                const double di = ui - vi;
                re[i1] = dr * wr - di * wi;
                im[i1] = dr * wi + di * wr;
            }
        }
    }
}

// Decimation in time with conjugated twiddles; bit-reversed order in,
// natural order out. Inverse of fftDif up to the 1/M factor.
void FftPlan::ifftDit(double* re, double* im) const
{
    for (size_t len = 1; len < M_; len <<= 1) {
        const size_t stride = M_ / (len << 1);
        for (size_t base = 0; base < M_; base += len << 1) {
            for (size_t k = 0; k < len; k++) {
                const double wr = twRe_[k * stride];
                const double wi = -twIm_[k * stride];
                const size_t i0 = base + k;
                const size_t i1 = i0 + len;
                const double tr = re[i1] * wr - im[i1] * wi;
                const double ti = re[i1] * wi + im[i1] * wr;
                re[i1] = re[i0] - tr;
                im[i1] = im[i0] - ti;
                re[i0] += tr;
                im[i0] += ti;
            }
        }
    }
}

const FftPlan& fftPlan(size_t N)
{
    thread_local std::unordered_map<size_t, std::unique_ptr<FftPlan>> plans;
    auto it = plans.find(N);
    if (it == plans.end())
        it = plans.emplace(N, std::make_unique<FftPlan>(N)).first;
    return *it->second;
}

}  // namespace hvp::tfhe
