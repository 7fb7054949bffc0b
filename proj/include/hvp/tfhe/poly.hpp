#ifndef HVP_TFHE_POLY_HPP
#define HVP_TFHE_POLY_HPP

#include <cstdint>
#include <cstddef>
#include <type_traits>

namespace hvp::tfhe {

// Arithmetic in T[X]/(X^N + 1) over torus words. Wraparound of the
// unsigned word type gives exact torus addition.

// acc += digits * poly (negacyclic). Digits are small signed integers from
// the gadget decomposition; the product wraps mod 2^width.
template <class T, class D>
void polyMulAccExact(T* acc, const D* digits, const T* poly, size_t N)
{
    static_assert(std::is_unsigned_v<T>);
    for (size_t i = 0; i < N; i++) {
        const T d = static_cast<T>(digits[i]);
        if (d == 0)
            continue;
        size_t j = 0;
        for (; j < N - i; j++)
            acc[i + j] += d * poly[j];
        for (; j < N; j++)
            acc[i + j - N] -= d * poly[j];
    }
}

// out = X^k * p with k in [0, 2N). X^N == -1.
template <class T>
void polyRotate(T* out, const T* p, size_t N, uint32_t k)
{
    if (k < N) {
        for (size_t i = 0; i < k; i++)
            out[i] = static_cast<T>(0) - p[i + N - k];
        for (size_t i = k; i < N; i++)
            out[i] = p[i - k];
    }
    else {
        const uint32_t kk = k - static_cast<uint32_t>(N);
        for (size_t i = 0; i < kk; i++)
            out[i] = p[i + N - kk];
        for (size_t i = kk; i < N; i++)
            out[i] = static_cast<T>(0) - p[i - kk];
    }
}

// out = (X^k - 1) * p with k in [0, 2N).
template <class T>
void polyMulByXkMinusOne(T* out, const T* p, size_t N, uint32_t k)
{
    polyRotate(out, p, N, k);
    for (size_t i = 0; i < N; i++)
        out[i] -= p[i];
}

// Exact negacyclic product of a torus polynomial and a binary polynomial
// (secret key), used on encryption/decryption paths.
template <class T>
void polyMulBinary(T* out, const T* torus, const uint32_t* bits, size_t N)
{
    for (size_t i = 0; i < N; i++)
        out[i] = 0;
    for (size_t i = 0; i < N; i++) {
        if (!bits[i])
            continue;
        size_t j = 0;
        for (; j < N - i; j++)
            out[i + j] += torus[j];
        for (; j < N; j++)
            out[i + j - N] -= torus[j];
    }
}

// Signed gadget decomposition with rounding offset; digits lie in
// [-Bg/2, Bg/2). Writes l digit polynomials of length N.
template <class T>
void decomposePoly(int32_t* out, const T* p, size_t N, uint32_t l,
                   uint32_t bgBits)
{
    constexpr uint32_t W = sizeof(T) * 8;
    const T halfBg = static_cast<T>(1) << (bgBits - 1);
    const T mask = (static_cast<T>(1) << bgBits) - 1;
    T offset = 0;
    for (uint32_t i = 1; i <= l; i++)
        offset += halfBg << (W - i * bgBits);
    for (size_t j = 0; j < N; j++) {
        const T v = p[j] + offset;
        for (uint32_t i = 0; i < l; i++) {
            const T digit = ((v >> (W - (i + 1) * bgBits)) & mask) - halfBg;
            out[i * N + j] = static_cast<int32_t>(
                static_cast<std::make_signed_t<T>>(digit));
        }
    }
}

}  // namespace hvp::tfhe

#endif
