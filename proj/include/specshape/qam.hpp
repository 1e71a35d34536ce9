#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace specshape {

/// Gray-coded square 16-QAM with unit average energy. Bits 3..2 select the in-phase level and
/// bits 1..0 the quadrature level; adjacent levels differ in one bit.
namespace qam16 {

inline constexpr int kBitsPerSymbol = 4;
inline const double kScale = 1.0 / std::sqrt(10.0);

/// Gray pair -> level: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
inline constexpr std::array<int, 4> kLevel = {-3, -1, 3, 1};

inline std::complex<double> map(unsigned bits) {
    return {kLevel[(bits >> 2) & 3u] * kScale, kLevel[bits & 3u] * kScale};
}

inline unsigned slice_axis(double v) {
    const double x = v / kScale;
    if (x < -2.0) return 0u;
    if (x < 0.0) return 1u;
    if (x < 2.0) return 3u;
    return 2u;
}

/// Hard decision to the nearest constellation point.
inline unsigned demap(std::complex<double> y) {
    return (slice_axis(y.real()) << 2) | slice_axis(y.imag());
}

}  // namespace qam16

}  // namespace specshape
