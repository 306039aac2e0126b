#pragma once

#include <complex>
#include <span>

namespace ellsys::detail {

/// In-place n-dimensional complex DFT of G^n points (unnormalized, FFTW sign convention).
/// sign = -1 is the forward (exp(-2 pi i ...)) transform.
void fft_inplace(int n, int G, std::span<std::complex<double>> data, int sign);

}  // namespace ellsys::detail
