#pragma once

#include <complex>

namespace topeig::detail {

/// In-place unnormalized DFT over a d-dimensional cube of side n.
/// sign = -1 forward, +1 backward. Thread safe.
void fft_inplace(std::complex<double>* data, int dimension, int n, int sign);

}  // namespace topeig::detail
