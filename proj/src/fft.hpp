#pragma once

#include <complex>
#include <span>
#include <vector>

// Thin FFTW wrapper. Plans are created once per (kind, size) with FFTW_ESTIMATE
// and cached; execution uses the new-array interface and is thread-safe.
namespace tdc::detail {

using Complex = std::complex<double>;

/// Real-to-complex forward transform, n/2 + 1 bins, unnormalized.
std::vector<Complex> rfft(std::span<const double> x);

/// Complex-to-real inverse of an (n/2 + 1)-bin spectrum, scaled by 1/n.
std::vector<double> irfft(std::span<const Complex> spectrum, std::size_t n);

/// Complex inverse transform, scaled by 1/n.
std::vector<Complex> ifft(std::span<const Complex> spectrum);

}  // namespace tdc::detail
