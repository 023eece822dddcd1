#pragma once

#include <complex>
#include <vector>

// Thin wrappers over FFTW with per-size plan caching.  All callers in this
// library run transforms of a handful of distinct sizes thousands of times,
// so plans and buffers are reused.

namespace sdaqt::fft {

// Full linear convolution, length a.size() + b.size() - 1.  Falls back to the
// direct algorithm for small inputs.
std::vector<double> convolve(const std::vector<double>& a,
                             const std::vector<double>& b);

// Half spectrum (r2c layout) of a zero-padded to length n; n must be a power
// of two and at least a.size().  Pair with convolve_spectrum when one factor
// is reused across many convolutions.
std::vector<std::complex<double>> real_spectrum(const std::vector<double>& a,
                                                std::size_t n);

// First out_len entries of the linear convolution of b with the sequence
// whose real_spectrum at size n = 2 * (ahat.size() - 1) is ahat; out_len must
// not exceed n.
std::vector<double> convolve_spectrum(
    const std::vector<std::complex<double>>& ahat, const std::vector<double>& b,
    std::size_t out_len);

// Unnormalized DFT with kernel exp(+2*pi*i*j*k/n): values of a Laurent
// polynomial at the n-th roots of unity when the input holds coefficients.
std::vector<std::complex<double>> dft_backward(
    std::vector<std::complex<double>> in);

// Unnormalized DFT with kernel exp(-2*pi*i*j*k/n); divide by n to interpolate
// coefficients from grid values.
std::vector<std::complex<double>> dft_forward(
    std::vector<std::complex<double>> in);

std::size_t next_pow2(std::size_t n);

}  // namespace sdaqt::fft
