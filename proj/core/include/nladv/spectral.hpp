#pragma once

#include <complex>
#include <span>
#include <vector>

#include "nladv/grid.hpp"

namespace nladv::spectral {

/// Signed wavenumber carried by DFT bin b of an n-point transform
/// (bins above n/2 hold the negative frequencies).
inline int signed_mode(int bin, int n) { return bin <= n / 2 ? bin : bin - n; }

/// Fourier coefficients c_k = (1/2pi) int e^{-ikx} f(x) dx from samples at
/// cell centers x_j = (j + 1/2) dx. Returns one coefficient per DFT bin.
std::vector<std::complex<double>> analyze_centers(const PeriodicGrid& grid,
                                                  std::span<const double> values);

/// Inverse of analyze_centers: f(x_j) = sum_k c_k e^{+ik x_j}.
std::vector<double> synthesize_centers(const PeriodicGrid& grid,
                                       std::span<const std::complex<double>> coeffs);

/// Fourier coefficients from samples at offsets m*dx (no half-cell phase).
std::vector<std::complex<double>> analyze_offsets(std::span<const double> values);

/// In-place multiply by (ik)^order, zeroing the ambiguous Nyquist bin for odd orders.
void apply_derivative(std::vector<std::complex<double>>& coeffs, int order);

} // namespace nladv::spectral
