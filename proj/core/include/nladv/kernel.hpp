#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nladv/grid.hpp"

namespace nladv {

enum class BaseKernelKind { Gaussian, Tabulated };

/// Whole-line interaction kernel rho, prior to periodization. Must be
/// integrable with rapidly decaying tails.
class BaseKernel {
public:
    /// rho(x) = exp(-pi x^2); unit integral, Fourier transform exp(-pi xi^2) > 0.
    static BaseKernel gaussian();

    /// Piecewise-linear table (x ascending). rho = 0 outside the table range.
    static BaseKernel tabulated(std::vector<double> x, std::vector<double> rho);

    /// Load a two-column CSV (x, rho) with optional header line.
    static BaseKernel tabulated_from_csv(const std::string& path);

    BaseKernelKind kind() const { return kind_; }
    double operator()(double x) const;
    double derivative(double x) const;       // analytic for Gaussian, FD for tables
    double second_derivative(double x) const;

    /// Upper bound on int |rho| over |x| > radius.
    double tail_mass_beyond(double radius) const;

private:
    BaseKernel() = default;
    BaseKernelKind kind_ = BaseKernelKind::Gaussian;
    std::vector<double> tab_x_, tab_v_;
};

/// Torus kernel K(x) = 2*pi * sum_k rho(x + 2*pi*k), tabulated on a grid
/// together with its Fourier coefficients c_n[K] = (1/2pi) int e^{-inx} K(x) dx.
///
/// Samples are stored at the offsets m*dx (the differences of cell centers),
/// which is what both the convolution quadrature and the upwind scheme consume.
class PeriodizedKernel {
public:
    /// Sum the periodization series truncated at |k| <= k_max. Throws
    /// TailTooHeavy when the neglected tail of rho exceeds tail_tol.
    static PeriodizedKernel periodize(const BaseKernel& rho, const PeriodicGrid& grid,
                                      int k_max, double tail_tol = 1e-12);

    /// Wrap an already-periodic kernel given by its samples at offsets m*dx.
    static PeriodizedKernel from_samples(const PeriodicGrid& grid, std::vector<double> samples);

    const PeriodicGrid& grid() const { return grid_; }
    std::span<const double> values() const { return k_values_; }
    std::span<const double> d1() const { return d1_; }
    std::span<const double> d2() const { return d2_; }
    int truncation_k_max() const { return k_max_; }
    double truncation_tail() const { return tail_bound_; }

    /// c_n for n = 0 .. n_cells/2 - 1 (real parts; see imag_max()).
    std::span<const double> fourier_coeffs() const { return coeffs_; }
    /// Largest |Im c_n| over the stored range; ~0 for even kernels.
    double imag_max() const { return imag_max_; }
    /// True when every stored c_n with n != 0 is strictly positive, which is
    /// the structural condition the energy dissipation identity rests on.
    bool positivity_certified() const { return certified_; }

    /// c_n for n = 0..n_max via the discrete transform of the samples.
    /// Throws AliasingRisk when n_max >= n_cells/2.
    std::vector<double> fourier_coefficients(int n_max) const;

    /// (K o u)(x_i), spectral path: c_k[K] * c_k[u], inverse transform.
    Field convolve(const Field& u) const;
    /// (K o u)(x_i) by direct O(n^2) quadrature (1/2pi) sum K(x_i - x_j) u_j dx.
    Field convolve_direct(const Field& u) const;

    /// v = -d/dx (K o u_total) at cell centers, spectral derivative.
    Field velocity(const Field& u_total) const;
    /// div v = -d2/dx2 (K o u_total) at cell centers.
    Field divergence_v(const Field& u_total) const;

    /// Pointwise evaluation at arbitrary x (periodization series for a Gaussian
    /// base, truncated Fourier series otherwise).
    double value_at(double x) const;
    double deriv_at(double x) const;
    double second_deriv_at(double x) const;

    double d2_sup() const;   // ||K''||_inf over the sample grid

    /// Two-column CSV "n,c_n" for the positivity certificate.
    void write_certificate_csv(std::ostream& out) const;

private:
    PeriodizedKernel(const PeriodicGrid& grid, std::vector<double> samples,
                     std::optional<BaseKernel> base, int k_max, double tail_bound);

    std::vector<std::complex<double>> mode_product(const Field& u) const;

    PeriodicGrid grid_;
    std::vector<double> k_values_;
    std::vector<double> d1_, d2_;
    std::vector<std::complex<double>> bins_;  // c_k at every DFT bin
    std::vector<double> coeffs_;              // Re c_n, n = 0..n/2-1
    double imag_max_ = 0;
    bool certified_ = false;
    std::optional<BaseKernel> base_;
    int k_max_ = 0;
    double tail_bound_ = 0;
};

} // namespace nladv
