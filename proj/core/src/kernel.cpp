#include "nladv/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "nladv/spectral.hpp"

namespace nladv {

namespace {
constexpr double pi = two_pi / 2;

double gauss(double x) { return std::exp(-pi * x * x); }
double gauss_d1(double x) { return -2 * pi * x * gauss(x); }
double gauss_d2(double x) { return (4 * pi * pi * x * x - 2 * pi) * gauss(x); }
} // namespace

BaseKernel BaseKernel::gaussian() {
    BaseKernel k;
    k.kind_ = BaseKernelKind::Gaussian;
    return k;
}

BaseKernel BaseKernel::tabulated(std::vector<double> x, std::vector<double> rho) {
    if (x.size() != rho.size() || x.size() < 2)
        throw ConfigError("BaseKernel::tabulated: need two columns of equal length >= 2");
    for (size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw ConfigError("BaseKernel::tabulated: x must be ascending");
    BaseKernel k;
    k.kind_ = BaseKernelKind::Tabulated;
    k.tab_x_ = std::move(x);
    k.tab_v_ = std::move(rho);
    return k;
}

BaseKernel BaseKernel::tabulated_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open kernel table: " + path);
    std::vector<double> xs, vs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double x, v;
        if (row >> x >> v) {
            xs.push_back(x);
            vs.push_back(v);
        }
        // non-numeric lines (headers) are skipped
    }
    return tabulated(std::move(xs), std::move(vs));
}

double BaseKernel::operator()(double x) const {
    if (kind_ == BaseKernelKind::Gaussian) return gauss(x);
    if (x <= tab_x_.front() || x >= tab_x_.back()) return 0.0;
    auto it = std::upper_bound(tab_x_.begin(), tab_x_.end(), x);
    size_t j = static_cast<size_t>(it - tab_x_.begin());
    double t = (x - tab_x_[j - 1]) / (tab_x_[j] - tab_x_[j - 1]);
    return (1 - t) * tab_v_[j - 1] + t * tab_v_[j];
}

double BaseKernel::derivative(double x) const {
    if (kind_ == BaseKernelKind::Gaussian) return gauss_d1(x);
    const double h = 1e-5;
    return ((*this)(x + h) - (*this)(x - h)) / (2 * h);
}

double BaseKernel::second_derivative(double x) const {
    if (kind_ == BaseKernelKind::Gaussian) return gauss_d2(x);
    const double h = 1e-4;
    return ((*this)(x + h) - 2 * (*this)(x) + (*this)(x - h)) / (h * h);
}

double BaseKernel::tail_mass_beyond(double radius) const {
    if (kind_ == BaseKernelKind::Gaussian) {
        // 2 int_R^inf exp(-pi x^2) dx = erfc(sqrt(pi) R)
        return std::erfc(std::sqrt(pi) * std::max(radius, 0.0));
    }
    double m = 0;
    for (size_t i = 1; i < tab_x_.size(); ++i) {
        double xm = 0.5 * (tab_x_[i - 1] + tab_x_[i]);
        if (std::abs(xm) > radius)
            m += 0.5 * (std::abs(tab_v_[i - 1]) + std::abs(tab_v_[i])) * (tab_x_[i] - tab_x_[i - 1]);
    }
    return m;
}

PeriodizedKernel PeriodizedKernel::periodize(const BaseKernel& rho, const PeriodicGrid& grid,
                                             int k_max, double tail_tol) {
    if (k_max < 1) throw ConfigError("periodize: k_max must be >= 1");
    // Offsets m*dx stay in [0, 2pi); translates beyond |k| = k_max only see
    // rho at distances > (2 k_max - 1) pi from the origin.
    const double covered = (2.0 * k_max - 1.0) * pi;
    const double tail = rho.tail_mass_beyond(covered);
    if (tail > tail_tol) {
        throw TailTooHeavy("periodize: truncated tail mass " + std::to_string(tail) +
                           " exceeds tolerance");
    }
    const int n = grid.n_cells();
    std::vector<double> samples(n, 0.0);
    for (int m = 0; m < n; ++m) {
        const double x = m * grid.dx();
        double s = 0;
        for (int k = -k_max; k <= k_max; ++k) s += rho(x + two_pi * k);
        samples[m] = two_pi * s;
    }
    return PeriodizedKernel(grid, std::move(samples), rho, k_max, tail);
}

PeriodizedKernel PeriodizedKernel::from_samples(const PeriodicGrid& grid,
                                                std::vector<double> samples) {
    if (static_cast<int>(samples.size()) != grid.n_cells())
        throw GridMismatch("from_samples: sample count != n_cells");
    return PeriodizedKernel(grid, std::move(samples), std::nullopt, 0, 0.0);
}

PeriodizedKernel::PeriodizedKernel(const PeriodicGrid& grid, std::vector<double> samples,
                                   std::optional<BaseKernel> base, int k_max, double tail_bound)
    : grid_(grid), k_values_(std::move(samples)), base_(std::move(base)),
      k_max_(k_max), tail_bound_(tail_bound) {
    const int n = grid_.n_cells();
    bins_ = spectral::analyze_offsets(k_values_);

    const int n_max = n / 2 - 1;
    coeffs_.resize(n_max + 1);
    imag_max_ = 0;
    double peak = 0;
    for (int k = 0; k <= n_max; ++k) {
        coeffs_[k] = bins_[k].real();
        imag_max_ = std::max(imag_max_, std::abs(bins_[k].imag()));
        peak = std::max(peak, std::abs(coeffs_[k]));
    }
    // strict positivity, up to the transform's rounding floor: coefficients
    // that underflow to the noise level are treated as vanishing, any resolved
    // negative value voids the certificate
    const double floor = 1e-13 * peak;
    certified_ = imag_max_ < 1e-10 && peak > 0;
    for (int k = 1; k <= n_max; ++k)
        if (coeffs_[k] < -floor || (std::abs(coeffs_[k]) > floor && !(coeffs_[k] > 0)))
            certified_ = false;

    // K' and K'' at the sample offsets by spectral differentiation.
    auto c1 = bins_;
    spectral::apply_derivative(c1, 1);
    auto c2 = bins_;
    spectral::apply_derivative(c2, 2);
    // The samples live at m*dx; cancel the half-cell phase synthesize_centers adds.
    auto inverse_at_offsets = [&](const std::vector<std::complex<double>>& c) {
        std::vector<std::complex<double>> unphased(n);
        for (int b = 0; b < n; ++b) {
            const int k = spectral::signed_mode(b, n);
            unphased[b] = c[b] * std::polar(1.0, -k * 0.5 * grid_.dx());
        }
        return spectral::synthesize_centers(grid_, unphased);
    };
    d1_ = inverse_at_offsets(c1);
    d2_ = inverse_at_offsets(c2);
}

std::vector<double> PeriodizedKernel::fourier_coefficients(int n_max) const {
    if (n_max >= grid_.n_cells() / 2)
        throw AliasingRisk("fourier_coefficients: n_max must be below n_cells/2");
    std::vector<double> out(n_max + 1);
    for (int k = 0; k <= n_max; ++k) out[k] = bins_[k].real();
    return out;
}

std::vector<std::complex<double>> PeriodizedKernel::mode_product(const Field& u) const {
    if (!(u.grid() == grid_)) throw GridMismatch("kernel and field grids differ");
    auto cu = spectral::analyze_centers(grid_, u.values());
    for (size_t b = 0; b < cu.size(); ++b) cu[b] *= bins_[b];
    return cu;
}

Field PeriodizedKernel::convolve(const Field& u) const {
    auto c = mode_product(u);
    return Field(u.grid(), spectral::synthesize_centers(grid_, c));
}

Field PeriodizedKernel::convolve_direct(const Field& u) const {
    if (!(u.grid() == grid_)) throw GridMismatch("kernel and field grids differ");
    const int n = grid_.n_cells();
    std::vector<double> r(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0;
        for (int j = 0; j < n; ++j) {
            int m = i - j;
            if (m < 0) m += n;
            s += k_values_[m] * u[j];
        }
        r[i] = s / n;
    }
    return Field(u.grid(), std::move(r));
}

namespace {
void check_density(const Field& u) {
    if (u.min_value() < -1e-12) throw NegativeDensity("density field has negative values");
}
} // namespace

Field PeriodizedKernel::velocity(const Field& u_total) const {
    check_density(u_total);
    auto c = mode_product(u_total);
    spectral::apply_derivative(c, 1);
    for (auto& z : c) z = -z;
    return Field(u_total.grid(), spectral::synthesize_centers(grid_, c));
}

Field PeriodizedKernel::divergence_v(const Field& u_total) const {
    check_density(u_total);
    auto c = mode_product(u_total);
    spectral::apply_derivative(c, 2);
    for (auto& z : c) z = -z;
    return Field(u_total.grid(), spectral::synthesize_centers(grid_, c));
}

double PeriodizedKernel::value_at(double x) const {
    if (base_ && base_->kind() == BaseKernelKind::Gaussian) {
        double s = 0;
        for (int k = -k_max_; k <= k_max_; ++k) s += gauss(x + two_pi * k);
        return two_pi * s;
    }
    const int n_max = static_cast<int>(coeffs_.size()) - 1;
    double s = bins_[0].real();
    for (int k = 1; k <= n_max; ++k) {
        const std::complex<double> c = bins_[k];
        s += 2 * (c.real() * std::cos(k * x) - c.imag() * std::sin(k * x));
    }
    return s;
}

double PeriodizedKernel::deriv_at(double x) const {
    if (base_ && base_->kind() == BaseKernelKind::Gaussian) {
        double s = 0;
        for (int k = -k_max_; k <= k_max_; ++k) s += gauss_d1(x + two_pi * k);
        return two_pi * s;
    }
    const int n_max = static_cast<int>(coeffs_.size()) - 1;
    double s = 0;
    for (int k = 1; k <= n_max; ++k) {
        const std::complex<double> c = bins_[k];
        s += 2 * k * (-c.real() * std::sin(k * x) - c.imag() * std::cos(k * x));
    }
    return s;
}

double PeriodizedKernel::second_deriv_at(double x) const {
    if (base_ && base_->kind() == BaseKernelKind::Gaussian) {
        double s = 0;
        for (int k = -k_max_; k <= k_max_; ++k) s += gauss_d2(x + two_pi * k);
        return two_pi * s;
    }
    const int n_max = static_cast<int>(coeffs_.size()) - 1;
    double s = 0;
    for (int k = 1; k <= n_max; ++k) {
        const std::complex<double> c = bins_[k];
        s += -2 * k * k * (c.real() * std::cos(k * x) - c.imag() * std::sin(k * x));
    }
    return s;
}

double PeriodizedKernel::d2_sup() const {
    double m = 0;
    for (double v : d2_) m = std::max(m, std::abs(v));
    return m;
}

void PeriodizedKernel::write_certificate_csv(std::ostream& out) const {
    out << "n,c_n\n";
    out.precision(17);
    for (size_t n = 0; n < coeffs_.size(); ++n) out << n << ',' << coeffs_[n] << '\n';
}

} // namespace nladv
