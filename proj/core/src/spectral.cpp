#include "nladv/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <memory>

namespace nladv::spectral {

namespace {

// One cached FFTW plan pair per transform size. fftw_malloc keeps the buffers
// at a fixed alignment so planning is reproducible between runs.
struct PlanPair {
    int n = 0;
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    explicit PlanPair(int size) : n(size) {
        in = fftw_alloc_complex(size);
        out = fftw_alloc_complex(size);
        fwd = fftw_plan_dft_1d(size, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(size, in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    PlanPair(const PlanPair&) = delete;
    PlanPair& operator=(const PlanPair&) = delete;
    ~PlanPair() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(in);
        fftw_free(out);
    }
};

PlanPair& plans_for(int n) {
    static std::map<int, std::unique_ptr<PlanPair>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<PlanPair>(n);
    return *slot;
}

std::vector<std::complex<double>> run_dft(std::span<const std::complex<double>> x, bool forward) {
    const int n = static_cast<int>(x.size());
    PlanPair& p = plans_for(n);
    for (int i = 0; i < n; ++i) {
        p.in[i][0] = x[i].real();
        p.in[i][1] = x[i].imag();
    }
    fftw_execute(forward ? p.fwd : p.bwd);
    std::vector<std::complex<double>> r(n);
    for (int i = 0; i < n; ++i) r[i] = {p.out[i][0], p.out[i][1]};
    return r;
}

} // namespace

std::vector<std::complex<double>> analyze_centers(const PeriodicGrid& grid,
                                                  std::span<const double> values) {
    const int n = grid.n_cells();
    std::vector<std::complex<double>> buf(n);
    for (int i = 0; i < n; ++i) buf[i] = values[i];
    auto c = run_dft(buf, true);
    // c_k picks up the half-cell phase e^{-ik dx/2} relative to the raw DFT.
    const double half = 0.5 * grid.dx();
    for (int b = 0; b < n; ++b) {
        const int k = signed_mode(b, n);
        c[b] *= std::polar(1.0 / n, -k * half);
    }
    return c;
}

std::vector<double> synthesize_centers(const PeriodicGrid& grid,
                                       std::span<const std::complex<double>> coeffs) {
    const int n = grid.n_cells();
    std::vector<std::complex<double>> buf(n);
    const double half = 0.5 * grid.dx();
    for (int b = 0; b < n; ++b) {
        const int k = signed_mode(b, n);
        buf[b] = coeffs[b] * std::polar(1.0, k * half);
    }
    auto y = run_dft(buf, false);
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) r[i] = y[i].real();
    return r;
}

std::vector<std::complex<double>> analyze_offsets(std::span<const double> values) {
    const int n = static_cast<int>(values.size());
    std::vector<std::complex<double>> buf(n);
    for (int i = 0; i < n; ++i) buf[i] = values[i];
    auto c = run_dft(buf, true);
    for (auto& z : c) z /= n;
    return c;
}

void apply_derivative(std::vector<std::complex<double>>& coeffs, int order) {
    const int n = static_cast<int>(coeffs.size());
    for (int b = 0; b < n; ++b) {
        if (order % 2 == 1 && n % 2 == 0 && b == n / 2) {
            coeffs[b] = 0.0;
            continue;
        }
        const double k = signed_mode(b, n);
        std::complex<double> f = std::complex<double>(0.0, k);
        std::complex<double> m = 1.0;
        for (int p = 0; p < order; ++p) m *= f;
        coeffs[b] *= m;
    }
}

} // namespace nladv::spectral
