#pragma once

#include <cmath>
#include <cstdlib>
#include <span>
#include <vector>

#include "nladv/errors.hpp"

namespace nladv {

inline constexpr double two_pi = 6.28318530717958647692528676655900577;

/// Uniform cell decomposition of the torus [0, 2*pi).
/// Cell i spans [i*dx, (i+1)*dx) with center x_i = (i + 1/2)*dx.
class PeriodicGrid {
public:
    explicit PeriodicGrid(int n_cells) : n_(n_cells) {
        if (n_cells < 4) throw ConfigError("PeriodicGrid: n_cells must be >= 4");
        dx_ = two_pi / n_cells;
        centers_.resize(n_cells);
        for (int i = 0; i < n_cells; ++i) centers_[i] = (i + 0.5) * dx_;
    }

    int n_cells() const { return n_; }
    double length() const { return two_pi; }
    double dx() const { return dx_; }
    double center(int i) const { return centers_[i]; }
    /// Right interface of cell i, x_{i+1/2} = (i+1)*dx.
    double interface(int i) const { return (i + 1) * dx_; }
    std::span<const double> centers() const { return centers_; }

    /// Map x to its representative in [0, 2*pi).
    double wrap(double x) const {
        double y = std::fmod(x, two_pi);
        return y < 0 ? y + two_pi : y;
    }

    bool operator==(const PeriodicGrid& o) const { return n_ == o.n_; }

private:
    int n_;
    double dx_;
    std::vector<double> centers_;
};

/// Cell-averaged scalar function on a PeriodicGrid. The grid must outlive the field.
class Field {
public:
    Field(const PeriodicGrid& grid, double fill = 0.0)
        : grid_(&grid), values_(static_cast<size_t>(grid.n_cells()), fill) {}

    Field(const PeriodicGrid& grid, std::vector<double> values)
        : grid_(&grid), values_(std::move(values)) {
        if (static_cast<int>(values_.size()) != grid.n_cells())
            throw GridMismatch("Field: values length does not match n_cells");
    }

    const PeriodicGrid& grid() const { return *grid_; }
    int size() const { return grid_->n_cells(); }
    double& operator[](int i) { return values_[i]; }
    double operator[](int i) const { return values_[i]; }
    std::span<const double> values() const { return values_; }
    std::vector<double>& data() { return values_; }
    const std::vector<double>& data() const { return values_; }

    bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    double min_value() const {
        double m = values_[0];
        for (double v : values_) m = std::min(m, v);
        return m;
    }

private:
    const PeriodicGrid* grid_;
    std::vector<double> values_;
};

inline void require_same_grid(const Field& a, const Field& b) {
    if (!(a.grid() == b.grid())) throw GridMismatch("fields live on different grids");
}

/// (1/|T|) * sum v_i dx, i.e. the arithmetic mean of the cell averages.
inline double mean(const Field& f) {
    double s = 0;
    for (double v : f.values()) s += v;
    return s / f.size();
}

inline double l1_norm(const Field& f) {
    double s = 0;
    for (double v : f.values()) s += std::abs(v);
    return s * f.grid().dx();
}

inline double linf_norm(const Field& f) {
    double m = 0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

inline Field operator+(const Field& a, const Field& b) {
    require_same_grid(a, b);
    Field r(a.grid());
    for (int i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

/// Cyclic rotation by `shift` cells: result[i] = f[(i - shift) mod n].
inline Field rotated(const Field& f, int shift) {
    const int n = f.size();
    Field r(f.grid());
    for (int i = 0; i < n; ++i) {
        int j = (i - shift) % n;
        if (j < 0) j += n;
        r[i] = f[j];
    }
    return r;
}

} // namespace nladv
