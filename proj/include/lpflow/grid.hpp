#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "lpflow/errors.hpp"

namespace lpflow {

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

/// Uniform collocation lattice on the N-dimensional torus
/// prod_i [0, period_i), N = 2 or 3.
///
/// Sizes must be powers of two (>= 8): every transform stays radix-2 and a
/// coarse grid's frequency lattice is an exact subset of any finer one, which
/// the resolution-stability checks rely on.
///
/// Conventions:
///   - flat index: axis 0 fastest, i.e. idx = i0 + n0*(i1 + n1*i2);
///   - frequency index n in [-size/2, size/2) with wavenumber k = 2*pi*n/period;
///   - the mode n = -size/2 is the (unpaired) Nyquist mode.
class TorusGrid {
public:
    TorusGrid(int dim, std::array<int, 3> size, std::array<double, 3> period)
        : dim_(dim), size_(size), period_(period) {
        if (dim != 2 && dim != 3) throw ParameterError("TorusGrid: dim must be 2 or 3");
        for (int a = 0; a < dim_; ++a) {
            if (size_[a] < 8 || (size_[a] & (size_[a] - 1)) != 0)
                throw ParameterError("TorusGrid: sizes must be powers of two >= 8");
            if (!(period_[a] > 0.0)) throw ParameterError("TorusGrid: periods must be positive");
        }
        for (int a = dim_; a < 3; ++a) { size_[a] = 1; period_[a] = 1.0; }
    }

    static TorusGrid square(int n, double period = two_pi) {
        return TorusGrid(2, {n, n, 1}, {period, period, 1.0});
    }
    static TorusGrid cube(int n, double period = two_pi) {
        return TorusGrid(3, {n, n, n}, {period, period, period});
    }

    int dim() const { return dim_; }
    int size(int axis) const { return size_[axis]; }
    double period(int axis) const { return period_[axis]; }

    std::int64_t points() const {
        std::int64_t m = 1;
        for (int a = 0; a < dim_; ++a) m *= size_[a];
        return m;
    }
    double volume() const {
        double v = 1.0;
        for (int a = 0; a < dim_; ++a) v *= period_[a];
        return v;
    }
    double spacing(int axis) const { return period_[axis] / size_[axis]; }
    double min_spacing() const {
        double h = spacing(0);
        for (int a = 1; a < dim_; ++a) h = std::min(h, spacing(a));
        return h;
    }

    /// Physical coordinate of lattice site i along an axis.
    double node(int axis, int i) const { return i * spacing(axis); }

    /// Signed integer frequency of index i along an axis, in [-size/2, size/2).
    int freq_index(int axis, int i) const {
        return i < size_[axis] / 2 ? i : i - size_[axis];
    }
    bool is_nyquist(int axis, int i) const { return freq_index(axis, i) == -size_[axis] / 2; }

    /// Physical wavenumber 2*pi*n/period of index i along an axis.
    double wavenumber(int axis, int i) const {
        return two_pi * freq_index(axis, i) / period_[axis];
    }

    /// Largest |k| on the lattice (attained at the all-Nyquist corner).
    double max_wavenumber() const {
        double s = 0.0;
        for (int a = 0; a < dim_; ++a) {
            double k = two_pi * (size_[a] / 2) / period_[a];
            s += k * k;
        }
        return std::sqrt(s);
    }

    /// Decompose a flat index into per-axis indices.
    std::array<int, 3> unflatten(std::int64_t idx) const {
        std::array<int, 3> i{0, 0, 0};
        i[0] = static_cast<int>(idx % size_[0]);
        idx /= size_[0];
        i[1] = static_cast<int>(idx % size_[1]);
        i[2] = static_cast<int>(idx / size_[1]);
        return i;
    }
    std::int64_t flatten(int i0, int i1, int i2 = 0) const {
        return i0 + static_cast<std::int64_t>(size_[0]) * (i1 + static_cast<std::int64_t>(size_[1]) * i2);
    }

    bool operator==(const TorusGrid& o) const {
        return dim_ == o.dim_ && size_ == o.size_ && period_ == o.period_;
    }
    bool operator!=(const TorusGrid& o) const { return !(*this == o); }

private:
    int dim_;
    std::array<int, 3> size_;
    std::array<double, 3> period_;
};

}  // namespace lpflow
