#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

#include "lpflow/grid.hpp"

namespace lpflow {

using Complex = std::complex<double>;

/// Real-valued multi-component field sampled on a TorusGrid.
/// Storage is (points x components); column c holds component c over the
/// flattened lattice (axis 0 fastest).
class RealField {
public:
    explicit RealField(const TorusGrid& grid, int components = 1)
        : grid_(grid), v_(Eigen::ArrayXXd::Zero(grid.points(), components)) {
        if (components < 1) throw ParameterError("RealField: components must be >= 1");
    }

    const TorusGrid& grid() const { return grid_; }
    int components() const { return static_cast<int>(v_.cols()); }

    Eigen::ArrayXXd& data() { return v_; }
    const Eigen::ArrayXXd& data() const { return v_; }
    Eigen::ArrayXXd::ColXpr comp(int c) { return v_.col(c); }
    Eigen::ArrayXXd::ConstColXpr comp(int c) const { return v_.col(c); }

    double& operator()(std::int64_t idx, int c = 0) { return v_(idx, c); }
    double operator()(std::int64_t idx, int c = 0) const { return v_(idx, c); }

    /// Pointwise Euclidean magnitude across components.
    Eigen::ArrayXd magnitude() const {
        if (components() == 1) return v_.col(0).abs();
        return v_.square().rowwise().sum().sqrt();
    }

    /// Sample fn(x) into every component; fn receives the node coordinates
    /// and the component index.
    static RealField sample(const TorusGrid& grid, int components,
                            const std::function<double(const std::array<double, 3>&, int)>& fn) {
        RealField f(grid, components);
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (std::int64_t idx = 0; idx < grid.points(); ++idx) {
            auto i = grid.unflatten(idx);
            for (int a = 0; a < grid.dim(); ++a) x[a] = grid.node(a, i[a]);
            for (int c = 0; c < components; ++c) f.v_(idx, c) = fn(x, c);
        }
        return f;
    }

    static RealField sample_scalar(const TorusGrid& grid,
                                   const std::function<double(const std::array<double, 3>&)>& fn) {
        return sample(grid, 1, [&fn](const std::array<double, 3>& x, int) { return fn(x); });
    }

private:
    TorusGrid grid_;
    Eigen::ArrayXXd v_;
};

/// Fourier coefficients of a multi-component field, amplitude-normalized:
/// c(k) = (1/M) sum_x f(x) exp(-i k.x), so a unit constant has c(0) = 1 and
/// cos(k.x) has c(+/-k) = 1/2. The grid mean of |f|^2 equals sum_k |c(k)|^2.
class SpectralField {
public:
    explicit SpectralField(const TorusGrid& grid, int components = 1)
        : grid_(grid), c_(Eigen::ArrayXXcd::Zero(grid.points(), components)) {
        if (components < 1) throw ParameterError("SpectralField: components must be >= 1");
    }

    const TorusGrid& grid() const { return grid_; }
    int components() const { return static_cast<int>(c_.cols()); }

    Eigen::ArrayXXcd& data() { return c_; }
    const Eigen::ArrayXXcd& data() const { return c_; }
    Eigen::ArrayXXcd::ColXpr comp(int c) { return c_.col(c); }
    Eigen::ArrayXXcd::ConstColXpr comp(int c) const { return c_.col(c); }

    Complex& operator()(std::int64_t idx, int c = 0) { return c_(idx, c); }
    Complex operator()(std::int64_t idx, int c = 0) const { return c_(idx, c); }

    SpectralField& operator+=(const SpectralField& o) {
        require_same_shape(o);
        c_ += o.c_;
        return *this;
    }
    SpectralField& operator-=(const SpectralField& o) {
        require_same_shape(o);
        c_ -= o.c_;
        return *this;
    }
    SpectralField& operator*=(double s) {
        c_ *= s;
        return *this;
    }
    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

    void require_same_shape(const SpectralField& o) const {
        if (grid_ != o.grid_ || components() != o.components())
            throw ShapeError("SpectralField: shape mismatch");
    }

private:
    TorusGrid grid_;
    Eigen::ArrayXXcd c_;
};

inline void require_same_grid(const TorusGrid& a, const TorusGrid& b) {
    if (a != b) throw ShapeError("fields live on different grids");
}

}  // namespace lpflow
