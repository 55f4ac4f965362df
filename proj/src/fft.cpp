#include "lpflow/fft.hpp"

#include <unsupported/Eigen/FFT>
#include <vector>

namespace lpflow {
namespace {

// One shared transform object per direction; kissfft caches twiddle plans per
// length inside it. The library is single-threaded by contract (see README),
// so plain statics are fine.
Eigen::FFT<double>& engine() {
    static Eigen::FFT<double> fft;
    return fft;
}

/// In-place 1-D transforms of every lattice line along one axis.
/// The flat layout is idx = lo + stride*(j + n*hi) with j the position along
/// the axis, lo < stride, hi < M/(stride*n).
void transform_axis(Eigen::ArrayXcd& buf, std::int64_t points, int n, std::int64_t stride,
                    bool forward) {
    std::vector<Complex> line(n), out(n);
    const std::int64_t outer = points / (static_cast<std::int64_t>(n) * stride);
    for (std::int64_t hi = 0; hi < outer; ++hi) {
        for (std::int64_t lo = 0; lo < stride; ++lo) {
            const std::int64_t base = lo + stride * n * hi;
            for (int j = 0; j < n; ++j) line[j] = buf[base + stride * j];
            if (forward)
                engine().fwd(out.data(), line.data(), n);
            else
                engine().inv(out.data(), line.data(), n);
            for (int j = 0; j < n; ++j) buf[base + stride * j] = out[j];
        }
    }
}

void transform_all_axes(Eigen::ArrayXcd& buf, const TorusGrid& g, bool forward) {
    std::int64_t stride = 1;
    for (int a = 0; a < g.dim(); ++a) {
        transform_axis(buf, g.points(), g.size(a), stride, forward);
        stride *= g.size(a);
    }
}

/// Flat index of the frequency partner -k of flat index idx.
std::int64_t conjugate_index(const TorusGrid& g, std::int64_t idx) {
    auto i = g.unflatten(idx);
    int j0 = i[0] == 0 ? 0 : g.size(0) - i[0];
    int j1 = i[1] == 0 ? 0 : g.size(1) - i[1];
    int j2 = (g.dim() < 3 || i[2] == 0) ? 0 : g.size(2) - i[2];
    return g.flatten(j0, j1, j2);
}

}  // namespace

SpectralField transform(const RealField& f) {
    const TorusGrid& g = f.grid();
    SpectralField c(g, f.components());
    const double scale = 1.0 / static_cast<double>(g.points());
    Eigen::ArrayXcd buf(g.points());
    for (int comp = 0; comp < f.components(); ++comp) {
        buf.real() = f.comp(comp);
        buf.imag().setZero();
        transform_all_axes(buf, g, /*forward=*/true);
        c.comp(comp) = buf * scale;
    }
    return c;
}

RealField inverse_transform(const SpectralField& c) {
    const TorusGrid& g = c.grid();
    RealField f(g, c.components());
    // Eigen's inverse scales each axis pass by 1/n; undo so that
    // f(x) = sum_k c(k) exp(+i k.x).
    const double scale = static_cast<double>(g.points());
    Eigen::ArrayXcd buf(g.points());
    for (int comp = 0; comp < c.components(); ++comp) {
        buf = c.comp(comp);
        transform_all_axes(buf, g, /*forward=*/false);
        f.comp(comp) = buf.real() * scale;
    }
    return f;
}

double hermitian_defect(const SpectralField& c) {
    const TorusGrid& g = c.grid();
    double worst = 0.0;
    for (int comp = 0; comp < c.components(); ++comp) {
        for (std::int64_t idx = 0; idx < g.points(); ++idx) {
            const Complex d = c(idx, comp) - std::conj(c(conjugate_index(g, idx), comp));
            worst = std::max(worst, std::abs(d));
        }
    }
    return worst;
}

void make_hermitian(SpectralField& c) {
    const TorusGrid& g = c.grid();
    for (int comp = 0; comp < c.components(); ++comp) {
        for (std::int64_t idx = 0; idx < g.points(); ++idx) {
            const std::int64_t jdx = conjugate_index(g, idx);
            if (jdx < idx) continue;
            if (jdx == idx) {
                c(idx, comp) = Complex(c(idx, comp).real(), 0.0);
            } else {
                const Complex avg = 0.5 * (c(idx, comp) + std::conj(c(jdx, comp)));
                c(idx, comp) = avg;
                c(jdx, comp) = std::conj(avg);
            }
        }
    }
}

}  // namespace lpflow
