#include "lpflow/operators.hpp"

#include <limits>
#include <vector>

namespace lpflow {
namespace {

/// Per-axis effective wavenumbers with the Nyquist entry zeroed.
std::vector<double> effective_k(const TorusGrid& g, int axis) {
    std::vector<double> k(g.size(axis));
    for (int i = 0; i < g.size(axis); ++i)
        k[i] = g.is_nyquist(axis, i) ? 0.0 : g.wavenumber(axis, i);
    return k;
}

template <typename Fn>
void for_each_mode(const TorusGrid& g, Fn&& fn) {
    for (std::int64_t idx = 0; idx < g.points(); ++idx) fn(idx, g.unflatten(idx));
}

}  // namespace

SpectralField derivative(const SpectralField& f, int axis) {
    const TorusGrid& g = f.grid();
    if (axis < 0 || axis >= g.dim()) throw ParameterError("derivative: invalid axis");
    auto k = effective_k(g, axis);
    SpectralField out(g, f.components());
    for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& i) {
        const Complex ik(0.0, k[i[axis]]);
        for (int c = 0; c < f.components(); ++c) out(idx, c) = ik * f(idx, c);
    });
    return out;
}

SpectralField gradient(const SpectralField& f) {
    const TorusGrid& g = f.grid();
    SpectralField out(g, f.components() * g.dim());
    for (int c = 0; c < f.components(); ++c) {
        for (int a = 0; a < g.dim(); ++a) {
            SpectralField d = derivative(f, a);
            out.comp(c * g.dim() + a) = d.comp(c);
        }
    }
    return out;
}

SpectralField divergence(const SpectralField& u) {
    const TorusGrid& g = u.grid();
    if (u.components() != g.dim()) throw ShapeError("divergence: need dim components");
    SpectralField out(g, 1);
    for (int a = 0; a < g.dim(); ++a) {
        auto k = effective_k(g, a);
        for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& i) {
            out(idx, 0) += Complex(0.0, k[i[a]]) * u(idx, a);
        });
    }
    return out;
}

namespace {

/// Symbol of the composed div(grad .): -(k_0^2 + ... ) with Nyquist-zeroed k.
Eigen::ArrayXd laplace_symbol(const TorusGrid& g) {
    Eigen::ArrayXd sym = Eigen::ArrayXd::Zero(g.points());
    for (int a = 0; a < g.dim(); ++a) {
        auto k = effective_k(g, a);
        for (std::int64_t idx = 0; idx < g.points(); ++idx) {
            auto i = g.unflatten(idx);
            sym[idx] -= k[i[a]] * k[i[a]];
        }
    }
    return sym;
}

}  // namespace

SpectralField laplacian(const SpectralField& f) {
    const TorusGrid& g = f.grid();
    Eigen::ArrayXd sym = laplace_symbol(g);
    SpectralField out(g, f.components());
    for (int c = 0; c < f.components(); ++c) out.comp(c) = f.comp(c) * sym;
    return out;
}

SpectralField inverse_laplacian(const SpectralField& f) {
    const TorusGrid& g = f.grid();
    Eigen::ArrayXd sym = laplace_symbol(g);
    SpectralField out(g, f.components());
    for (int c = 0; c < f.components(); ++c)
        for (std::int64_t idx = 0; idx < g.points(); ++idx)
            out(idx, c) = sym[idx] != 0.0 ? f(idx, c) / sym[idx] : Complex(0.0);
    return out;
}

SpectralField leray_project(const SpectralField& u) {
    const TorusGrid& g = u.grid();
    if (u.components() != g.dim()) throw ShapeError("leray_project: need dim components");
    std::array<std::vector<double>, 3> k;
    for (int a = 0; a < g.dim(); ++a) k[a] = effective_k(g, a);
    SpectralField out = u;
    for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& i) {
        double k2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) k2 += k[a][i[a]] * k[a][i[a]];
        if (k2 == 0.0) return;
        Complex kdotu(0.0, 0.0);
        for (int a = 0; a < g.dim(); ++a) kdotu += k[a][i[a]] * u(idx, a);
        for (int a = 0; a < g.dim(); ++a) out(idx, a) -= k[a][i[a]] * kdotu / k2;
    });
    return out;
}

SpectralField leray_complement(const SpectralField& u) {
    SpectralField q = u;
    SpectralField p = leray_project(u);
    q -= p;
    return q;
}

double divergence_residual(const SpectralField& u) {
    SpectralField d = divergence(u);
    double dmax = d.data().abs().maxCoeff();
    double umax = u.data().abs().maxCoeff();
    return umax > 0.0 ? dmax / umax : dmax;
}

SpectralField strain(const SpectralField& u) {
    const TorusGrid& g = u.grid();
    if (u.components() != g.dim()) throw ShapeError("strain: need dim components");
    const int dim = g.dim();
    SpectralField grad = gradient(u);  // grad[c*dim + a] = d_a u_c
    SpectralField out(g, dim * dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            out.comp(i * dim + j) = 0.5 * (grad.comp(j * dim + i) + grad.comp(i * dim + j));
    return out;
}

double lp_norm(const RealField& f, double p) {
    if (!(p >= 1.0)) throw ParameterError("lp_norm: p must be >= 1");
    Eigen::ArrayXd mag = f.magnitude();
    if (std::isinf(p)) return mag.maxCoeff();
    const double vol = f.grid().volume();
    if (p == 1.0) return vol * mag.mean();
    if (p == 2.0) return std::sqrt(vol * mag.square().mean());
    return std::pow(vol * mag.pow(p).mean(), 1.0 / p);
}

double lp_norm(const SpectralField& f, double p) { return lp_norm(inverse_transform(f), p); }

double l2_norm(const SpectralField& f) {
    return std::sqrt(f.grid().volume() * f.data().abs2().sum());
}

double mean(const RealField& f, int comp) { return f.comp(comp).mean(); }

Complex mean_mode(const SpectralField& f, int comp) { return f(0, comp); }

SpectralField dealias(const SpectralField& f, double fraction) {
    const TorusGrid& g = f.grid();
    SpectralField out = f;
    for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& i) {
        for (int a = 0; a < g.dim(); ++a) {
            if (std::abs(g.freq_index(a, i[a])) > fraction * (g.size(a) / 2)) {
                for (int c = 0; c < f.components(); ++c) out(idx, c) = Complex(0.0);
                return;
            }
        }
    });
    return out;
}

SpectralField pointwise_product(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a.grid(), b.grid());
    RealField fa = inverse_transform(a);
    RealField fb = inverse_transform(b);
    int ca = a.components(), cb = b.components();
    if (ca != cb && ca != 1 && cb != 1)
        throw ShapeError("pointwise_product: incompatible component counts");
    int cout = std::max(ca, cb);
    RealField prod(a.grid(), cout);
    for (int c = 0; c < cout; ++c)
        prod.comp(c) = fa.comp(ca == 1 ? 0 : c) * fb.comp(cb == 1 ? 0 : c);
    return transform(prod);
}

SpectralField dot_product(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a.grid(), b.grid());
    if (a.components() != b.components()) throw ShapeError("dot_product: component mismatch");
    RealField fa = inverse_transform(a);
    RealField fb = inverse_transform(b);
    RealField prod(a.grid(), 1);
    for (int c = 0; c < a.components(); ++c) prod.comp(0) += fa.comp(c) * fb.comp(c);
    return transform(prod);
}

SpectralField radial_multiplier(const SpectralField& f,
                                const std::function<double(double)>& profile) {
    const TorusGrid& g = f.grid();
    SpectralField out(g, f.components());
    for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& i) {
        double k2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            double k = g.wavenumber(a, i[a]);
            k2 += k * k;
        }
        const double w = profile(std::sqrt(k2));
        for (int c = 0; c < f.components(); ++c) out(idx, c) = w * f(idx, c);
    });
    return out;
}

}  // namespace lpflow
