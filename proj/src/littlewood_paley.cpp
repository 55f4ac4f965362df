#include "lpflow/littlewood_paley.hpp"

#include <cmath>

namespace lpflow {

namespace {

double bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

/// C-infinity step: 0 for t <= 0, 1 for t >= 1, strictly increasing between.
double smooth_step(double t) {
    const double a = bump(t);
    const double b = bump(1.0 - t);
    return a / (a + b);
}

}  // namespace

PartitionOfUnity::PartitionOfUnity(double alpha) : alpha_(alpha) {
    // alpha <= sqrt(2) keeps non-adjacent shells disjoint (2*alpha <= 4/alpha)
    // and makes phi cancellation-free: on the ramp of chi(r), chi(r/2) is
    // still identically one.
    if (!(alpha > 1.0) || !(alpha * alpha <= 2.0))
        throw ParameterError("PartitionOfUnity: alpha must lie in (1, sqrt(2)]");
}

double PartitionOfUnity::chi(double r) const {
    const double lo = inner();
    const double hi = outer();
    if (r <= lo) return 1.0;
    if (r >= hi) return 0.0;
    return 1.0 - smooth_step((r - lo) / (hi - lo));
}

double PartitionOfUnity::phi(double r) const { return chi(0.5 * r) - chi(r); }

DyadicDecomposition::DyadicDecomposition(const TorusGrid& grid, PartitionOfUnity pou)
    : grid_(grid), pou_(pou) {
    const Eigen::Index m = grid_.points();
    kmag_.resize(m);
    for (Eigen::Index idx = 0; idx < m; ++idx) {
        const std::array<int, 3> iv = grid_.unflatten(idx);
        double k2 = 0.0;
        for (int a = 0; a < grid_.dim(); ++a) {
            const double k = grid_.wavenumber(a, iv[a]);
            k2 += k * k;
        }
        kmag_[idx] = std::sqrt(k2);
    }
    // Smallest L with chi(2^{-(L+1)} |k|) == 1 on the whole lattice, i.e.
    // 2^{-(L+1)} kmax <= inner radius.
    const double kmax = kmag_.maxCoeff();
    int L = -1;
    while (std::ldexp(pou_.inner(), L + 1) < kmax) ++L;
    lmax_ = L;
    shell_cache_.resize(static_cast<std::size_t>(lmax_ + 2));
    lowpass_cache_.resize(static_cast<std::size_t>(lmax_ + 3));
}

const Eigen::ArrayXd& DyadicDecomposition::shell_weights(int l) const {
    auto& slot = shell_cache_[static_cast<std::size_t>(l + 1)];
    if (!slot) {
        Eigen::ArrayXd w(kmag_.size());
        if (l == -1) {
            for (Eigen::Index i = 0; i < kmag_.size(); ++i) w[i] = pou_.chi(kmag_[i]);
        } else {
            const double scale = std::ldexp(1.0, -l);
            for (Eigen::Index i = 0; i < kmag_.size(); ++i) w[i] = pou_.phi(scale * kmag_[i]);
        }
        slot = std::move(w);
    }
    return *slot;
}

const Eigen::ArrayXd& DyadicDecomposition::low_pass_weights(int l) const {
    auto& slot = lowpass_cache_[static_cast<std::size_t>(l)];
    if (!slot) {
        Eigen::ArrayXd w(kmag_.size());
        const double scale = std::ldexp(1.0, -l);
        for (Eigen::Index i = 0; i < kmag_.size(); ++i) w[i] = pou_.chi(scale * kmag_[i]);
        slot = std::move(w);
    }
    return *slot;
}

SpectralField DyadicDecomposition::block(const SpectralField& u, int l) const {
    require_same_grid(grid_, u.grid());
    SpectralField out(u.grid(), u.components());
    if (l < -1 || l > lmax_) {
        out.data().setZero();
        return out;
    }
    const Eigen::ArrayXd& w = shell_weights(l);
    for (int c = 0; c < u.components(); ++c) out.comp(c) = u.comp(c) * w;
    return out;
}

SpectralField DyadicDecomposition::low_pass(const SpectralField& u, int l) const {
    require_same_grid(grid_, u.grid());
    SpectralField out(u.grid(), u.components());
    if (l <= -1) {
        out.data().setZero();
        return out;
    }
    if (l > lmax_ + 2) l = lmax_ + 2;  // saturated: identically one weights
    const Eigen::ArrayXd& w = low_pass_weights(l);
    for (int c = 0; c < u.components(); ++c) out.comp(c) = u.comp(c) * w;
    return out;
}

Eigen::ArrayXd DyadicDecomposition::block_norms(const SpectralField& u, double p) const {
    require_same_grid(grid_, u.grid());
    Eigen::ArrayXd norms(block_count());
    for (int l = -1; l <= lmax_; ++l)
        norms[l + 1] = lp_norm(inverse_transform(block(u, l)), p);
    return norms;
}

double DyadicDecomposition::weighted_lr(const Eigen::ArrayXd& block_lp, double s, double r,
                                        int first_l) {
    if (std::isinf(r)) {
        double best = 0.0;
        for (Eigen::Index i = 0; i < block_lp.size(); ++i)
            best = std::max(best, std::pow(2.0, s * (first_l + static_cast<int>(i))) * block_lp[i]);
        return best;
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < block_lp.size(); ++i)
        acc += std::pow(std::pow(2.0, s * (first_l + static_cast<int>(i))) * block_lp[i], r);
    return std::pow(acc, 1.0 / r);
}

double DyadicDecomposition::besov_norm(const SpectralField& u, const BesovParams& bp) const {
    bp.validate();
    return weighted_lr(block_norms(u, bp.p), bp.s, bp.r);
}

double DyadicDecomposition::b_gamma_norm(const SpectralField& u,
                                         const std::function<double(double)>& gamma) const {
    require_same_grid(grid_, u.grid());
    double sup_term = 0.0;
    for (int j = 0; j <= lmax_ + 1; ++j) {
        const double g = gamma(std::ldexp(1.0, j));
        if (!(g > 0.0)) throw ParameterError("b_gamma_norm: gamma must be positive");
        const double grad_inf = lp_norm(inverse_transform(gradient(low_pass(u, j))), infinity);
        sup_term = std::max(sup_term, grad_inf / g);
    }
    return lp_norm(inverse_transform(u), infinity) + sup_term;
}

double DyadicDecomposition::v_prime(const SpectralField& v, double p1, double alpha) const {
    require_same_grid(grid_, v.grid());
    if (!(p1 >= 1.0)) throw ParameterError("v_prime: p1 must be >= 1");
    if (!(alpha >= 0.0) || !(alpha <= 1.0))
        throw ParameterError("v_prime: alpha must lie in [0, 1]");
    const double dim_over_p1 = std::isinf(p1) ? 0.0 : static_cast<double>(grid_.dim()) / p1;
    double best = 0.0;
    for (int j = 0; j <= lmax_ + 1; ++j) {
        const double grad_p1 = lp_norm(inverse_transform(gradient(low_pass(v, j))), p1);
        const double weight = std::pow(2.0, j * dim_over_p1) / std::pow(j + 1.0, alpha);
        best = std::max(best, weight * grad_p1);
    }
    return best;
}

}  // namespace lpflow
