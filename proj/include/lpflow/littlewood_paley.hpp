#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "lpflow/operators.hpp"

namespace lpflow {

/// Smooth radial partition of unity in frequency:
///   chi(xi) + sum_{l>=0} phi(2^{-l} xi) = 1  for every xi,
/// with chi a low-pass profile (1 on |xi| <= 1/alpha, 0 beyond alpha) and
/// phi(xi) = chi(xi/2) - chi(xi) a shell profile supported on
/// [1/alpha, 2*alpha]. The default alpha = 4/3 gives supp chi <= 4/3 and
/// shell support [3/4, 8/3], so only adjacent shells overlap.
///
/// The profiles interpolate between their radii with the C-infinity bump
/// step built from exp(-1/t), so all derivatives vanish at the junctions.
class PartitionOfUnity {
public:
    explicit PartitionOfUnity(double alpha = 4.0 / 3.0);

    double alpha() const { return alpha_; }
    double inner() const { return 1.0 / alpha_; }   // chi == 1 on [0, inner]
    double outer() const { return alpha_; }         // chi == 0 on [outer, inf)

    /// Low-pass profile.
    double chi(double r) const;
    /// Shell profile, phi(r) = chi(r/2) - chi(r).
    double phi(double r) const;

private:
    double alpha_;
};

/// Besov index triple (s, p, r); p and r may be infinity.
struct BesovParams {
    double s = 0.0;
    double p = 2.0;
    double r = 2.0;
    void validate() const {
        if (!(p >= 1.0) || !(r >= 1.0))
            throw ParameterError("BesovParams: p and r must be >= 1");
    }
};

/// Dyadic block machinery on a fixed grid: block filters Delta_l
/// (l = -1 .. l_max), partial-sum filters S_l, Besov norms, and the
/// regularity functionals built from low-pass gradients.
///
/// l_max is the smallest index whose cumulative low-pass covers the grid:
/// chi(2^{-(l_max+1)} |k|) = 1 for every lattice wavenumber, so the finite
/// block sum reconstructs u exactly.
class DyadicDecomposition {
public:
    explicit DyadicDecomposition(const TorusGrid& grid, PartitionOfUnity pou = PartitionOfUnity());

    const TorusGrid& grid() const { return grid_; }
    const PartitionOfUnity& pou() const { return pou_; }
    int lmin() const { return -1; }
    int lmax() const { return lmax_; }
    /// Number of (potentially) nonzero blocks, l = -1 .. l_max.
    int block_count() const { return lmax_ + 2; }

    /// Dyadic block Delta_l u. Zero field for l < -1 or l > l_max.
    SpectralField block(const SpectralField& u, int l) const;

    /// Low-pass partial sum S_l u = sum_{k <= l-1} Delta_k u. Zero field for
    /// l <= -1; the full field once l > l_max + 1.
    SpectralField low_pass(const SpectralField& u, int l) const;

    /// ||Delta_l u||_{L^p} for l = -1 .. l_max (index shifted by one).
    /// Multi-component fields use the pointwise Euclidean magnitude.
    Eigen::ArrayXd block_norms(const SpectralField& u, double p) const;

    /// Besov norm from block norms: ell^r over l of 2^{l s} ||Delta_l u||_p.
    double besov_norm(const SpectralField& u, const BesovParams& bp) const;
    double besov_norm(const SpectralField& u, double s, double p, double r) const {
        return besov_norm(u, BesovParams{s, p, r});
    }

    /// ell^r sum of 2^{l s} w_l over the given block-norm vector
    /// (index l = offset-1 + i); shared by the time accumulators.
    static double weighted_lr(const Eigen::ArrayXd& block_lp, double s, double r,
                              int first_l = -1);

    /// sup_{j in [0, l_max+1]} ||grad S_j u||_inf / Gamma(2^j) + ||u||_inf
    /// for scalar u. Gamma must be positive at every dyadic argument.
    double b_gamma_norm(const SpectralField& u,
                        const std::function<double(double)>& gamma) const;

    /// sup_{j in [0, l_max+1]} 2^{j N/p1} ||grad S_j v||_{L^{p1}} / (j+1)^alpha
    /// for a dim-component v; alpha in [0,1]. The sup is truncated at the
    /// grid's top block (S_j saturates there; beyond it the continuum
    /// quantity is not grid-representable).
    double v_prime(const SpectralField& v, double p1, double alpha) const;

private:
    const Eigen::ArrayXd& shell_weights(int l) const;     // phi(2^-l |k|) or chi(|k|)
    const Eigen::ArrayXd& low_pass_weights(int l) const;  // chi(2^-l |k|), l >= 0

    TorusGrid grid_;
    PartitionOfUnity pou_;
    int lmax_;
    Eigen::ArrayXd kmag_;
    mutable std::vector<std::optional<Eigen::ArrayXd>> shell_cache_;
    mutable std::vector<std::optional<Eigen::ArrayXd>> lowpass_cache_;
};

}  // namespace lpflow
