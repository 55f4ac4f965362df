#pragma once

#include <limits>

#include "lpflow/fft.hpp"

namespace lpflow {

/// Convenience spelling for the p = infinity / r = infinity exponents.
inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Spectral derivative d/dx_axis of every component. The unpaired Nyquist
/// mode is zeroed so that derivatives of real fields stay real and the
/// divergence/gradient/Laplacian operators compose exactly.
SpectralField derivative(const SpectralField& f, int axis);

/// Gradient. Input components c, output components c*dim laid out as
/// out[comp*dim + axis] = d_axis f_comp.
SpectralField gradient(const SpectralField& f);

/// Divergence of a dim-component vector field.
SpectralField divergence(const SpectralField& u);

/// Laplacian, as the composition div(grad .): symbol -sum_a k_a^2 with
/// Nyquist-zeroed k_a.
SpectralField laplacian(const SpectralField& f);

/// Inverse of `laplacian` on its range: divides by the symbol, zeroing the
/// mean mode and any other mode in the symbol's kernel. Result is mean-free.
SpectralField inverse_laplacian(const SpectralField& f);

/// Leray projector P onto divergence-free fields: u - k (k.u)/|k|^2 per mode
/// (with the Nyquist-zeroed k). Modes with vanishing effective k (including
/// k = 0) are left untouched.
SpectralField leray_project(const SpectralField& u);

/// Q = Id - P: the curl-free, mean-free complement. Q u = grad(inverse
/// Laplacian(div u)); zero on modes with vanishing effective k.
SpectralField leray_complement(const SpectralField& u);

/// Max over modes of |k . u(k)| / max|u|: a scale-free divergence residual.
double divergence_residual(const SpectralField& u);

/// Strain tensor (symmetrized velocity gradient) of a dim-component field:
/// out[i*dim + j] = (d_i u_j + d_j u_i)/2.
SpectralField strain(const SpectralField& u);

/// L^p norm by uniform quadrature of the pointwise Euclidean magnitude:
/// (volume * mean |f|^p)^(1/p); p = infinity gives the grid max.
double lp_norm(const RealField& f, double p);

/// Convenience overload transforming back to physical space first.
double lp_norm(const SpectralField& f, double p);

/// L^2 norm via Parseval: sqrt(volume * sum_k |c(k)|^2).
double l2_norm(const SpectralField& f);

double mean(const RealField& f, int comp = 0);
Complex mean_mode(const SpectralField& f, int comp = 0);

/// Zero every mode with |n_a| > fraction * size_a/2 on any axis
/// (fraction 2/3 keeps |n| <= size/3: the classic two-thirds rule).
SpectralField dealias(const SpectralField& f, double fraction = 2.0 / 3.0);

/// Pointwise physical-space product. Component rules: (1,c)->c scales every
/// component, (c,1) likewise, (c,c)->c multiplies componentwise.
SpectralField pointwise_product(const SpectralField& a, const SpectralField& b);

/// Pointwise dot product of two fields with equal component count -> scalar.
SpectralField dot_product(const SpectralField& a, const SpectralField& b);

/// Smooth low-pass multiplier evaluated at |k|: c(k) *= profile(|k|).
SpectralField radial_multiplier(const SpectralField& f, const std::function<double(double)>& profile);

}  // namespace lpflow
