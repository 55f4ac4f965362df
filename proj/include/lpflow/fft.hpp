#pragma once

#include "lpflow/field.hpp"

namespace lpflow {

/// Forward transform to amplitude-normalized coefficients:
/// c(k) = (1/M) sum_x f(x) exp(-i k.x).
SpectralField transform(const RealField& f);

/// Inverse transform, f(x) = sum_k c(k) exp(+i k.x), returning the real part.
/// The imaginary residue of a Hermitian-symmetric input is round-off.
RealField inverse_transform(const SpectralField& c);

/// Max over modes and components of |c(k) - conj(c(-k))|; zero (to round-off)
/// exactly when the coefficients describe a real field. Nyquist rows pair
/// with themselves.
double hermitian_defect(const SpectralField& c);

/// Project onto the coefficient symmetry of a real field:
/// c(k) <- (c(k) + conj(c(-k)))/2. Used to make randomly drawn spectra real.
void make_hermitian(SpectralField& c);

}  // namespace lpflow
