#pragma once

#include <random>

#include "lpflow/operators.hpp"

namespace lpflow::testutil {

/// Deterministic physical-space random field with i.i.d. uniform [-1,1]
/// node values.
inline RealField random_real(const TorusGrid& g, int components, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    RealField f(g, components);
    for (int c = 0; c < components; ++c)
        for (std::int64_t i = 0; i < g.points(); ++i) f(i, c) = dist(rng);
    return f;
}

/// Deterministic smooth random field: low-pass filtered white noise with a
/// Gaussian spectral envelope exp(-(|k|/k0)^2), unit sup norm.
inline RealField random_smooth(const TorusGrid& g, int components, std::uint64_t seed,
                               double k0 = 4.0) {
    SpectralField c = transform(random_real(g, components, seed));
    SpectralField filtered = radial_multiplier(c, [k0](double k) {
        return std::exp(-(k / k0) * (k / k0));
    });
    RealField f = inverse_transform(filtered);
    double amp = f.data().abs().maxCoeff();
    if (amp > 0) f.data() /= amp;
    return f;
}

inline double max_abs_diff(const RealField& a, const RealField& b) {
    return (a.data() - b.data()).abs().maxCoeff();
}

inline double max_abs_diff(const SpectralField& a, const SpectralField& b) {
    return (a.data() - b.data()).abs().maxCoeff();
}

inline double max_abs(const SpectralField& a) { return a.data().abs().maxCoeff(); }
inline double max_abs(const RealField& a) { return a.data().abs().maxCoeff(); }

}  // namespace lpflow::testutil
