#pragma once

#include <utility>
#include <vector>

#include "lpflow/inequality.hpp"
#include "lpflow/littlewood_paley.hpp"

namespace lpflow {

/// Variable coefficient b = 1 + a of the divergence-form operator
/// div(b grad .), together with its ellipticity bound and high-frequency
/// tail monitors.
class CoefficientField {
public:
    /// a must be a real scalar field (given spectrally); 1 + a must be
    /// bounded below by a positive constant on the grid.
    CoefficientField(const DyadicDecomposition& dec, const SpectralField& a, double p1 = 2.0);

    const DyadicDecomposition& decomposition() const { return *dec_; }
    const SpectralField& a() const { return a_; }
    double p1() const { return p1_; }
    /// Ellipticity lower bound inf(1 + a).
    double b_lower() const { return b_lower_; }

    /// Weighted tail sum over blocks l >= m of 2^{l N/p1} ||Delta_l a||_{p1}
    /// (an upper bound for the B^{N/p1}_{p1,inf} norm of a - S_m a, and the
    /// quantity the cutoff recipe thresholds). Monotone nonincreasing in m.
    double tail_sum(int m) const;
    /// Smallest m >= 0 with tail_sum(m) <= c (c defaults to 0.05).
    int cutoff_index(double c = 0.05) const;

    /// ||a - S_m a||_{B^{N/p1}_{p1,inf}} of the exact tail field.
    double tail_besov_sup(int m) const;
    /// sup norm of a - S_m a.
    double tail_sup(int m) const;
    /// The tail field a - S_m a itself.
    SpectralField tail_field(int m) const;

private:
    const DyadicDecomposition* dec_;
    SpectralField a_;
    double p1_;
    double b_lower_;
    Eigen::ArrayXd block_p1_;  // ||Delta_l a||_{p1}, cached at construction
};

/// div((1 + a) grad pi) for a scalar pi, by spectral composition.
SpectralField div_b_grad(const CoefficientField& coef, const SpectralField& pi);

struct EllipticLogRow {
    int iter = 0;
    double residual = 0.0;
    double contraction = 0.0;  // residual ratio vs previous iterate (0 at iter 0)
};

struct PressureSolution {
    SpectralField grad_pi;  // dim components, mean-free, curl-free
    int iterations = 0;
    double residual = 0.0;  // final relative residual, directly recomputed
    std::vector<EllipticLogRow> log;
};

/// Solve div((1+a) grad Pi) = div F by the constant-coefficient
/// preconditioned fixed point
///     grad Pi[k+1] = Q(F - a grad Pi[k]),     grad Pi[0] = QF,
/// stopping when || div((1+a) grad Pi) - div F ||_2 <= tol ||div F||_2.
/// Throws ConvergenceError when the residual grows five consecutive times
/// (carrying the measured growth factor) or when max_iter is exhausted.
PressureSolution solve_pressure(const CoefficientField& coef, const SpectralField& F,
                                double tol = 1e-10, int max_iter = 500);

/// Solve the two-source problem div(b grad Pi1) = div f and
/// div(b grad Pi2) = div H; by linearity the sum solves the combined
/// equation within the tolerances.
std::pair<PressureSolution, PressureSolution> split_sources(const CoefficientField& coef,
                                                            const SpectralField& f,
                                                            const SpectralField& H,
                                                            double tol = 1e-10,
                                                            int max_iter = 500);

/// Elliptic regularity check
///   b_lower ||grad Pi||_{B^sigma_{p,r}} <= C A^{|sigma|/min(1,alpha)} ||QF||_{B^sigma_{p,r}},
/// with A = 1 + b_lower^{-1} ||grad a||_{B^{N/p1 + alpha - 1}_{p1,r}}.
/// The ratio is only meaningful away from sigma = 0 (the exponent machinery
/// degenerates there); callers gate on |sigma| before asserting.
InequalityReport elliptic_estimate_check(const CoefficientField& coef, const SpectralField& F,
                                         const SpectralField& grad_pi, double sigma, double p,
                                         double r, double alpha);

}  // namespace lpflow
