#pragma once

#include <vector>

#include "lpflow/littlewood_paley.hpp"

namespace lpflow {

/// Trapezoid rule over a nondecreasing abscissa vector.
double trapezoid(const std::vector<double>& t, const std::vector<double>& y);

/// L^rho norm in time of a sampled scalar series: max |y| for rho = inf,
/// otherwise (trapezoid of |y|^rho)^(1/rho).
double time_lr_norm(const std::vector<double>& t, const std::vector<double>& y, double rho);

/// Records the dyadic block norms of a time-dependent field and evaluates
/// the two orderings of mixed time/frequency norms:
///
///   chemin_lerner(rho,s,r): ell^r over blocks of the time-L^rho of
///       2^{ls} ||Delta_l u(t)||_{L^p}   (time norm inside),
///   lebesgue_besov(rho,s,r): time-L^rho of the Besov norm ||u(t)||
///       (time norm outside).
///
/// Minkowski's inequality orders the two: the first dominates when r <= rho
/// and is dominated when r >= rho; they agree for r = rho.
///
/// Each record stores per-block L^p norms plus the sup norm, so norms with
/// any (rho, s, r) can be evaluated after the fact without the trajectory.
class CheminLernerAccumulator {
public:
    CheminLernerAccumulator(const DyadicDecomposition& dec, double p);

    /// Append a sample at time t (nondecreasing). Computes and stores the
    /// block L^p norms and the sup norm of u; the field is not retained.
    void record(double t, const SpectralField& u);

    int samples() const { return static_cast<int>(times_.size()); }
    double p() const { return p_; }
    const DyadicDecomposition& decomposition() const { return *dec_; }
    double time(int i) const { return times_.at(static_cast<std::size_t>(i)); }
    double first_time() const;
    double last_time() const;

    /// Besov norm of the i-th sample.
    double besov_at(int i, double s, double r) const;
    /// Same but keeping only blocks l >= m.
    double besov_tail_at(int i, double s, double r, int m) const;
    /// Sup norm of the i-th sample.
    double sup_at(int i) const;

    double chemin_lerner(double rho, double s, double r) const;
    /// Same but keeping only blocks l >= m.
    double chemin_lerner_tail(double rho, double s, double r, int m) const;
    double lebesgue_besov(double rho, double s, double r) const;

    /// max over samples of the sup norm.
    double sup_linf() const;
    /// L^rho in time of the sup norm.
    double linf_time_norm(double rho) const;

private:
    void require_samples() const;

    const DyadicDecomposition* dec_;
    double p_;
    std::vector<double> times_;
    std::vector<Eigen::ArrayXd> blocks_;
    std::vector<double> sups_;
};

/// Logarithmic interpolation bound between ell^1 and ell^inf block sums:
///   lhs = |u|_{L~rho(B^s_{p,1})},
///   rhs = (1+eps)/eps * X * (1 + log(Y/X)),
/// with X = |u|_{L~rho(B^s_{p,inf})} and Y = |u|_{L~rho(B^{s+eps}_{p,inf})}.
/// degenerate marks X = 0 (both sides vanish).
struct LogInterpolationCheck {
    double lhs = 0.0;
    double x = 0.0;
    double y = 0.0;
    double rhs = 0.0;
    bool degenerate = false;
    double ratio() const { return rhs > 0.0 ? lhs / rhs : 0.0; }
};

LogInterpolationCheck log_interpolation_check(const CheminLernerAccumulator& acc, double rho,
                                              double s, double eps);

}  // namespace lpflow
