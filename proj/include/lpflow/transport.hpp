#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lpflow/chemin_lerner.hpp"
#include "lpflow/inequality.hpp"
#include "lpflow/littlewood_paley.hpp"

namespace lpflow {

/// Time-dependent divergence-free velocity, sampled on demand.
using VelocityFn = std::function<SpectralField(double t)>;

/// Source term of the transport equation; may depend on the current state.
using SourceFn = std::function<SpectralField(double t, const SpectralField& a)>;

struct TransportConfig {
    double dt = 0.0;       ///< requested step size (> 0); shrunk to divide t_final evenly
    double t_final = 0.0;  ///< integration horizon (> 0)
    double cfl_limit = 0.5;
    double dealias_fraction = 2.0 / 3.0;
    int record_every = 1;      ///< snapshot cadence in steps (final step always recorded)
    double divergence_tol = 1e-8;  ///< max allowed divergence residual of the velocity
    double p = 2.0;            ///< Lebesgue exponent for the recorded block norms
    /// Exponents p1 for which per-snapshot low-pass gradient norms of the
    /// velocity are stored (enables v_prime diagnostics after the run).
    /// Leave empty to skip the extra transforms.
    std::vector<double> p1_list = {infinity};

    void validate() const;
};

/// Time-sampled record of an advected scalar together with velocity
/// regularity diagnostics. Per sample it keeps the scalar's dyadic block
/// L^p norms (via CheminLernerAccumulator), its sup norm, grid mean, L^2
/// norm, pointwise min/max, and for each configured exponent p1 the norms
/// |grad S_j v|_{L^{p1}} for j = 0..lmax+1. Fields themselves are not
/// retained except the initial and latest states.
class TransportTrajectory {
public:
    TransportTrajectory(const DyadicDecomposition& dec, double p, std::vector<double> p1_list,
                        bool with_source);

    /// Append a sample: t nondecreasing, a the scalar, v the velocity at t,
    /// g the source at t (ignored unless constructed with_source).
    void record(double t, const SpectralField& a, const SpectralField& v,
                const SpectralField* g = nullptr);

    const DyadicDecomposition& decomposition() const { return *dec_; }
    const CheminLernerAccumulator& scalar() const { return scalar_; }
    const CheminLernerAccumulator& source() const;
    bool has_source() const { return source_.has_value(); }

    int samples() const { return scalar_.samples(); }
    double time(int i) const { return scalar_.time(i); }
    double final_time() const { return scalar_.last_time(); }

    double mass(int i) const { return at(mass_, i); }
    double l2(int i) const { return at(l2_, i); }
    double min_value(int i) const { return at(min_, i); }
    double max_value(int i) const { return at(max_, i); }

    const SpectralField& initial_state() const;
    const SpectralField& final_state() const;

    /// sup_{0<=j<=lmax+1} 2^{jN/p1} (j+1)^{-alpha} |grad S_j v(t_i)|_{L^{p1}};
    /// p1 must be one of the exponents configured at construction.
    double v_prime_at(int i, double p1, double alpha) const;
    std::vector<double> v_prime_series(double p1, double alpha) const;
    /// Cumulative trapezoid of the v_prime series; entry i approximates
    /// the integral over [t_0, t_i].
    std::vector<double> v_integral_series(double p1, double alpha) const;
    /// Integral of v_prime over the whole recorded window.
    double v_integral(double p1, double alpha) const;

    std::vector<double> times() const;

private:
    static double at(const std::vector<double>& v, int i) {
        return v.at(static_cast<std::size_t>(i));
    }
    int p1_slot(double p1) const;

    const DyadicDecomposition* dec_;
    std::vector<double> p1_list_;
    CheminLernerAccumulator scalar_;
    std::optional<CheminLernerAccumulator> source_;
    std::vector<double> mass_, l2_, min_, max_;
    std::vector<Eigen::ArrayXd> grad_lowpass_;  // per sample, p1_list.size() x (lmax+2)
    std::optional<SpectralField> initial_;
    std::optional<SpectralField> latest_;
};

/// Integrate d/dt a + v . grad a = g with a classical third-order
/// Runge-Kutta scheme; spatial terms are pseudo-spectral with
/// the advection product dealiased by zeroing modes above
/// dealias_fraction of the axis Nyquist (inputs and product alike, so the
/// retained band is alias-free).
///
/// Throws StabilityError when max_axis |v_axis|_inf dt / h_axis exceeds
/// cfg.cfl_limit and ParameterError when the velocity fails the
/// divergence-free check. g may be an empty std::function for no source.
TransportTrajectory advect(const DyadicDecomposition& dec, const SpectralField& a0,
                           const VelocityFn& v, const SourceFn& g, const TransportConfig& cfg);

/// One classical third-order Runge-Kutta step of d/dt a + v . grad a = 0
/// with the velocity frozen across the step, in the same increment form and
/// with the same dealiasing composition as advect. The caller is
/// responsible for step-size control and for the divergence-free check.
SpectralField transport_step(const SpectralField& a, const SpectralField& v, double dt,
                             double dealias_fraction = 2.0 / 3.0);

/// Drifting regularity index sigma_t = sigma - lambda * int_0^t
/// (V'_{p1,1}(t') + W(t')) dt', floored at s1.
struct LossSchedule {
    double sigma = 0.0;   ///< index at t = 0
    double lambda = 0.0;  ///< drift slope multiplier (> 0)
    double s1 = 0.0;      ///< floor index; falling below raises ScheduleError
    double p1 = infinity;
    std::vector<double> w;  ///< samples of W at the trajectory record times; empty = 0

    void validate() const;
};

/// sigma_{t_i} for every recorded sample (does not enforce the floor).
std::vector<double> loss_schedule_series(const TransportTrajectory& traj,
                                         const LossSchedule& sched);

/// Loss-of-regularity bound with an arbitrarily small loss eps:
///   lhs = |a|_{L~inf_T(B^{sigma-eps}_{p,inf})},
///   rhs = (|a_0|_{B^sigma_{p,inf}} + |g|_{L~1_T(B^sigma_{p,inf})})
///         * exp(eps^{-alpha/(1-alpha)} V_{p1,alpha}(T)^{1/(1-alpha)}),
/// with the empirical constant set to 1 so that the reported ratio measures
/// it. Requires 1 <= p <= p1, alpha in (0,1), eps > 0 and the index window
/// -1 - N min(1/p1, 1/p') < sigma < 1 + N/p1.
InequalityReport limited_loss_report(const TransportTrajectory& traj, double sigma, double eps,
                                     double p, double p1, double alpha);

/// High-frequency variant of the limited-loss bound, restricted to blocks
/// l >= m with free parameter eta > 0:
///   lhs = sum_{l>=m} 2^{(sigma-eps)l} |Delta_l a|_{L^inf_T(L^p)},
///   rhs = sum_{l>=m} 2^{sigma l} |Delta_l a_0|_{L^p}
///         + eta^{alpha/(1-alpha)} * (|a_0| + |g|) *
///           int_0^T V'(t) exp(eps^{-alpha/(1-alpha)} V(t)^{1/(1-alpha)}) dt.
InequalityReport limited_loss_tail_report(const TransportTrajectory& traj, double sigma,
                                          double eps, double p, double p1, double alpha, int m,
                                          double eta);

/// Linear-loss bound along a drifting index schedule:
///   lhs = sup_i |a(t_i)|_{B^{sigma_{t_i}}_{p,inf}},
///   rhs = lambda/(lambda - c_margin) * (|a_0|_{B^sigma_{p,inf}}
///         + int_0^T |g_1(t)|_{B^sigma_{p,inf}} dt),
/// where g1_besov holds the samples of |g_1(t_i)| (empty for no source).
/// Requires 1 <= p <= p1, -N min(1/p1, 1/p') < sigma, s1 < sigma < 1 + N/p1
/// and lambda > c_margin. Raises ScheduleError at the first sample whose
/// index falls below the floor s1.
InequalityReport linear_loss_report(const TransportTrajectory& traj, const LossSchedule& sched,
                                    const std::vector<double>& g1_besov, double c_margin = 0.0);

/// Tail variant: lhs = sup_i sum_{l>=m} 2^{l sigma_{t_i}} |Delta_l a(t_i)|_{L^p}.
InequalityReport linear_loss_tail_report(const TransportTrajectory& traj,
                                         const LossSchedule& sched,
                                         const std::vector<double>& g1_besov, int m,
                                         double c_margin = 0.0);

}  // namespace lpflow
