#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lpflow/chemin_lerner.hpp"
#include "lpflow/elliptic.hpp"
#include "lpflow/transport.hpp"

namespace lpflow {

/// Time-dependent body force; an empty function means f = 0.
using ForceFn = std::function<SpectralField(double t)>;

/// Configuration of the variable-density incompressible solver for
///
///   d_t a + u . grad a = 0,
///   d_t u + u . grad u + (1 + a) grad Pi = mu (1 + a) Lap u + f,
///   div u = 0,
///
/// with a = 1/rho - 1 the reciprocal-density deviation. The momentum update
/// splits u = u_L + u~ into the constant-coefficient Stokes part (exact
/// integrating factor) and a perturbation driven by
/// H = a (mu Lap u_L - grad Pi_L) - u . grad u, stepped by an
/// integrating-factor midpoint scheme with one variable-coefficient
/// pressure solve per stage.
struct SolverConfig {
    double mu = 0.1;      ///< viscosity, > 0
    double dt = 1e-2;     ///< nominal step (rounded to divide t_final)
    double t_final = 1.0; ///< horizon T

    // Working Besov indices: density measured in B^{N/p1 + .}_{p1,inf},
    // velocity in B^{N/p2 - 1}_{p2,r}.
    double p1 = infinity;
    double p2 = 2.0;
    double r = 1.0;
    /// Density regularity surplus epsilon; the linearized-estimate exponent
    /// alpha is epsilon/2 throughout.
    double eps = 0.5;

    // Bootstrap knobs.
    double c_small = 0.01;         ///< small constant c of the cutoff recipe
    double eta = 0.1;              ///< smallness radius eta
    std::optional<int> m_override; ///< frequency cutoff m; recipe value when unset
    double pi_tilde_constant = 0.0;///< pressure constant of the eighth bound; <=0 -> u~ constant
    double big_c = 1.0;            ///< the generic large constant C

    /// n >= 0 replaces (a0, u0, f) by their low-pass parts S_n at setup.
    int smoothing_index = -1;

    double dealias_fraction = 2.0 / 3.0;
    double cfl_limit = 0.5;        ///< advective CFL bound for the transport substep
    double divergence_tol = 1e-8;  ///< guard on div u and div u0
    double elliptic_tol = 1e-10;
    int elliptic_max_iter = 500;

    enum class Splitting { lie, strang };
    /// lie: transport a over dt with u frozen, then momentum with a frozen.
    /// strang: half transport, momentum, half transport (second order).
    Splitting splitting = Splitting::lie;

    enum class BreachPolicy { warn, halt };
    /// What run() does when a recorded bootstrap hypothesis fails. The
    /// density floor 1 + a >= b_lower/2 always hard-aborts.
    BreachPolicy on_breach = BreachPolicy::warn;

    /// Hypothesis/accumulator cadence in steps; 0 disables the monitor
    /// (the energy ledger runs regardless).
    int monitor_every = 1;
    /// Record the two split pressure solves and the forcing decomposition
    /// needed by the parabolic/pressure estimate reports (extra elliptic
    /// solve per monitored step).
    bool pressure_split_diagnostics = false;
    /// Keep (t, a, u) snapshots every this many steps; 0 keeps none.
    int snapshot_every = 0;

    void validate() const;
};

/// Solver unknowns at one instant. u = u_l + u_tilde and
/// grad_pi() = grad_pi_l + grad_pi_tilde hold to round-off by construction;
/// grad_pi_l is the instantaneous Stokes pressure gradient Qf(t) and
/// grad_pi_tilde the latest variable-coefficient solve.
struct SolverState {
    SolverState(SpectralField a0, SpectralField u0);

    double t;
    SpectralField a;
    SpectralField u;
    SpectralField u_l;
    SpectralField u_tilde;
    SpectralField grad_pi_l;
    SpectralField grad_pi_tilde;

    SpectralField grad_pi() const { return grad_pi_l + grad_pi_tilde; }
};

/// One measured bound: holds() when value <= bound.
struct HypothesisStatus {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool holds() const { return value <= bound; }
    double margin() const { return bound - value; }
};

/// Result of one Stokes update.
struct StokesStep {
    SpectralField u;        ///< u_L(t + dt)
    SpectralField grad_pi;  ///< Q f(t + dt), the new instantaneous pressure gradient
};

/// Exact per-mode integrating-factor update of
///   d_t u_L - mu Lap u_L + grad Pi_L = f,  div u_L = 0,
/// over [t, t + dt]: heat decay of u_L plus a phi1-weighted Duhamel term
/// sampling P f at the interval midpoint (exact for time-constant f,
/// second order otherwise). f may be empty for f = 0.
StokesStep stokes_step(const SpectralField& u_l, const ForceFn& f, double mu, double t,
                       double dt);

/// Optional per-step probes filled by perturbation_step for the monitor:
/// everything is sampled at the interval midpoint, where the stage-two
/// elliptic solve lives.
struct MomentumDiagnostics {
    double t_mid = 0.0;
    std::optional<SpectralField> h;            ///< forcing H at the midpoint
    std::optional<SpectralField> lap_u_tilde;  ///< Lap u~ at the midpoint stage
    std::optional<SpectralField> grad_pi_h;    ///< split solve driven by H
    std::optional<SpectralField> grad_pi_var;  ///< split solve driven by mu a Lap u~
    int elliptic_iterations = 0;               ///< total over the step's solves
};

/// Advance the momentum part over [state.t, state.t + dt] with state.a
/// frozen: exact Stokes update of u_l and an integrating-factor midpoint
/// step of of the perturbation
///   d_t u~ - mu (1 + a) Lap u~ + (1 + a) grad Pi~ = H(a, u, grad Pi),
/// one pressure solve per stage, result reprojected. Split pressure solves
/// are recorded into diag when cfg.pressure_split_diagnostics is set.
/// Elliptic non-convergence propagates as ConvergenceError.
SolverState perturbation_step(const SolverState& state, const DyadicDecomposition& dec,
                              const ForceFn& f, const SolverConfig& cfg, double dt,
                              MomentumDiagnostics* diag = nullptr);

/// Running evaluation of the bootstrap inequalities along a trajectory:
/// the eight hypotheses on (a, u_L, u~, grad Pi_L, grad Pi~), the derived
/// time/eta smallness conditions, and the linearized parabolic and pressure
/// estimates at configurable indices.
///
/// Reference constants, fixed at construction from the (smoothed) data:
///   b_lower = 1 + inf a0, b_upper = 1 + sup a0, nu_lower = b_lower mu,
///   nu_upper = mu, A0 = 1 + 2 |a0|_{B^{N/p1+eps}_{p1,inf}},
///   U0 = |u0|_{B^{N/p2-1}_{p2,r}} + |f|_{L~1_T(B^{N/p2-1}_{p2,r})},
///   Utilde0 = 2 C U0 + 4 C nu_upper A0, and the frequency cutoff m
///   (smallest with weighted tail sum of a0 blocks <= c/2).
class BootstrapMonitor {
public:
    BootstrapMonitor(const DyadicDecomposition& dec, const SolverConfig& cfg,
                     const SpectralField& a0, const SpectralField& u0, const ForceFn& f);

    double b_lower() const { return b_lower_; }
    double b_upper() const { return b_upper_; }
    double nu_lower() const { return nu_lower_; }
    double nu_upper() const { return nu_upper_; }
    double a0_const() const { return a0_const_; }
    double u0_const() const { return u0_const_; }
    double u_tilde0_const() const { return u_tilde0_const_; }
    double pi_tilde0_const() const { return pi_tilde0_const_; }
    int cutoff_m() const { return m_; }

    /// Record a state sample (run() calls this at the monitor cadence).
    void record(const SolverState& st, const MomentumDiagnostics* diag = nullptr);

    int samples() const;
    double time() const;       ///< latest recorded time
    double time(int i) const;  ///< i-th recorded time

    /// Recorded Besov norms at sample i: the density a (integrability p1),
    /// the Stokes flow u_L and the perturbation u~ (integrability p2).
    double density_besov(int i, double s, double r) const;
    double stokes_besov(int i, double s, double r) const;
    double perturbation_besov(int i, double s, double r) const;

    /// Weighted time integral of the squared density norm driving the
    /// exponential in the parabolic estimate.
    double z_m() const;
    /// 1 + b_lower^{-1} |grad a|_{L~inf(B^{N/p1+alpha-1}_{p1,inf})}.
    double script_a() const;

    /// The eight bootstrap rows, evaluated over [0, time()].
    std::vector<HypothesisStatus> hypotheses() const;
    /// Derived smallness rows: stokes-bound (the heat-kernel cap on u_L),
    /// stokes-smoothing (block heat envelope), stokes-smallness (the same
    /// block sum against kappa eta nu), horizon-eta, horizon-cutoff,
    /// eta-log2, eta-smallness, smoothed-density-floor.
    std::vector<HypothesisStatus> smallness() const;
    /// Names of currently failing hypotheses.
    std::vector<std::string> breaches() const;
    /// Cutoff recipe re-run on the recorded trajectory: smallest m whose
    /// weighted block tail (sup over time) stays below c/2. Reported with
    /// an H1 breach as the suggested replacement.
    int suggested_m() const;

    /// Parabolic regularity report for the perturbation system at Besov
    /// index s (integrability p2, third index r) and time exponent m_time:
    ///   lhs = |u~|_{L~inf(B^s)} + kappa nu_lower |u~|_{L~1(B^{s+2})},
    ///   rhs = e^{C Z} (A^kappa (|P H|_{L~1(B^s)}
    ///         + mu_low^{1/m_time} (nu_lower (p2-1)/p2) A |u~|_{L~1(B^{s+2-alpha'})})),
    /// with alpha' = min(1, alpha, (s - 2 + 2/m_time)/2), kappa = s/alpha',
    /// mu_low = nu_lower (p2-1)/p2^2. Returns nullopt when no positive
    /// alpha' exists (the estimate is not applicable at these indices).
    /// Requires pressure_split_diagnostics.
    std::optional<InequalityReport> parabolic_estimate(double s, double m_time) const;

    /// Companion pressure reports {driven by H, driven by mu a Lap u~}:
    ///   b_lower |grad Pi_H|_{L~1(B^s)}   <= A^kappa |Q H|_{L~1(B^s)},
    ///   b_lower |grad Pi_var|_{L~1(B^s)} <= A^kappa mu |a|_{L~inf(B^{N/p1+alpha})}
    ///                                        |Lap u~|_{L~m(B^{s-2+2/m_time})}.
    /// Empty when not applicable. Requires pressure_split_diagnostics.
    std::vector<InequalityReport> pressure_estimate(double s, double m_time) const;

private:
    void require_recorded() const;
    double density_norm(double extra_s) const;  // L~inf Besov-cap-Linf at N/p1 + extra_s
    double stokes_block_bound(double t) const;  // closed-form heat envelope at horizon t

    const DyadicDecomposition* dec_;
    SolverConfig cfg_;
    double b_lower_, b_upper_, nu_lower_, nu_upper_;
    double a0_const_, u0_const_, u_tilde0_const_, pi_tilde0_const_;
    int m_;
    Eigen::ArrayXd u0_blocks_;      // |Delta_l u0|_{p2}
    Eigen::ArrayXd f_blocks_l1_;    // time-integrated |Delta_l f|_{p2}
    double f_sup_ = 0.0;            // sup_t |f(t)|_{B^{N/p2-1}_{p2,r}}

    CheminLernerAccumulator acc_a_, acc_grad_a_, acc_ul_, acc_ut_, acc_pl_, acc_pt_;
    // filled only under pressure_split_diagnostics
    CheminLernerAccumulator acc_ph_, acc_qh_, acc_lap_ut_, acc_pi_h_, acc_pi_var_;

    std::vector<double> times_;
    std::vector<double> tail_sup_;      // |(a - S_m a)(t)|_inf
    std::vector<double> one_plus_min_;  // inf (1 + a)
    std::vector<double> one_plus_max_;  // sup (1 + a)
    std::vector<double> smoothed_min_;  // inf (1 + S_m a)
    std::vector<double> density_sq_;    // Z integrand
};

/// Energy ledger row: kinetic = |sqrt(rho) u|_2^2 with rho = 1/(1+a),
/// dissipation = 2 mu int_0^t |grad u|_2^2 (trapezoid), residual the
/// relative defect of the energy equality against the initial energy.
struct EnergySample {
    double t = 0.0;
    double kinetic = 0.0;
    double dissipation = 0.0;
    double residual = 0.0;
};

struct Snapshot {
    double t;
    SpectralField a;
    SpectralField u;
};

struct RunResult {
    SolverState state;  ///< terminal state
    long steps = 0;
    std::vector<EnergySample> energy;
    std::optional<BootstrapMonitor> monitor;
    /// hypotheses() after each monitor record, in time order.
    std::vector<std::vector<HypothesisStatus>> hypothesis_history;
    bool halted_on_breach = false;
    double halt_time = 0.0;
    std::vector<Snapshot> snapshots;
};

/// Integrate the coupled system from (a0, u0) to cfg.t_final: per step,
/// transport of a by the frozen current velocity (third-order
/// Runge-Kutta), then the split momentum update — or the symmetrized
/// (strang) ordering. Records the energy ledger every step and the
/// bootstrap monitor at its cadence; halts early on breach when the policy
/// says so. Data are low-passed first when cfg.smoothing_index >= 0.
///
/// Requirements: div u0 within divergence_tol, 1 + a0 positive. Throws
/// StabilityError on CFL or density-floor violation, ConvergenceError from
/// the pressure solver, StateError if the projected velocity ever loses
/// solenoidality.
RunResult run(const DyadicDecomposition& dec, const SpectralField& a0, const SpectralField& u0,
              const ForceFn& f, const SolverConfig& cfg);

/// Weak-norm record of a perturbation-growth experiment (two lockstep
/// runs): delta a measured one derivative below the density space, delta u
/// two below the velocity space.
struct StabilitySample {
    double t = 0.0;
    double delta_a = 0.0;  ///< |delta a(t)|_{B^{N/p1-1}_{p1,inf}}
    double delta_u = 0.0;  ///< |delta u(t)|_{B^{N/p2-2}_{p2,r}}
};

struct StabilityReport {
    std::vector<StabilitySample> series;
    double initial_size = 0.0;   ///< delta_a + delta_u at t = 0
    double terminal_size = 0.0;  ///< delta_a + delta_u at t = T
    double peak_size = 0.0;      ///< max over samples
    double delta_u_l1 = 0.0;     ///< |delta u|_{L~1(B^{N/p2}_{p2,r})}
    double grad_dpi_l1 = 0.0;    ///< |delta grad Pi|_{L~1(B^{N/p2-2}_{p2,r})}
    /// Reported growth constant max_t |delta(t)| / |delta(0)|.
    double amplification() const {
        return initial_size > 0.0 ? peak_size / initial_size : 0.0;
    }
};

/// Run (a0, u0) and (a0 + da0, u0 + du0) in lockstep and record the
/// difference in the weak norms above at the monitor cadence.
StabilityReport stability_experiment(const DyadicDecomposition& dec, const SpectralField& a0,
                                     const SpectralField& u0, const SpectralField& da0,
                                     const SpectralField& du0, const ForceFn& f,
                                     const SolverConfig& cfg);

/// Co-scaling check of the discretization: evolve (a0(l x), l u0(l x)) on
/// the same lattice of the box shrunk by l with (dt/l^2, T/l^2) — on this
/// torus family the data arrays are reused verbatim — and compare against
/// the rescaled base solution. Returns the max coefficient discrepancy,
/// with the velocity difference measured at unit scale (divided by l).
/// f = 0; monitors are disabled in both runs.
double scaling_covariance_error(const DyadicDecomposition& dec, const SpectralField& a0,
                                const SpectralField& u0, const SolverConfig& cfg, int l = 2);

}  // namespace lpflow
