#include "lpflow/ns.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

namespace lpflow {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ParameterError("ns: " + msg);
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

double inv(double q) { return std::isinf(q) ? 0.0 : 1.0 / q; }

/// Squared wavenumber per mode with Nyquist-zeroed axes, matching the
/// Laplacian symbol used by the spatial operators.
Eigen::ArrayXd ksq_array(const TorusGrid& g) {
    Eigen::ArrayXd ksq = Eigen::ArrayXd::Zero(g.points());
    for (int a = 0; a < g.dim(); ++a) {
        std::vector<double> k(static_cast<std::size_t>(g.size(a)));
        for (int i = 0; i < g.size(a); ++i)
            k[static_cast<std::size_t>(i)] = g.is_nyquist(a, i) ? 0.0 : g.wavenumber(a, i);
        for (std::int64_t idx = 0; idx < g.points(); ++idx) {
            const double ka = k[static_cast<std::size_t>(g.unflatten(idx)[a])];
            ksq[idx] += ka * ka;
        }
    }
    return ksq;
}

/// Mode-wise heat propagator exp(-mu_tau |k|^2).
SpectralField heat_decay(const SpectralField& u, const Eigen::ArrayXd& ksq, double mu_tau) {
    SpectralField out(u.grid(), u.components());
    const Eigen::ArrayXd fac = (-mu_tau * ksq).exp();
    for (int c = 0; c < u.components(); ++c) out.comp(c) = u.comp(c) * fac;
    return out;
}

/// dealias(a x) with the coefficient already in physical space.
SpectralField coeff_product(const RealField& a_real, const SpectralField& x, double frac) {
    RealField xr = inverse_transform(x);
    RealField out(x.grid(), x.components());
    for (int c = 0; c < x.components(); ++c) out.comp(c) = a_real.comp(0) * xr.comp(c);
    return dealias(transform(out), frac);
}

/// (u . grad) u, computed pseudo-spectrally with inputs and product
/// truncated to the alias-free band.
SpectralField advection_term(const SpectralField& u, double frac) {
    const TorusGrid& g = u.grid();
    const SpectralField ud = dealias(u, frac);
    const RealField ur = inverse_transform(ud);
    const RealField gr = inverse_transform(dealias(gradient(ud), frac));
    RealField out(g, g.dim());
    for (int i = 0; i < g.dim(); ++i)
        for (int j = 0; j < g.dim(); ++j)
            out.comp(i) += ur.comp(j) * gr.comp(i * g.dim() + j);
    return dealias(transform(out), frac);
}

/// H(a, u, grad Pi) = a (mu Lap u_L - grad Pi_L) - u . grad u.
SpectralField forcing_term(const RealField& a_real, const SpectralField& u_full,
                           const SpectralField& u_l, const SpectralField& qf, double mu,
                           double frac) {
    SpectralField src = laplacian(u_l);
    src *= mu;
    src -= qf;
    return coeff_product(a_real, src, frac) - advection_term(u_full, frac);
}

/// Instantaneous perturbation pressure: solve div((1+a) grad Pi~) =
/// div(mu a Lap u~ + H) at the state's own time and store it on the state.
/// Fills the split diagnostics when asked to.
void prime_pressure(SolverState& st, const DyadicDecomposition& dec, const ForceFn& f,
                    const SolverConfig& cfg, MomentumDiagnostics* diag) {
    const double frac = cfg.dealias_fraction;
    const RealField a_real = inverse_transform(st.a);
    CoefficientField coef(dec, st.a, cfg.p1);
    if (f) st.grad_pi_l = leray_complement(f(st.t));
    SpectralField h = forcing_term(a_real, st.u, st.u_l, st.grad_pi_l, cfg.mu, frac);
    SpectralField var = coeff_product(a_real, laplacian(st.u_tilde), frac);
    var *= cfg.mu;
    // The state always carries the combined solve so that the trajectory is
    // independent of the monitoring cadence; the split solves are extra.
    PressureSolution sol = solve_pressure(coef, var + h, cfg.elliptic_tol, cfg.elliptic_max_iter);
    st.grad_pi_tilde = std::move(sol.grad_pi);
    if (diag) {
        diag->t_mid = st.t;
        diag->elliptic_iterations = sol.iterations;
        if (cfg.pressure_split_diagnostics) {
            auto [sh, sv] =
                split_sources(coef, h, var, cfg.elliptic_tol, cfg.elliptic_max_iter);
            diag->h = std::move(h);
            diag->lap_u_tilde = laplacian(st.u_tilde);
            diag->grad_pi_h = std::move(sh.grad_pi);
            diag->grad_pi_var = std::move(sv.grad_pi);
            diag->elliptic_iterations += sh.iterations + sv.iterations;
        }
    }
}

/// Advective CFL guard for the transport substep.
void cfl_check(const SpectralField& u, double dt_sub, const SolverConfig& cfg) {
    const TorusGrid& g = u.grid();
    const RealField ur = inverse_transform(dealias(u, cfg.dealias_fraction));
    double cfl = 0.0;
    for (int axis = 0; axis < g.dim(); ++axis) {
        const double vmax = ur.comp(axis).abs().maxCoeff();
        cfl = std::max(cfl, vmax * dt_sub / g.spacing(axis));
    }
    if (cfl > cfg.cfl_limit * (1.0 + 1e-12))
        throw StabilityError("ns: CFL number " + num(cfl) + " exceeds the limit", cfl,
                             cfg.cfl_limit);
}

/// One full coupled step (transport + momentum in the configured ordering).
void advance(SolverState& st, const DyadicDecomposition& dec, const ForceFn& f,
             const SolverConfig& cfg, double dt, MomentumDiagnostics* diag) {
    const double frac = cfg.dealias_fraction;
    if (cfg.splitting == SolverConfig::Splitting::lie) {
        cfl_check(st.u, dt, cfg);
        st.a = transport_step(st.a, st.u, dt, frac);
        st = perturbation_step(st, dec, f, cfg, dt, diag);
    } else {
        cfl_check(st.u, 0.5 * dt, cfg);
        st.a = transport_step(st.a, st.u, 0.5 * dt, frac);
        st = perturbation_step(st, dec, f, cfg, dt, diag);
        cfl_check(st.u, 0.5 * dt, cfg);
        st.a = transport_step(st.a, st.u, 0.5 * dt, frac);
    }
}

long step_count(const SolverConfig& cfg) {
    return std::max<long>(1, std::lround(std::ceil(cfg.t_final / cfg.dt - 1e-9)));
}

}  // namespace

void SolverConfig::validate() const {
    require(mu > 0.0, "mu must be positive");
    require(dt > 0.0 && t_final > 0.0, "dt and t_final must be positive");
    require(p1 >= 1.0 && p2 >= 1.0 && r >= 1.0, "p1, p2 and r must be >= 1");
    require(eps > 0.0, "eps must be positive");
    require(c_small > 0.0, "c_small must be positive");
    require(eta > 0.0, "eta must be positive");
    require(pi_tilde_constant >= 0.0 || pi_tilde_constant <= 0.0,
            "pi_tilde_constant must be a number");
    require(big_c > 0.0, "big_c must be positive");
    require(dealias_fraction > 0.0 && dealias_fraction <= 1.0,
            "dealias_fraction must lie in (0, 1]");
    require(cfl_limit > 0.0, "cfl_limit must be positive");
    require(divergence_tol > 0.0, "divergence_tol must be positive");
    require(elliptic_tol > 0.0 && elliptic_max_iter >= 1,
            "elliptic tolerance and max_iter must be positive");
    require(monitor_every >= 0 && snapshot_every >= 0,
            "monitor_every and snapshot_every must be >= 0");
}

SolverState::SolverState(SpectralField a0, SpectralField u0)
    : t(0.0),
      a(std::move(a0)),
      u(std::move(u0)),
      u_l(u),
      u_tilde(u.grid(), u.components()),
      grad_pi_l(u.grid(), u.components()),
      grad_pi_tilde(u.grid(), u.components()) {
    require_same_grid(a.grid(), u.grid());
    if (a.components() != 1) throw ShapeError("ns: a must be a scalar field");
    if (u.components() != u.grid().dim()) throw ShapeError("ns: u needs dim components");
}

StokesStep stokes_step(const SpectralField& u_l, const ForceFn& f, double mu, double t,
                       double dt) {
    require(mu > 0.0, "mu must be positive");
    require(dt > 0.0, "dt must be positive");
    const TorusGrid& g = u_l.grid();
    if (u_l.components() != g.dim()) throw ShapeError("ns: u_l needs dim components");

    const Eigen::ArrayXd ksq = ksq_array(g);
    SpectralField u = heat_decay(u_l, ksq, mu * dt);
    SpectralField qf(g, g.dim());
    if (f) {
        SpectralField fmid = f(t + 0.5 * dt);
        require_same_grid(g, fmid.grid());
        if (fmid.components() != g.dim()) throw ShapeError("ns: f needs dim components");
        const SpectralField pf = leray_project(fmid);
        // Duhamel with the phi1 weight (e^z - 1)/z: exact variation of
        // constants for forcing frozen at the midpoint value.
        Eigen::ArrayXd w(g.points());
        for (std::int64_t idx = 0; idx < g.points(); ++idx) {
            const double z = -mu * dt * ksq[idx];
            w[idx] = z == 0.0 ? dt : dt * std::expm1(z) / z;
        }
        for (int c = 0; c < g.dim(); ++c) u.comp(c) += pf.comp(c) * w;
        qf = leray_complement(f(t + dt));
    }
    return {std::move(u), std::move(qf)};
}

SolverState perturbation_step(const SolverState& state, const DyadicDecomposition& dec,
                              const ForceFn& f, const SolverConfig& cfg, double dt,
                              MomentumDiagnostics* diag) {
    require(dt > 0.0, "dt must be positive");
    const TorusGrid& g = state.a.grid();
    require_same_grid(dec.grid(), g);
    const double frac = cfg.dealias_fraction;
    const double t0 = state.t;

    const RealField a_real = inverse_transform(state.a);
    CoefficientField coef(dec, state.a, cfg.p1);
    const Eigen::ArrayXd ksq = ksq_array(g);

    // Stokes part, evaluated at the half and the full step from t0 (the
    // half-step value only feeds the midpoint stage of the perturbation).
    StokesStep mid = stokes_step(state.u_l, f, cfg.mu, t0, 0.5 * dt);
    StokesStep end = stokes_step(state.u_l, f, cfg.mu, t0, dt);

    int ell_iters = 0;
    // Stage right-hand side G = P[mu a Lap u~ + H - (1 + a) grad Pi~],
    // with grad Pi~ from the variable-coefficient solve, truncated to the
    // alias-free band; the projection keeps u~ solenoidal to round-off.
    auto stage = [&](const SpectralField& u_t, const SpectralField& u_l_s,
                     const SpectralField& qf_s,
                     bool record_split) -> std::pair<SpectralField, SpectralField> {
        SpectralField h = forcing_term(a_real, u_l_s + u_t, u_l_s, qf_s, cfg.mu, frac);
        SpectralField lap_ut = laplacian(u_t);
        SpectralField var = coeff_product(a_real, lap_ut, frac);
        var *= cfg.mu;
        PressureSolution sol =
            solve_pressure(coef, var + h, cfg.elliptic_tol, cfg.elliptic_max_iter);
        SpectralField gp = std::move(sol.grad_pi);
        ell_iters += sol.iterations;
        // Extra split solves feed the monitor only; the combined solve above
        // drives the state so the trajectory ignores the monitoring cadence.
        if (record_split && diag && cfg.pressure_split_diagnostics) {
            auto [sh, sv] = split_sources(coef, h, var, cfg.elliptic_tol, cfg.elliptic_max_iter);
            ell_iters += sh.iterations + sv.iterations;
            diag->h = h;
            diag->lap_u_tilde = std::move(lap_ut);
            diag->grad_pi_h = std::move(sh.grad_pi);
            diag->grad_pi_var = std::move(sv.grad_pi);
        }
        SpectralField rhs = var + h;
        rhs -= gp;
        rhs -= coeff_product(a_real, gp, frac);
        return {leray_project(dealias(rhs, frac)), std::move(gp)};
    };

    // Integrating-factor midpoint scheme: the exact heat propagator carries
    // the constant-coefficient diffusion, the midpoint quadrature the rest.
    auto [g1, gp1] = stage(state.u_tilde, state.u_l, state.grad_pi_l, false);
    SpectralField ut_half = heat_decay(state.u_tilde + (0.5 * dt) * g1, ksq, cfg.mu * 0.5 * dt);
    auto [g2, gp2] = stage(ut_half, mid.u, mid.grad_pi, true);
    SpectralField ut_end = heat_decay(state.u_tilde, ksq, cfg.mu * dt);
    ut_end += dt * heat_decay(g2, ksq, cfg.mu * 0.5 * dt);

    SolverState out = state;
    out.t = t0 + dt;
    out.u_l = std::move(end.u);
    out.u_tilde = std::move(ut_end);
    out.grad_pi_l = std::move(end.grad_pi);
    out.grad_pi_tilde = std::move(gp2);
    out.u = out.u_l + out.u_tilde;
    if (diag) {
        diag->t_mid = t0 + 0.5 * dt;
        diag->elliptic_iterations = ell_iters;
    }
    return out;
}

BootstrapMonitor::BootstrapMonitor(const DyadicDecomposition& dec, const SolverConfig& cfg,
                                   const SpectralField& a0, const SpectralField& u0,
                                   const ForceFn& f)
    : dec_(&dec),
      cfg_(cfg),
      acc_a_(dec, cfg.p1),
      acc_grad_a_(dec, cfg.p1),
      acc_ul_(dec, cfg.p2),
      acc_ut_(dec, cfg.p2),
      acc_pl_(dec, cfg.p2),
      acc_pt_(dec, cfg.p2),
      acc_ph_(dec, cfg.p2),
      acc_qh_(dec, cfg.p2),
      acc_lap_ut_(dec, cfg.p2),
      acc_pi_h_(dec, cfg.p2),
      acc_pi_var_(dec, cfg.p2) {
    cfg.validate();
    require_same_grid(dec.grid(), a0.grid());
    require_same_grid(dec.grid(), u0.grid());
    if (a0.components() != 1) throw ShapeError("ns: a0 must be a scalar field");
    if (u0.components() != dec.grid().dim()) throw ShapeError("ns: u0 needs dim components");

    const int N = dec.grid().dim();
    const double np1 = N * inv(cfg.p1);
    const double np2 = N * inv(cfg.p2);

    CoefficientField coef(dec, a0, cfg.p1);
    b_lower_ = coef.b_lower();
    b_upper_ = 1.0 + inverse_transform(a0).data().col(0).maxCoeff();
    nu_lower_ = b_lower_ * cfg.mu;
    nu_upper_ = cfg.mu;
    m_ = cfg.m_override ? *cfg.m_override : coef.cutoff_index(0.5 * cfg.c_small);
    a0_const_ = 1.0 + 2.0 * dec.besov_norm(a0, np1 + cfg.eps, cfg.p1, infinity);
    u0_blocks_ = dec.block_norms(u0, cfg.p2);
    f_blocks_l1_ = Eigen::ArrayXd::Zero(dec.block_count());
    double f_l1 = 0.0;
    if (f) {
        // Trapezoid over at most 257 uniform samples of [0, T].
        const int ns = static_cast<int>(std::min<long>(step_count(cfg), 256));
        std::vector<double> ts(static_cast<std::size_t>(ns) + 1);
        std::vector<Eigen::ArrayXd> blk(ts.size());
        for (int i = 0; i <= ns; ++i) {
            ts[static_cast<std::size_t>(i)] = cfg.t_final * i / ns;
            SpectralField fi = f(ts[static_cast<std::size_t>(i)]);
            require_same_grid(dec.grid(), fi.grid());
            blk[static_cast<std::size_t>(i)] = dec.block_norms(fi, cfg.p2);
        }
        for (int i = 1; i <= ns; ++i)
            f_blocks_l1_ += 0.5 *
                            (ts[static_cast<std::size_t>(i)] - ts[static_cast<std::size_t>(i - 1)]) *
                            (blk[static_cast<std::size_t>(i)] + blk[static_cast<std::size_t>(i - 1)]);
        f_l1 = DyadicDecomposition::weighted_lr(f_blocks_l1_, np2 - 1.0, cfg.r, -1);
        for (const Eigen::ArrayXd& b : blk)
            f_sup_ = std::max(f_sup_,
                              DyadicDecomposition::weighted_lr(b, np2 - 1.0, cfg.r, -1));
    }
    u0_const_ = DyadicDecomposition::weighted_lr(u0_blocks_, np2 - 1.0, cfg.r, -1) + f_l1;
    u_tilde0_const_ = 2.0 * cfg.big_c * u0_const_ + 4.0 * cfg.big_c * nu_upper_ * a0_const_;
    pi_tilde0_const_ = cfg.pi_tilde_constant > 0.0 ? cfg.pi_tilde_constant : u_tilde0_const_;
}

void BootstrapMonitor::require_recorded() const {
    if (times_.empty()) throw StateError("ns: monitor has no samples");
}

int BootstrapMonitor::samples() const { return static_cast<int>(times_.size()); }

double BootstrapMonitor::time() const {
    require_recorded();
    return times_.back();
}

double BootstrapMonitor::time(int i) const {
    if (i < 0 || i >= samples()) throw ParameterError("ns: monitor sample index out of range");
    return times_[static_cast<std::size_t>(i)];
}

double BootstrapMonitor::density_besov(int i, double s, double r) const {
    if (i < 0 || i >= samples()) throw ParameterError("ns: monitor sample index out of range");
    return acc_a_.besov_at(i, s, r);
}

double BootstrapMonitor::stokes_besov(int i, double s, double r) const {
    if (i < 0 || i >= samples()) throw ParameterError("ns: monitor sample index out of range");
    return acc_ul_.besov_at(i, s, r);
}

double BootstrapMonitor::perturbation_besov(int i, double s, double r) const {
    if (i < 0 || i >= samples()) throw ParameterError("ns: monitor sample index out of range");
    return acc_ut_.besov_at(i, s, r);
}

void BootstrapMonitor::record(const SolverState& st, const MomentumDiagnostics* diag) {
    if (!times_.empty() && !(st.t >= times_.back()))
        throw ParameterError("ns: monitor samples must be time-ordered");
    times_.push_back(st.t);
    acc_a_.record(st.t, st.a);
    acc_grad_a_.record(st.t, gradient(st.a));
    acc_ul_.record(st.t, st.u_l);
    acc_ut_.record(st.t, st.u_tilde);
    acc_pl_.record(st.t, st.grad_pi_l);
    // The perturbation pressure is sampled where it was solved (the step
    // midpoint, or the state's own time at t = 0).
    acc_pt_.record(diag ? diag->t_mid : st.t, st.grad_pi_tilde);

    const RealField ar = inverse_transform(st.a);
    one_plus_min_.push_back(1.0 + ar.data().col(0).minCoeff());
    one_plus_max_.push_back(1.0 + ar.data().col(0).maxCoeff());
    const SpectralField sm = dec_->low_pass(st.a, m_);
    smoothed_min_.push_back(1.0 + inverse_transform(sm).data().col(0).minCoeff());
    tail_sup_.push_back(lp_norm(st.a - sm, infinity));

    const int i = acc_a_.samples() - 1;
    const double np1 = dec_->grid().dim() * inv(cfg_.p1);
    const double dn = std::max(acc_a_.besov_at(i, np1, infinity), acc_a_.sup_at(i));
    density_sq_.push_back(dn * dn);

    if (cfg_.pressure_split_diagnostics && diag && diag->h) {
        acc_ph_.record(diag->t_mid, leray_project(*diag->h));
        acc_qh_.record(diag->t_mid, leray_complement(*diag->h));
        acc_lap_ut_.record(diag->t_mid, *diag->lap_u_tilde);
        acc_pi_h_.record(diag->t_mid, *diag->grad_pi_h);
        acc_pi_var_.record(diag->t_mid, *diag->grad_pi_var);
    }
}

double BootstrapMonitor::z_m() const {
    require_recorded();
    const double alpha = 0.5 * cfg_.eps;
    return std::pow(2.0, 2.0 * m_ * alpha) * nu_upper_ * nu_upper_ / nu_lower_ *
           trapezoid(times_, density_sq_);
}

double BootstrapMonitor::script_a() const {
    require_recorded();
    const double np1 = dec_->grid().dim() * inv(cfg_.p1);
    const double alpha = 0.5 * cfg_.eps;
    return 1.0 +
           acc_grad_a_.chemin_lerner(infinity, np1 + alpha - 1.0, infinity) / b_lower_;
}

double BootstrapMonitor::density_norm(double extra_s) const {
    const double np1 = dec_->grid().dim() * inv(cfg_.p1);
    return std::max(acc_a_.chemin_lerner(infinity, np1 + extra_s, infinity),
                    acc_a_.sup_linf());
}

std::vector<HypothesisStatus> BootstrapMonitor::hypotheses() const {
    require_recorded();
    const double np1 = dec_->grid().dim() * inv(cfg_.p1);
    const double np2 = dec_->grid().dim() * inv(cfg_.p2);
    const double t = times_.back();
    std::vector<HypothesisStatus> out;
    out.reserve(8);

    const double tail_cl = acc_a_.chemin_lerner_tail(infinity, np1, infinity, m_);
    const double tail_linf = *std::max_element(tail_sup_.begin(), tail_sup_.end());
    out.push_back({"H1", std::max(tail_cl, tail_linf), cfg_.c_small * nu_lower_ / nu_upper_});

    const double an = density_norm(0.0);
    out.push_back({"H2", cfg_.big_c * nu_upper_ * nu_upper_ * t * an * an,
                   std::pow(2.0, -2.0 * m_) * nu_lower_});

    // Two-sided pointwise bracket, encoded as a defect: value <= 0 means
    // b_lower/2 <= 1 + a <= 2 b_upper everywhere so far.
    const double lo = *std::min_element(one_plus_min_.begin(), one_plus_min_.end());
    const double hi = *std::max_element(one_plus_max_.begin(), one_plus_max_.end());
    out.push_back({"H3", std::max(0.5 * b_lower_ - lo, hi - 2.0 * b_upper_), 0.0});

    out.push_back({"H4", density_norm(0.5 * cfg_.eps), a0_const_});
    out.push_back({"H5", acc_ul_.chemin_lerner(1.0, np2 + 1.0, cfg_.r), cfg_.eta});
    out.push_back({"H6",
                   acc_ut_.chemin_lerner(infinity, np2 - 1.0, cfg_.r) +
                       nu_lower_ * acc_ut_.chemin_lerner(1.0, np2 + 1.0, cfg_.r),
                   u_tilde0_const_ * cfg_.eta});
    out.push_back({"H7", acc_pl_.chemin_lerner(1.0, np2 - 1.0, cfg_.r), cfg_.eta});
    out.push_back({"H8", acc_pt_.chemin_lerner(1.0, np2 - 1.0, cfg_.r),
                   pi_tilde0_const_ * cfg_.eta});
    return out;
}

double BootstrapMonitor::stokes_block_bound(double t) const {
    const double kappa = 9.0 / 16.0;
    const double np2 = dec_->grid().dim() * inv(cfg_.p2);
    Eigen::ArrayXd terms(dec_->block_count());
    for (int l = -1; l <= dec_->lmax(); ++l) {
        const double damp = -std::expm1(-kappa * nu_upper_ * std::pow(4.0, l) * t);
        const double u0b = u0_blocks_[l + 1];
        const double fb = f_blocks_l1_[l + 1];
        const double data = std::isinf(cfg_.r)
                                ? std::max(u0b, fb)
                                : std::pow(std::pow(u0b, cfg_.r) + std::pow(fb, cfg_.r),
                                           1.0 / cfg_.r);
        terms[l + 1] = damp * data;
    }
    return DyadicDecomposition::weighted_lr(terms, np2 - 1.0, cfg_.r, -1);
}

std::vector<HypothesisStatus> BootstrapMonitor::smallness() const {
    require_recorded();
    const double np1 = dec_->grid().dim() * inv(cfg_.p1);
    const double np2 = dec_->grid().dim() * inv(cfg_.p2);
    const double t = times_.back();
    const double kappa = 9.0 / 16.0;
    const double log2 = std::log(2.0);
    std::vector<HypothesisStatus> out;

    out.push_back(
        {"stokes-bound", acc_ul_.chemin_lerner(infinity, np2 - 1.0, cfg_.r), u0_const_});
    const double env = stokes_block_bound(t);
    out.push_back({"stokes-smoothing",
                   kappa * nu_upper_ * acc_ul_.chemin_lerner(1.0, np2 + 1.0, cfg_.r), env});
    out.push_back({"stokes-smallness", env, kappa * cfg_.eta * nu_upper_});
    out.push_back({"horizon-eta", f_sup_ * t, cfg_.big_c * nu_upper_ * cfg_.eta});
    out.push_back({"horizon-cutoff", t,
                   std::pow(2.0, -2.0 * m_) * nu_lower_ /
                       (cfg_.big_c * nu_upper_ * nu_upper_ * a0_const_ * a0_const_)});
    out.push_back({"eta-log2",
                   cfg_.big_c * (1.0 + u_tilde0_const_ / nu_lower_) * cfg_.eta, log2});
    const double a0n = std::max(acc_a_.besov_at(0, np1, infinity), acc_a_.sup_at(0));
    out.push_back({"eta-smallness",
                   cfg_.big_c / log2 * (1.0 + a0n) * (1.0 + u_tilde0_const_ / nu_lower_) *
                       cfg_.eta,
                   0.5 * cfg_.c_small * nu_lower_ / nu_upper_});
    out.push_back({"smoothed-density-floor", 0.25 * b_lower_,
                   *std::min_element(smoothed_min_.begin(), smoothed_min_.end())});
    return out;
}

std::vector<std::string> BootstrapMonitor::breaches() const {
    std::vector<std::string> out;
    for (const HypothesisStatus& h : hypotheses())
        if (!h.holds()) out.push_back(h.name);
    return out;
}

int BootstrapMonitor::suggested_m() const {
    require_recorded();
    const double np1 = dec_->grid().dim() * inv(cfg_.p1);
    for (int q = -1; q <= dec_->lmax() + 1; ++q)
        if (acc_a_.chemin_lerner_tail(infinity, np1, 1.0, q) <= 0.5 * cfg_.c_small) return q;
    return dec_->lmax() + 2;
}

std::optional<InequalityReport> BootstrapMonitor::parabolic_estimate(double s,
                                                                     double m_time) const {
    require_recorded();
    if (!cfg_.pressure_split_diagnostics || acc_ph_.samples() == 0)
        throw StateError("ns: parabolic estimate needs pressure split diagnostics");
    if (!(m_time >= 1.0)) throw ParameterError("ns: m_time must be >= 1");
    const double alpha = 0.5 * cfg_.eps;
    const double ap = std::min({1.0, alpha, 0.5 * (s - 2.0 + 2.0 / m_time)});
    if (!(ap > 0.0)) return std::nullopt;
    const double kappa = s / ap;
    const double p = cfg_.p2;
    const double pm1_over_p = std::isinf(p) ? 1.0 : (p - 1.0) / p;
    const double mu_low = nu_lower_ * pm1_over_p * inv(p);
    const double A = script_a();

    const double lhs = acc_ut_.chemin_lerner(infinity, s, cfg_.r) +
                       kappa * nu_lower_ * acc_ut_.chemin_lerner(1.0, s + 2.0, cfg_.r);
    // The perturbation starts from zero and all forcing sits in the L~1
    // slot, so the data and L~m forcing terms drop out.
    const double rhs =
        std::exp(cfg_.big_c * z_m()) * std::pow(A, kappa) *
        (acc_ph_.chemin_lerner(1.0, s, cfg_.r) +
         std::pow(mu_low, 1.0 / m_time) * (nu_lower_ * pm1_over_p) * A *
             acc_ut_.chemin_lerner(1.0, s + 2.0 - ap, cfg_.r));

    InequalityReport rep;
    rep.law_id = "ns-parabolic[s=" + num(s) + ",mtime=" + num(m_time) + "]";
    rep.s = s;
    rep.p = p;
    rep.r = cfg_.r;
    rep.lhs = lhs;
    rep.rhs = rhs;
    rep.resolution = dec_->grid().size(0);
    rep.degenerate = !(rhs > 0.0) || !std::isfinite(rhs);
    return rep;
}

std::vector<InequalityReport> BootstrapMonitor::pressure_estimate(double s,
                                                                  double m_time) const {
    require_recorded();
    if (!cfg_.pressure_split_diagnostics || acc_pi_h_.samples() == 0)
        throw StateError("ns: pressure estimate needs pressure split diagnostics");
    if (!(m_time >= 1.0)) throw ParameterError("ns: m_time must be >= 1");
    const double alpha = 0.5 * cfg_.eps;
    const double ap = std::min({1.0, alpha, 0.5 * (s - 2.0 + 2.0 / m_time)});
    if (!(ap > 0.0)) return {};
    const double kappa = s / ap;
    const double np1 = dec_->grid().dim() * inv(cfg_.p1);
    const double s2 = s - 2.0 + 2.0 / m_time;
    const double ak = std::pow(script_a(), kappa);

    std::vector<InequalityReport> out(2);
    out[0].law_id = "ns-pressure-h[s=" + num(s) + ",mtime=" + num(m_time) + "]";
    out[0].lhs = b_lower_ * acc_pi_h_.chemin_lerner(1.0, s, cfg_.r);
    out[0].rhs = ak * acc_qh_.chemin_lerner(1.0, s, cfg_.r);
    out[1].law_id = "ns-pressure-var[s=" + num(s) + ",mtime=" + num(m_time) + "]";
    out[1].lhs = b_lower_ * acc_pi_var_.chemin_lerner(1.0, s, cfg_.r);
    out[1].rhs = ak * nu_upper_ * acc_a_.chemin_lerner(infinity, np1 + alpha, infinity) *
                 acc_lap_ut_.chemin_lerner(m_time, s2, cfg_.r);
    for (InequalityReport& rep : out) {
        rep.s = s;
        rep.p = cfg_.p2;
        rep.r = cfg_.r;
        rep.resolution = dec_->grid().size(0);
        rep.degenerate = !(rep.rhs > 0.0) || !std::isfinite(rep.rhs);
    }
    return out;
}

RunResult run(const DyadicDecomposition& dec, const SpectralField& a0_in,
              const SpectralField& u0_in, const ForceFn& f_in, const SolverConfig& cfg) {
    cfg.validate();
    const TorusGrid& g = dec.grid();
    require_same_grid(g, a0_in.grid());
    require_same_grid(g, u0_in.grid());
    if (a0_in.components() != 1) throw ShapeError("ns: a0 must be a scalar field");
    if (u0_in.components() != g.dim()) throw ShapeError("ns: u0 needs dim components");

    SpectralField a0 = a0_in;
    SpectralField u0 = u0_in;
    ForceFn f = f_in;
    if (cfg.smoothing_index >= 0) {
        a0 = dec.low_pass(a0_in, cfg.smoothing_index);
        u0 = dec.low_pass(u0_in, cfg.smoothing_index);
        if (f_in)
            f = [&dec, f_in, n = cfg.smoothing_index](double t) {
                return dec.low_pass(f_in(t), n);
            };
    }
    const double div0 = divergence_residual(u0);
    if (div0 > cfg.divergence_tol)
        throw ParameterError("ns: u0 is not divergence-free (residual " + num(div0) + ")");
    const double b_lower = 1.0 + inverse_transform(a0).data().col(0).minCoeff();
    if (!(b_lower > 0.0))
        throw ParameterError("ns: 1 + a0 must be bounded below by a positive constant");

    const long n_steps = step_count(cfg);
    const double dt = cfg.t_final / static_cast<double>(n_steps);
    const Eigen::ArrayXd ksq = ksq_array(g);

    SolverState st(a0, u0);
    std::optional<BootstrapMonitor> mon;
    MomentumDiagnostics diag0;
    prime_pressure(st, dec, f, cfg, cfg.monitor_every > 0 ? &diag0 : nullptr);

    std::vector<EnergySample> energy;
    double kin0 = 0.0, cum = 0.0, prev_rate = 0.0, prev_t = 0.0;
    auto sample_energy = [&](const SolverState& s, bool first) {
        const RealField ar = inverse_transform(s.a);
        const double lo = 1.0 + ar.data().col(0).minCoeff();
        if (lo < 0.5 * b_lower * (1.0 - 1e-12))
            throw StabilityError("ns: density floor breached, inf(1+a) = " + num(lo), lo,
                                 0.5 * b_lower);
        const double dres = divergence_residual(s.u);
        if (dres > cfg.divergence_tol)
            throw StateError("ns: velocity lost solenoidality (residual " + num(dres) + ")");
        const RealField ur = inverse_transform(s.u);
        Eigen::ArrayXd usq = Eigen::ArrayXd::Zero(g.points());
        for (int c = 0; c < ur.components(); ++c) usq += ur.comp(c).square();
        const double kin = g.volume() * (usq / (1.0 + ar.data().col(0))).mean();
        double rate = 0.0;
        for (int c = 0; c < s.u.components(); ++c)
            rate += (s.u.comp(c).abs2() * ksq).sum();
        rate *= 2.0 * cfg.mu * g.volume();
        if (first)
            kin0 = kin;
        else
            cum += 0.5 * (rate + prev_rate) * (s.t - prev_t);
        prev_rate = rate;
        prev_t = s.t;
        energy.push_back(
            {s.t, kin, cum, std::abs(kin + cum - kin0) / (kin0 > 0.0 ? kin0 : 1.0)});
    };

    std::vector<std::vector<HypothesisStatus>> history;
    bool halted = false;
    double halt_time = 0.0;
    auto monitor_record = [&](const MomentumDiagnostics* d) {
        mon->record(st, d);
        history.push_back(mon->hypotheses());
        if (cfg.on_breach == SolverConfig::BreachPolicy::halt && !mon->breaches().empty()) {
            halted = true;
            halt_time = st.t;
        }
    };

    sample_energy(st, true);
    if (cfg.monitor_every > 0) {
        mon.emplace(dec, cfg, a0, u0, f);
        monitor_record(&diag0);
    }

    std::vector<Snapshot> snaps;
    long completed = 0;
    for (long s = 1; s <= n_steps && !halted; ++s) {
        const bool monitored = mon && (s % cfg.monitor_every == 0 || s == n_steps);
        MomentumDiagnostics diag;
        advance(st, dec, f, cfg, dt, monitored ? &diag : nullptr);
        completed = s;
        sample_energy(st, false);
        if (monitored) monitor_record(&diag);
        if (cfg.snapshot_every > 0 && (s % cfg.snapshot_every == 0 || s == n_steps))
            snaps.push_back({st.t, st.a, st.u});
    }

    RunResult res{std::move(st)};
    res.steps = completed;
    res.energy = std::move(energy);
    res.monitor = std::move(mon);
    res.hypothesis_history = std::move(history);
    res.halted_on_breach = halted;
    res.halt_time = halt_time;
    res.snapshots = std::move(snaps);
    return res;
}

StabilityReport stability_experiment(const DyadicDecomposition& dec, const SpectralField& a0,
                                     const SpectralField& u0, const SpectralField& da0,
                                     const SpectralField& du0, const ForceFn& f,
                                     const SolverConfig& cfg) {
    cfg.validate();
    const TorusGrid& g = dec.grid();
    require_same_grid(g, da0.grid());
    require_same_grid(g, du0.grid());
    if (da0.components() != 1) throw ShapeError("ns: da0 must be a scalar field");
    if (du0.components() != g.dim()) throw ShapeError("ns: du0 needs dim components");

    const int N = g.dim();
    const double np1 = N * inv(cfg.p1);
    const double np2 = N * inv(cfg.p2);
    const long n_steps = step_count(cfg);
    const double dt = cfg.t_final / static_cast<double>(n_steps);
    const long cadence = std::max(1, cfg.monitor_every);

    SolverState s1(a0, u0);
    SolverState s2(a0 + da0, u0 + du0);
    const double d2 = divergence_residual(s2.u);
    if (divergence_residual(s1.u) > cfg.divergence_tol || d2 > cfg.divergence_tol)
        throw ParameterError("ns: velocities must be divergence-free (residual " + num(d2) +
                             ")");
    prime_pressure(s1, dec, f, cfg, nullptr);
    prime_pressure(s2, dec, f, cfg, nullptr);

    CheminLernerAccumulator da_acc(dec, cfg.p1), du_acc(dec, cfg.p2), dpi_acc(dec, cfg.p2);
    auto record = [&](double t) {
        da_acc.record(t, s2.a - s1.a);
        du_acc.record(t, s2.u - s1.u);
        dpi_acc.record(t, s2.grad_pi() - s1.grad_pi());
    };
    record(0.0);
    for (long s = 1; s <= n_steps; ++s) {
        advance(s1, dec, f, cfg, dt, nullptr);
        advance(s2, dec, f, cfg, dt, nullptr);
        if (s % cadence == 0 || s == n_steps) record(s1.t);
    }

    StabilityReport rep;
    for (int i = 0; i < da_acc.samples(); ++i)
        rep.series.push_back({da_acc.time(i), da_acc.besov_at(i, np1 - 1.0, infinity),
                              du_acc.besov_at(i, np2 - 2.0, cfg.r)});
    auto size_at = [&](const StabilitySample& s) { return s.delta_a + s.delta_u; };
    rep.initial_size = size_at(rep.series.front());
    rep.terminal_size = size_at(rep.series.back());
    rep.peak_size = 0.0;
    for (const StabilitySample& s : rep.series)
        rep.peak_size = std::max(rep.peak_size, size_at(s));
    rep.delta_u_l1 = du_acc.chemin_lerner(1.0, np2, cfg.r);
    rep.grad_dpi_l1 = dpi_acc.chemin_lerner(1.0, np2 - 2.0, cfg.r);
    return rep;
}

double scaling_covariance_error(const DyadicDecomposition& dec, const SpectralField& a0,
                                const SpectralField& u0, const SolverConfig& cfg, int l) {
    require(l >= 1, "scale factor must be >= 1");
    SolverConfig base_cfg = cfg;
    base_cfg.monitor_every = 0;
    base_cfg.snapshot_every = 0;
    RunResult base = run(dec, a0, u0, ForceFn(), base_cfg);

    const TorusGrid& g = dec.grid();
    const double ls = static_cast<double>(l);
    TorusGrid g2(g.dim(), {g.size(0), g.size(1), g.size(2)},
                 {g.period(0) / ls, g.period(1) / ls, g.period(2) / ls});
    DyadicDecomposition dec2(g2, dec.pou());
    SpectralField a2(g2, 1);
    a2.data() = a0.data();
    SpectralField u2(g2, g.dim());
    u2.data() = u0.data() * ls;
    SolverConfig c2 = base_cfg;
    c2.dt = cfg.dt / (ls * ls);
    c2.t_final = cfg.t_final / (ls * ls);
    RunResult scaled = run(dec2, a2, u2, ForceFn(), c2);

    double err = (scaled.state.a.data() - base.state.a.data()).abs().maxCoeff();
    err = std::max(err,
                   (scaled.state.u.data() / ls - base.state.u.data()).abs().maxCoeff());
    return err;
}

}  // namespace lpflow
