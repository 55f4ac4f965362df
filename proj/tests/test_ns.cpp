#include "lpflow/ns.hpp"

#include <cmath>
#include <complex>

#include "doctest.h"
#include "test_util.hpp"

using namespace lpflow;
namespace tu = lpflow::testutil;

namespace {

/// Smooth random scalar with a Gaussian spectral envelope, sup amplitude amp.
SpectralField scalar_taper(const TorusGrid& g, std::uint64_t seed, double k0, double amp) {
    SpectralField a = transform(tu::random_smooth(g, 1, seed, k0));
    const double m = inverse_transform(a).data().abs().maxCoeff();
    if (m > 0) a *= amp / m;
    return a;
}

/// Mean-free solenoidal smooth random velocity, sup amplitude amp.
SpectralField solenoidal(const TorusGrid& g, std::uint64_t seed, double k0, double amp) {
    SpectralField u = leray_project(transform(tu::random_smooth(g, g.dim(), seed, k0)));
    for (int c = 0; c < u.components(); ++c) u.comp(c)(0) = 0.0;
    const double m = inverse_transform(u).data().abs().maxCoeff();
    if (m > 0) u *= amp / m;
    return u;
}

/// u = amp (sin x cos y, -cos x sin y), built coefficient-wise so only the
/// four |k| = sqrt(2) modes are populated.
SpectralField taylor_green(const TorusGrid& g, double amp) {
    SpectralField u(g, g.dim());
    const std::complex<double> i_unit(0.0, 1.0);
    for (int e0 : {1, -1})
        for (int e1 : {1, -1}) {
            const std::int64_t idx = g.flatten(e0 == 1 ? 1 : g.size(0) - 1,
                                               e1 == 1 ? 1 : g.size(1) - 1);
            u.comp(0)(idx) = -i_unit * (0.25 * amp * e0);
            u.comp(1)(idx) = i_unit * (0.25 * amp * e1);
        }
    return u;
}

/// u = (0, cos x0): a steady shear whose self-advection vanishes
/// identically in exact arithmetic.
SpectralField shear_flow(const TorusGrid& g) {
    SpectralField u(g, g.dim());
    u.comp(1)(g.flatten(1, 0)) = 0.5;
    u.comp(1)(g.flatten(g.size(0) - 1, 0)) = 0.5;
    return u;
}

Eigen::ArrayXd ksq_of(const TorusGrid& g) {
    Eigen::ArrayXd ksq = Eigen::ArrayXd::Zero(g.points());
    for (std::int64_t idx = 0; idx < g.points(); ++idx) {
        const auto n = g.unflatten(idx);
        for (int a = 0; a < g.dim(); ++a) {
            const double k = g.is_nyquist(a, n[a]) ? 0.0 : g.wavenumber(a, n[a]);
            ksq[idx] += k * k;
        }
    }
    return ksq;
}

const HypothesisStatus* find_row(const std::vector<HypothesisStatus>& rows,
                                 const std::string& name) {
    for (const HypothesisStatus& r : rows)
        if (r.name == name) return &r;
    return nullptr;
}

}  // namespace

TEST_CASE("ns: config and state validation") {
    const TorusGrid g = TorusGrid::square(16);
    const DyadicDecomposition dec(g);

    SolverConfig cfg;
    cfg.mu = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = SolverConfig{};
    cfg.dt = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = SolverConfig{};
    cfg.p2 = 0.5;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = SolverConfig{};
    cfg.dealias_fraction = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = SolverConfig{};
    cfg.monitor_every = -1;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = SolverConfig{};
    CHECK_NOTHROW(cfg.validate());

    // State shape checks.
    CHECK_THROWS_AS(SolverState(SpectralField(g, 2), SpectralField(g, 2)), ShapeError);
    CHECK_THROWS_AS(SolverState(SpectralField(g, 1), SpectralField(g, 1)), ShapeError);

    // Compressible data are rejected.
    SpectralField bad(g, 2);
    bad.comp(0)(g.flatten(1, 0)) = 1.0;
    CHECK_THROWS_AS(run(dec, SpectralField(g, 1), bad, {}, SolverConfig{}), ParameterError);

    // Vacuum data are rejected: 1 + a touches zero.
    SpectralField heavy(g, 1);
    heavy.comp(0)(0) = -1.5;
    CHECK_THROWS_AS(run(dec, heavy, SpectralField(g, 2), {}, SolverConfig{}), ParameterError);

    // CFL guard.
    SolverConfig fast;
    fast.dt = 0.1;
    fast.t_final = 0.1;
    CHECK_THROWS_AS(run(dec, SpectralField(g, 1), taylor_green(g, 50.0), {}, fast),
                    StabilityError);
}

TEST_CASE("ns: stokes step decays each mode exactly") {
    const TorusGrid g = TorusGrid::square(32);
    const SpectralField u0 = transform(tu::random_smooth(g, 2, 101, 3.0));
    const double mu = 0.37, dt = 0.3;
    const StokesStep step = stokes_step(u0, {}, mu, 0.0, dt);

    const Eigen::ArrayXd ksq = ksq_of(g);
    double err = 0.0;
    for (int c = 0; c < 2; ++c) {
        const Eigen::ArrayXcd expected = u0.comp(c) * (-mu * dt * ksq).exp();
        err = std::max(err, (step.u.comp(c) - expected).abs().maxCoeff());
    }
    CHECK(err <= 1e-15 * tu::max_abs(u0));
    CHECK(l2_norm(step.grad_pi) == 0.0);
}

TEST_CASE("ns: stokes step reproduces the constant-force duhamel solution") {
    const TorusGrid g = TorusGrid::square(32);
    const SpectralField f0 = transform(tu::random_smooth(g, 2, 202, 3.0));
    const ForceFn f = [&](double) { return f0; };
    const double mu = 0.2, dt = 0.05;
    const int n = 10;

    SpectralField u(g, 2);
    SpectralField qf(g, 2);
    for (int s = 0; s < n; ++s) {
        StokesStep step = stokes_step(u, f, mu, s * dt, dt);
        u = std::move(step.u);
        qf = std::move(step.grad_pi);
    }

    // Closed form: u(t) = (1 - e^{-mu |k|^2 t})/(mu |k|^2) P f, and t P f at
    // the mean mode.
    const SpectralField pf = leray_project(f0);
    const Eigen::ArrayXd ksq = ksq_of(g);
    const double t = n * dt;
    double err = 0.0, scale = 0.0;
    for (int c = 0; c < 2; ++c) {
        Eigen::ArrayXcd expected(g.points());
        for (std::int64_t i = 0; i < g.points(); ++i) {
            const double lam = mu * ksq[i];
            expected[i] = pf.comp(c)(i) * (lam == 0.0 ? t : -std::expm1(-lam * t) / lam);
        }
        err = std::max(err, (u.comp(c) - expected).abs().maxCoeff());
        scale = std::max(scale, expected.abs().maxCoeff());
    }
    CHECK(err <= 1e-12 * scale);
    CHECK(tu::max_abs_diff(qf, leray_complement(f0)) == 0.0);
}

TEST_CASE("ns: heat envelope bounds the smoothed stokes flow") {
    const TorusGrid g = TorusGrid::square(64);
    const DyadicDecomposition dec(g);
    const SpectralField a0(g, 1);
    const SpectralField u0 = solenoidal(g, 303, 4.0, 0.3);

    for (double r : {1.0, 2.0}) {
        CAPTURE(r);
        SolverConfig cfg;
        cfg.mu = 0.1;
        cfg.dt = 0.005;
        cfg.t_final = 0.5;
        cfg.r = r;
        cfg.eta = 20.0;
        cfg.monitor_every = 1;
        const RunResult res = run(dec, a0, u0, {}, cfg);
        REQUIRE(res.monitor.has_value());

        const auto rows = res.monitor->smallness();
        const HypothesisStatus* bound = find_row(rows, "stokes-bound");
        const HypothesisStatus* smoothing = find_row(rows, "stokes-smoothing");
        const HypothesisStatus* smallness = find_row(rows, "stokes-smallness");
        REQUIRE(bound != nullptr);
        REQUIRE(smoothing != nullptr);
        REQUIRE(smallness != nullptr);
        // The persistence bound and the gain-of-two-derivatives envelope are
        // theorems for the exact per-mode heat flow; both must hold as
        // measured, and the envelope smallness implies the velocity-space
        // hypothesis on u_L.
        CHECK(bound->holds());
        CHECK(smoothing->holds());
        CHECK(bound->value > 0.0);
        if (smallness->holds()) {
            const HypothesisStatus* h5 = find_row(res.monitor->hypotheses(), "H5");
            REQUIRE(h5 != nullptr);
            CHECK(h5->holds());
        }
    }
}

TEST_CASE("ns: zero coupling keeps the perturbation identically zero") {
    const TorusGrid g = TorusGrid::square(32);
    const DyadicDecomposition dec(g);
    const SpectralField a0(g, 1);
    const SpectralField u0 = shear_flow(g);

    SolverConfig cfg;
    cfg.mu = 0.1;
    cfg.dt = 0.01;
    cfg.t_final = 0.1;
    cfg.monitor_every = 0;
    const RunResult res = run(dec, a0, u0, {}, cfg);

    CHECK(tu::max_abs(res.state.u_tilde) == 0.0);
    CHECK(tu::max_abs(res.state.grad_pi_tilde) == 0.0);
    CHECK(tu::max_abs_diff(res.state.u, res.state.u_l) == 0.0);
    CHECK(tu::max_abs(res.state.a) == 0.0);
    // The shear decays at the exact viscous rate of its |k| = 1 modes.
    const double expected = 0.5 * std::exp(-cfg.mu * cfg.t_final);
    const std::complex<double> c = res.state.u.comp(1)(g.flatten(1, 0));
    CHECK(std::abs(c - expected) <= 1e-13);
}

TEST_CASE("ns: taylor-green decays at the exact viscous rate") {
    const TorusGrid g = TorusGrid::square(32);
    const DyadicDecomposition dec(g);
    const SpectralField a0(g, 1);
    const SpectralField u0 = taylor_green(g, 1.0);

    SolverConfig cfg;
    cfg.mu = 0.05;
    cfg.dt = 0.01;
    cfg.t_final = 0.5;
    cfg.monitor_every = 0;
    const RunResult res = run(dec, a0, u0, {}, cfg);

    const double decay = std::exp(-2.0 * cfg.mu * cfg.t_final);
    double err = 0.0;
    for (int c = 0; c < 2; ++c)
        err = std::max(err,
                       (res.state.u.comp(c) - decay * u0.comp(c)).abs().maxCoeff());
    CHECK(err <= 1e-12);

    // Mean velocity stays zero and the kinetic energy is non-increasing.
    double mean_u = 0.0;
    for (int c = 0; c < 2; ++c) mean_u = std::max(mean_u, std::abs(res.state.u.comp(c)(0)));
    CHECK(mean_u <= 1e-13);
    for (std::size_t i = 1; i < res.energy.size(); ++i)
        CHECK(res.energy[i].kinetic <= res.energy[i - 1].kinetic * (1.0 + 1e-12));
    CHECK(res.energy.back().residual <= 1e-6);
}

TEST_CASE("ns: rest state with variable density stays at rest") {
    const TorusGrid g = TorusGrid::square(32);
    const DyadicDecomposition dec(g);
    const SpectralField a0 = scalar_taper(g, 404, 1.5, 0.3);
    const SpectralField u0(g, 2);

    SolverConfig cfg;
    cfg.mu = 0.1;
    cfg.dt = 0.01;
    cfg.t_final = 0.05;
    cfg.monitor_every = 1;
    const RunResult res = run(dec, a0, u0, {}, cfg);

    CHECK(tu::max_abs(res.state.u) == 0.0);
    CHECK(tu::max_abs_diff(res.state.a, a0) == 0.0);
    CHECK(res.energy.back().kinetic == 0.0);
    CHECK(res.energy.back().residual == 0.0);
    REQUIRE(res.monitor.has_value());
    CHECK(res.monitor->breaches().empty());
}

TEST_CASE("ns: energy equality residual shrinks at second order") {
    const TorusGrid g = TorusGrid::square(64);
    const DyadicDecomposition dec(g);
    const SpectralField a0 = scalar_taper(g, 505, 2.0, 0.1);
    const SpectralField u0 = solenoidal(g, 506, 2.0, 0.25);

    auto residual_at = [&](double dt) {
        SolverConfig cfg;
        cfg.mu = 0.1;
        cfg.dt = dt;
        cfg.t_final = 0.25;
        cfg.splitting = SolverConfig::Splitting::strang;
        cfg.monitor_every = 0;
        const RunResult res = run(dec, a0, u0, {}, cfg);
        double worst = 0.0;
        for (const EnergySample& e : res.energy) worst = std::max(worst, e.residual);
        return worst;
    };

    const double r1 = residual_at(5.0e-3);
    const double r2 = residual_at(2.5e-3);
    CAPTURE(r1);
    CAPTURE(r2);
    CHECK(r2 <= 1e-4);
    CHECK(r2 <= r1 / 3.0);
}

TEST_CASE("ns: self-convergence at second order under step halving") {
    const TorusGrid g = TorusGrid::square(32);
    const DyadicDecomposition dec(g);
    const SpectralField a0 = scalar_taper(g, 607, 1.5, 0.05);
    const SpectralField u0 = solenoidal(g, 608, 1.5, 0.2);
    const double T = 0.25;

    auto terminal = [&](int n) {
        SolverConfig cfg;
        cfg.mu = 0.1;
        cfg.dt = T / n;
        cfg.t_final = T;
        cfg.splitting = SolverConfig::Splitting::strang;
        cfg.monitor_every = 0;
        return run(dec, a0, u0, {}, cfg).state;
    };

    const SolverState s16 = terminal(16);
    const SolverState s32 = terminal(32);
    const SolverState s64 = terminal(64);
    const SolverState s128 = terminal(128);
    auto dist = [](const SolverState& x, const SolverState& y) {
        return l2_norm(x.u - y.u) + l2_norm(x.a - y.a);
    };
    const double d1 = dist(s16, s32);
    const double d2 = dist(s32, s64);
    const double d3 = dist(s64, s128);
    const double order1 = std::log2(d1 / d2);
    const double order2 = std::log2(d2 / d3);
    CAPTURE(d1);
    CAPTURE(d2);
    CAPTURE(d3);
    CHECK(order1 >= 1.7);
    CHECK(order1 <= 2.6);
    CHECK(order2 >= 1.7);
    CHECK(order2 <= 2.6);
}

TEST_CASE("ns: parabolic scaling covariance to round-off") {
    const TorusGrid g = TorusGrid::square(64);
    const DyadicDecomposition dec(g);
    const SpectralField a0 = scalar_taper(g, 709, 2.0, 0.1);
    const SpectralField u0 = solenoidal(g, 710, 2.0, 0.2);

    SolverConfig cfg;
    cfg.mu = 0.1;
    cfg.dt = 0.01;
    cfg.t_final = 0.2;
    cfg.elliptic_tol = 1e-12;
    cfg.monitor_every = 0;
    const double err = scaling_covariance_error(dec, a0, u0, cfg, 2);
    CAPTURE(err);
    CHECK(err <= 1e-10);
}

TEST_CASE("ns: bootstrap monitor accepts smoothed small data") {
    const TorusGrid g = TorusGrid::square(32);
    const DyadicDecomposition dec(g);
    const SpectralField a0 = scalar_taper(g, 811, 1.5, 0.002);
    const SpectralField u0 = solenoidal(g, 812, 1.5, 3.0e-5);

    SolverConfig cfg;
    cfg.mu = 1.0;
    cfg.dt = 0.005;
    cfg.t_final = 0.1;
    cfg.eta = 4.0e-4;
    cfg.smoothing_index = 2;
    cfg.monitor_every = 1;
    const RunResult res = run(dec, a0, u0, {}, cfg);
    REQUIRE(res.monitor.has_value());
    const BootstrapMonitor& mon = *res.monitor;

    // Reference constants.
    CHECK(mon.b_lower() > 0.99);
    CHECK(mon.b_upper() < 1.01);
    CHECK(mon.nu_upper() == cfg.mu);
    CHECK(mon.nu_lower() == mon.b_lower() * cfg.mu);
    CHECK(mon.a0_const() >= 1.0);
    CHECK(mon.u_tilde0_const() ==
          2.0 * cfg.big_c * mon.u0_const() + 4.0 * cfg.big_c * mon.nu_upper() * mon.a0_const());
    CHECK(mon.pi_tilde0_const() == mon.u_tilde0_const());
    CHECK(mon.cutoff_m() >= 0);
    CHECK(mon.z_m() >= 0.0);
    CHECK(mon.script_a() >= 1.0);

    // Every hypothesis holds at every recorded time, with strict margin.
    REQUIRE(res.hypothesis_history.size() == static_cast<std::size_t>(mon.samples()));
    for (const auto& rows : res.hypothesis_history) {
        REQUIRE(rows.size() == 8);
        for (const HypothesisStatus& h : rows) {
            CAPTURE(h.name);
            CHECK(h.holds());
        }
    }
    CHECK(res.hypothesis_history.front()[0].margin() > 0.0);
    CHECK(res.monitor->breaches().empty());
    CHECK_FALSE(res.halted_on_breach);

    // All derived smallness conditions hold for these data too.
    for (const HypothesisStatus& row : mon.smallness()) {
        CAPTURE(row.name);
        CHECK(row.holds());
    }

    // The split-solve reports need their diagnostics recorded.
    CHECK_THROWS_AS(mon.parabolic_estimate(0.5, 1.0), StateError);

    // Out-of-order samples are rejected.
    BootstrapMonitor fresh(dec, cfg, a0, u0, {});
    SolverState st(a0, u0);
    st.t = 1.0;
    fresh.record(st);
    st.t = 0.5;
    CHECK_THROWS_AS(fresh.record(st), ParameterError);
}

TEST_CASE("ns: bootstrap monitor flags a tail breach and suggests a cutoff") {
    const TorusGrid g = TorusGrid::square(32);
    const DyadicDecomposition dec(g);
    // Density with all its mass at |k| = 8: far beyond the imposed cutoff.
    SpectralField a0(g, 1);
    a0.comp(0)(g.flatten(8, 0)) = 0.15;
    a0.comp(0)(g.flatten(g.size(0) - 8, 0)) = 0.15;
    a0.comp(0)(g.flatten(0, 8)) = 0.15;
    a0.comp(0)(g.flatten(0, g.size(1) - 8)) = 0.15;
    const SpectralField u0 = solenoidal(g, 913, 1.5, 5.0e-4);

    SolverConfig cfg;
    cfg.mu = 1.0;
    cfg.dt = 0.01;
    cfg.t_final = 0.02;
    cfg.m_override = 1;
    cfg.monitor_every = 1;

    SUBCASE("warn policy completes the run") {
        const RunResult res = run(dec, a0, u0, {}, cfg);
        REQUIRE(res.monitor.has_value());
        const auto breached = res.monitor->breaches();
        REQUIRE_FALSE(breached.empty());
        CHECK(std::find(breached.begin(), breached.end(), "H1") != breached.end());
        CHECK(res.monitor->suggested_m() == 4);
        CHECK_FALSE(res.halted_on_breach);
        CHECK(res.steps == 2);
        CHECK(res.state.t == doctest::Approx(0.02));
    }

    SUBCASE("halt policy stops at the first breach") {
        cfg.on_breach = SolverConfig::BreachPolicy::halt;
        const RunResult res = run(dec, a0, u0, {}, cfg);
        CHECK(res.halted_on_breach);
        CHECK(res.halt_time == 0.0);
        CHECK(res.steps == 0);
        CHECK(res.state.t == 0.0);
        CHECK(res.hypothesis_history.size() == 1);
    }
}

TEST_CASE("ns: parabolic and pressure reports at admissible indices") {
    const TorusGrid g = TorusGrid::square(32);
    const DyadicDecomposition dec(g);
    const SpectralField a0 = scalar_taper(g, 1015, 1.5, 0.1);
    const SpectralField u0 = solenoidal(g, 1016, 1.5, 0.1);

    SolverConfig cfg;
    cfg.mu = 0.2;
    cfg.dt = 0.01;
    cfg.t_final = 0.05;
    cfg.p2 = 4.0 / 3.0;
    cfg.monitor_every = 1;
    cfg.pressure_split_diagnostics = true;
    const RunResult res = run(dec, a0, u0, {}, cfg);
    REQUIRE(res.monitor.has_value());
    const BootstrapMonitor& mon = *res.monitor;

    // s = N/p2 - 1 = 0.5 admits alpha' = min(1, eps/2, 1/4) > 0.
    const auto par = mon.parabolic_estimate(0.5, 1.0);
    REQUIRE(par.has_value());
    CHECK(par->law_id.find("ns-parabolic") == 0);
    CHECK(par->lhs > 0.0);
    CHECK(par->rhs > 0.0);
    CHECK(std::isfinite(par->rhs));
    CHECK_FALSE(par->degenerate);

    const auto press = mon.pressure_estimate(0.5, 1.0);
    REQUIRE(press.size() == 2);
    for (const InequalityReport& rep : press) {
        CAPTURE(rep.law_id);
        CHECK(rep.lhs > 0.0);
        CHECK(std::isfinite(rep.rhs));
        CHECK(rep.resolution == 32);
    }
    CHECK(press[0].law_id.find("ns-pressure-h") == 0);
    CHECK(press[1].law_id.find("ns-pressure-var") == 0);

    // s = 0 with m_time = 1 leaves no admissible alpha': not applicable.
    CHECK_FALSE(mon.parabolic_estimate(0.0, 1.0).has_value());
    CHECK(mon.pressure_estimate(0.0, 1.0).empty());
    CHECK_THROWS_AS(mon.parabolic_estimate(0.5, 0.5), ParameterError);
}

TEST_CASE("ns: stability experiment scales linearly in the perturbation") {
    const TorusGrid g = TorusGrid::square(32);
    const DyadicDecomposition dec(g);
    const SpectralField a0 = scalar_taper(g, 1117, 1.5, 0.1);
    const SpectralField u0 = solenoidal(g, 1118, 1.5, 0.1);
    const SpectralField da_dir = scalar_taper(g, 1119, 1.5, 1.0);
    const SpectralField du_dir = solenoidal(g, 1120, 1.5, 1.0);

    SolverConfig cfg;
    cfg.mu = 0.2;
    cfg.dt = 0.01;
    cfg.t_final = 0.2;
    cfg.monitor_every = 1;

    std::vector<double> deltas{1e-2, 1e-3, 1e-4};
    std::vector<double> terminal;
    for (double d : deltas) {
        const StabilityReport rep =
            stability_experiment(dec, a0, u0, d * da_dir, d * du_dir, {}, cfg);
        REQUIRE(rep.series.size() >= 2);
        CHECK(rep.initial_size > 0.0);
        CHECK(rep.peak_size >= rep.terminal_size * (1.0 - 1e-12));
        CHECK(rep.amplification() < 100.0);
        CHECK(rep.delta_u_l1 >= 0.0);
        CHECK(std::isfinite(rep.grad_dpi_l1));
        terminal.push_back(rep.terminal_size);
    }
    for (std::size_t i = 0; i + 1 < terminal.size(); ++i) {
        const double slope = std::log10(terminal[i] / terminal[i + 1]);
        CAPTURE(slope);
        CHECK(slope >= 0.9);
        CHECK(slope <= 1.1);
    }

    // A vanishing perturbation stays exactly zero in every recorded norm.
    const StabilityReport zero =
        stability_experiment(dec, a0, u0, SpectralField(g, 1), SpectralField(g, 2), {}, cfg);
    for (const StabilitySample& s : zero.series) {
        CHECK(s.delta_a == 0.0);
        CHECK(s.delta_u == 0.0);
    }
    CHECK(zero.delta_u_l1 == 0.0);
    CHECK(zero.grad_dpi_l1 == 0.0);
}

TEST_CASE("ns: three-dimensional smoke run") {
    const TorusGrid g = TorusGrid::cube(8);
    const DyadicDecomposition dec(g);
    const SpectralField a0 = scalar_taper(g, 1221, 1.2, 0.05);
    const SpectralField u0 = solenoidal(g, 1222, 1.2, 0.01);

    SolverConfig cfg;
    cfg.mu = 0.5;
    cfg.dt = 0.01;
    cfg.t_final = 0.02;
    cfg.monitor_every = 1;
    const RunResult res = run(dec, a0, u0, {}, cfg);

    CHECK(res.steps == 2);
    CHECK(std::isfinite(tu::max_abs(res.state.u)));
    CHECK(divergence_residual(res.state.u) <= cfg.divergence_tol);
    CHECK(res.energy.size() == 3);
    CHECK(res.energy.back().kinetic > 0.0);
    REQUIRE(res.monitor.has_value());
    CHECK(res.monitor->hypotheses().size() == 8);
}
