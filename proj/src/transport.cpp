#include "lpflow/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include "lpflow/errors.hpp"
#include "lpflow/fft.hpp"
#include "lpflow/operators.hpp"

namespace lpflow {

namespace {

double inv(double q) { return std::isinf(q) ? 0.0 : 1.0 / q; }

/// 1/p' for the conjugate exponent of p.
double inv_conjugate(double p) { return 1.0 - inv(p); }

void require(bool ok, const std::string& what) {
    if (!ok) throw ParameterError("transport: " + what);
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

void check_indices(double sigma, double p, double p1, int dim, double lower_shift) {
    require(p >= 1.0, "p must be >= 1");
    require(p1 >= 1.0, "p1 must be >= 1");
    require(p <= p1, "requires p <= p1");
    const double lower = lower_shift - dim * std::min(inv(p1), inv_conjugate(p));
    require(sigma > lower, "sigma at or below the admissible lower index");
    require(sigma < 1.0 + dim * inv(p1), "sigma at or above 1 + N/p1");
}

}  // namespace

void TransportConfig::validate() const {
    if (!(dt > 0.0)) throw ParameterError("transport: dt must be positive");
    if (!(t_final > 0.0)) throw ParameterError("transport: t_final must be positive");
    if (!(cfl_limit > 0.0)) throw ParameterError("transport: cfl_limit must be positive");
    if (!(dealias_fraction > 0.0) || !(dealias_fraction <= 1.0))
        throw ParameterError("transport: dealias_fraction must lie in (0, 1]");
    if (record_every < 1) throw ParameterError("transport: record_every must be >= 1");
    if (!(p >= 1.0)) throw ParameterError("transport: p must be >= 1");
    for (double p1 : p1_list)
        if (!(p1 >= 1.0)) throw ParameterError("transport: p1 entries must be >= 1");
}

TransportTrajectory::TransportTrajectory(const DyadicDecomposition& dec, double p,
                                         std::vector<double> p1_list, bool with_source)
    : dec_(&dec), p1_list_(std::move(p1_list)), scalar_(dec, p) {
    for (double p1 : p1_list_)
        if (!(p1 >= 1.0)) throw ParameterError("trajectory: p1 entries must be >= 1");
    if (with_source) source_.emplace(dec, p);
}

void TransportTrajectory::record(double t, const SpectralField& a, const SpectralField& v,
                                 const SpectralField* g) {
    require_same_grid(dec_->grid(), a.grid());
    if (a.components() != 1) throw ShapeError("trajectory: scalar field expected");
    scalar_.record(t, a);
    if (source_) {
        if (g == nullptr) throw StateError("trajectory: source sample missing");
        source_->record(t, *g);
    }
    const RealField ar = inverse_transform(a);
    mass_.push_back(mean_mode(a).real());
    l2_.push_back(l2_norm(a));
    min_.push_back(ar.comp(0).minCoeff());
    max_.push_back(ar.comp(0).maxCoeff());
    const int nj = dec_->lmax() + 2;
    Eigen::ArrayXd grads(static_cast<int>(p1_list_.size()) * nj);
    for (std::size_t k = 0; k < p1_list_.size(); ++k)
        for (int j = 0; j < nj; ++j)
            grads[static_cast<int>(k) * nj + j] =
                lp_norm(inverse_transform(gradient(dec_->low_pass(v, j))), p1_list_[k]);
    grad_lowpass_.push_back(std::move(grads));
    if (!initial_) initial_ = a;
    latest_ = a;
}

const CheminLernerAccumulator& TransportTrajectory::source() const {
    if (!source_) throw StateError("trajectory: no source recorded");
    return *source_;
}

const SpectralField& TransportTrajectory::initial_state() const {
    if (!initial_) throw StateError("trajectory: no samples recorded");
    return *initial_;
}

const SpectralField& TransportTrajectory::final_state() const {
    if (!latest_) throw StateError("trajectory: no samples recorded");
    return *latest_;
}

int TransportTrajectory::p1_slot(double p1) const {
    for (std::size_t k = 0; k < p1_list_.size(); ++k)
        if (p1_list_[k] == p1 || (std::isinf(p1_list_[k]) && std::isinf(p1)))
            return static_cast<int>(k);
    throw ParameterError("trajectory: requested p1 was not recorded");
}

double TransportTrajectory::v_prime_at(int i, double p1, double alpha) const {
    if (!(alpha >= 0.0) || !(alpha <= 1.0))
        throw ParameterError("trajectory: alpha must lie in [0, 1]");
    const int slot = p1_slot(p1);
    const int nj = dec_->lmax() + 2;
    const Eigen::ArrayXd& grads = grad_lowpass_.at(static_cast<std::size_t>(i));
    const double dim_over_p1 = std::isinf(p1) ? 0.0 : dec_->grid().dim() / p1;
    double best = 0.0;
    for (int j = 0; j < nj; ++j) {
        const double weight = std::pow(2.0, j * dim_over_p1) / std::pow(j + 1.0, alpha);
        best = std::max(best, weight * grads[slot * nj + j]);
    }
    return best;
}

std::vector<double> TransportTrajectory::v_prime_series(double p1, double alpha) const {
    std::vector<double> out(static_cast<std::size_t>(samples()));
    for (int i = 0; i < samples(); ++i)
        out[static_cast<std::size_t>(i)] = v_prime_at(i, p1, alpha);
    return out;
}

std::vector<double> TransportTrajectory::v_integral_series(double p1, double alpha) const {
    const std::vector<double> vp = v_prime_series(p1, alpha);
    std::vector<double> out(vp.size(), 0.0);
    for (std::size_t i = 1; i < vp.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (time(static_cast<int>(i)) - time(static_cast<int>(i) - 1)) *
                                  (vp[i] + vp[i - 1]);
    return out;
}

double TransportTrajectory::v_integral(double p1, double alpha) const {
    const std::vector<double> cum = v_integral_series(p1, alpha);
    return cum.empty() ? 0.0 : cum.back();
}

std::vector<double> TransportTrajectory::times() const {
    std::vector<double> out(static_cast<std::size_t>(samples()));
    for (int i = 0; i < samples(); ++i) out[static_cast<std::size_t>(i)] = time(i);
    return out;
}

namespace {

/// Velocity sample shared by the Runge-Kutta stages: the dealiased spectral
/// field drives the advection product, the real-space view the CFL check.
struct VelocitySample {
    double t;
    SpectralField hat;
    RealField real;
};

class Stepper {
public:
    Stepper(const DyadicDecomposition& dec, const VelocityFn& v, const SourceFn& g,
            const TransportConfig& cfg, double dt)
        : dec_(dec), v_(v), g_(g), cfg_(cfg), dt_(dt) {}

    const VelocitySample& velocity(double t) {
        if (cache_ && cache_->t == t) return *cache_;
        SpectralField raw = v_(t);
        require_same_grid(dec_.grid(), raw.grid());
        if (raw.components() != raw.grid().dim())
            throw ShapeError("transport: velocity needs dim components");
        const double div_res = divergence_residual(raw);
        if (div_res > cfg_.divergence_tol)
            throw ParameterError("transport: velocity is not divergence-free (residual " +
                                 std::to_string(div_res) + ")");
        SpectralField hat = dealias(raw, cfg_.dealias_fraction);
        RealField real = inverse_transform(hat);
        cache_.emplace(VelocitySample{t, std::move(hat), std::move(real)});
        const TorusGrid& grid = dec_.grid();
        double cfl = 0.0;
        for (int axis = 0; axis < grid.dim(); ++axis) {
            const double vmax = cache_->real.comp(axis).abs().maxCoeff();
            cfl = std::max(cfl, vmax * dt_ / grid.spacing(axis));
        }
        if (cfl > cfg_.cfl_limit * (1.0 + 1e-12))
            throw StabilityError("transport: CFL number " + std::to_string(cfl) +
                                     " exceeds the limit",
                                 cfl, cfg_.cfl_limit);
        return *cache_;
    }

    /// d/dt a = g - v . grad a, with the advection product dealiased.
    SpectralField rhs(double t, const SpectralField& a) {
        const VelocitySample& vs = velocity(t);
        const RealField grad_a =
            inverse_transform(dealias(gradient(a), cfg_.dealias_fraction));
        RealField prod(a.grid(), 1);
        for (int axis = 0; axis < a.grid().dim(); ++axis)
            prod.comp(0) += vs.real.comp(axis) * grad_a.comp(axis);
        SpectralField out = dealias(transform(prod), cfg_.dealias_fraction);
        out *= -1.0;
        if (g_) out += g_(t, a);
        return out;
    }

    /// Classical third-order Runge-Kutta in increment form, so a vanishing
    /// right-hand side reproduces the state exactly.
    SpectralField step(double t, const SpectralField& a) {
        const SpectralField k1 = rhs(t, a);
        const SpectralField k2 = rhs(t + 0.5 * dt_, a + (0.5 * dt_) * k1);
        const SpectralField k3 = rhs(t + dt_, a - dt_ * k1 + (2.0 * dt_) * k2);
        return a + (dt_ / 6.0) * (k1 + 4.0 * k2 + k3);
    }

private:
    const DyadicDecomposition& dec_;
    const VelocityFn& v_;
    const SourceFn& g_;
    const TransportConfig& cfg_;
    double dt_;
    std::optional<VelocitySample> cache_;
};

}  // namespace

TransportTrajectory advect(const DyadicDecomposition& dec, const SpectralField& a0,
                           const VelocityFn& v, const SourceFn& g, const TransportConfig& cfg) {
    cfg.validate();
    require_same_grid(dec.grid(), a0.grid());
    if (a0.components() != 1) throw ShapeError("transport: scalar initial data expected");
    if (!v) throw ParameterError("transport: velocity function required");

    const long n_steps = std::max<long>(1, std::lround(std::ceil(cfg.t_final / cfg.dt - 1e-9)));
    const double dt = cfg.t_final / static_cast<double>(n_steps);

    Stepper stepper(dec, v, g, cfg, dt);
    TransportTrajectory traj(dec, cfg.p, cfg.p1_list, static_cast<bool>(g));

    auto sample_source = [&](double t, const SpectralField& a) {
        return g ? std::optional<SpectralField>(g(t, a)) : std::nullopt;
    };

    SpectralField a = a0;
    {
        const VelocitySample& vs = stepper.velocity(0.0);
        const auto g0 = sample_source(0.0, a);
        traj.record(0.0, a, vs.hat, g0 ? &*g0 : nullptr);
    }
    for (long s = 1; s <= n_steps; ++s) {
        const double t_prev = dt * static_cast<double>(s - 1);
        a = stepper.step(t_prev, a);
        if (s % cfg.record_every == 0 || s == n_steps) {
            const double t = dt * static_cast<double>(s);
            const VelocitySample& vs = stepper.velocity(t);
            const auto gs = sample_source(t, a);
            traj.record(t, a, vs.hat, gs ? &*gs : nullptr);
        }
    }
    return traj;
}

SpectralField transport_step(const SpectralField& a, const SpectralField& v, double dt,
                             double dealias_fraction) {
    require_same_grid(a.grid(), v.grid());
    if (a.components() != 1) throw ShapeError("transport: scalar state expected");
    if (v.components() != v.grid().dim())
        throw ShapeError("transport: velocity needs dim components");
    const RealField vr = inverse_transform(dealias(v, dealias_fraction));
    auto rhs = [&](const SpectralField& x) {
        const RealField grad_x = inverse_transform(dealias(gradient(x), dealias_fraction));
        RealField prod(x.grid(), 1);
        for (int axis = 0; axis < x.grid().dim(); ++axis)
            prod.comp(0) += vr.comp(axis) * grad_x.comp(axis);
        SpectralField out = dealias(transform(prod), dealias_fraction);
        out *= -1.0;
        return out;
    };
    const SpectralField k1 = rhs(a);
    const SpectralField k2 = rhs(a + (0.5 * dt) * k1);
    const SpectralField k3 = rhs(a - dt * k1 + (2.0 * dt) * k2);
    return a + (dt / 6.0) * (k1 + 4.0 * k2 + k3);
}

void LossSchedule::validate() const {
    if (!(lambda > 0.0)) throw ParameterError("loss schedule: lambda must be positive");
    if (!(p1 >= 1.0)) throw ParameterError("loss schedule: p1 must be >= 1");
    for (double wi : w)
        if (!(wi >= 0.0)) throw ParameterError("loss schedule: W must be nonnegative");
}

std::vector<double> loss_schedule_series(const TransportTrajectory& traj,
                                         const LossSchedule& sched) {
    sched.validate();
    const int n = traj.samples();
    if (n == 0) return {};
    if (!sched.w.empty() && static_cast<int>(sched.w.size()) != n)
        throw ShapeError("loss schedule: W samples must match the trajectory");
    const std::vector<double> vp = traj.v_prime_series(sched.p1, 1.0);
    std::vector<double> rate(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        rate[static_cast<std::size_t>(i)] =
            vp[static_cast<std::size_t>(i)] +
            (sched.w.empty() ? 0.0 : sched.w[static_cast<std::size_t>(i)]);
    std::vector<double> out(static_cast<std::size_t>(n));
    double cum = 0.0;
    out[0] = sched.sigma;
    for (int i = 1; i < n; ++i) {
        cum += 0.5 * (traj.time(i) - traj.time(i - 1)) *
               (rate[static_cast<std::size_t>(i)] + rate[static_cast<std::size_t>(i - 1)]);
        out[static_cast<std::size_t>(i)] = sched.sigma - sched.lambda * cum;
    }
    return out;
}

namespace {

/// Initial-data Besov norm plus the time-integrated source norm, both at
/// (sigma, p, inf) — the data bracket shared by the limited-loss bounds.
double data_norm(const TransportTrajectory& traj, double sigma) {
    double out = traj.scalar().besov_at(0, sigma, infinity);
    if (traj.has_source()) out += traj.source().chemin_lerner(1.0, sigma, infinity);
    return out;
}

InequalityReport make_report(const TransportTrajectory& traj, std::string law_id, double sigma,
                             double p, double lhs, double rhs) {
    InequalityReport rep;
    rep.law_id = std::move(law_id);
    rep.s = sigma;
    rep.p = p;
    rep.r = infinity;
    rep.lhs = lhs;
    rep.rhs = rhs;
    rep.resolution = traj.decomposition().grid().size(0);
    rep.degenerate = !(rhs > 0.0) || !std::isfinite(rhs);
    return rep;
}

void check_limited_params(const TransportTrajectory& traj, double sigma, double eps, double p,
                          double p1, double alpha) {
    require(eps > 0.0, "eps must be positive");
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    require(traj.scalar().p() == p, "trajectory recorded at a different exponent p");
    check_indices(sigma, p, p1, traj.decomposition().grid().dim(), -1.0);
}

}  // namespace

InequalityReport limited_loss_report(const TransportTrajectory& traj, double sigma, double eps,
                                     double p, double p1, double alpha) {
    check_limited_params(traj, sigma, eps, p, p1, alpha);
    const double lhs = traj.scalar().chemin_lerner(infinity, sigma - eps, infinity);
    const double v_total = traj.v_integral(p1, alpha);
    const double expo = std::pow(eps, -alpha / (1.0 - alpha)) *
                        std::pow(v_total, 1.0 / (1.0 - alpha));
    const double rhs = data_norm(traj, sigma) * std::exp(expo);
    return make_report(traj, "transport-limited-loss[eps=" + num(eps) + "]", sigma, p, lhs, rhs);
}

InequalityReport limited_loss_tail_report(const TransportTrajectory& traj, double sigma,
                                          double eps, double p, double p1, double alpha, int m,
                                          double eta) {
    check_limited_params(traj, sigma, eps, p, p1, alpha);
    require(eta > 0.0, "eta must be positive");
    const double lhs = traj.scalar().chemin_lerner_tail(infinity, sigma - eps, 1.0, m);
    const double tail0 = traj.scalar().besov_tail_at(0, sigma, 1.0, m);
    const double data = data_norm(traj, sigma);
    const std::vector<double> vp = traj.v_prime_series(p1, alpha);
    const std::vector<double> vcum = traj.v_integral_series(p1, alpha);
    std::vector<double> integrand(vp.size());
    const double eps_pow = std::pow(eps, -alpha / (1.0 - alpha));
    for (std::size_t i = 0; i < vp.size(); ++i)
        integrand[i] = vp[i] * std::exp(eps_pow * std::pow(vcum[i], 1.0 / (1.0 - alpha)));
    const double integral = trapezoid(traj.times(), integrand);
    const double rhs = tail0 + std::pow(eta, alpha / (1.0 - alpha)) * data * integral;
    return make_report(traj,
                       "transport-limited-loss-tail[eps=" + num(eps) + ",eta=" + num(eta) +
                           ",m=" + std::to_string(m) + "]",
                       sigma, p, lhs, rhs);
}

namespace {

InequalityReport linear_loss_common(const TransportTrajectory& traj, const LossSchedule& sched,
                                    const std::vector<double>& g1_besov, double c_margin,
                                    std::string law_id, const std::function<double(int)>& lhs_at) {
    sched.validate();
    require(c_margin >= 0.0, "c_margin must be nonnegative");
    require(sched.lambda > c_margin, "lambda must exceed the constant margin");
    const double p = traj.scalar().p();
    const int dim = traj.decomposition().grid().dim();
    check_indices(sched.sigma, p, sched.p1, dim, 0.0);
    require(sched.sigma > sched.s1, "sigma must exceed the floor index s1");

    const std::vector<double> sigma_t = loss_schedule_series(traj, sched);
    for (int i = 0; i < traj.samples(); ++i)
        if (sigma_t[static_cast<std::size_t>(i)] < sched.s1 - 1e-12)
            throw ScheduleError("transport: drifting index fell below the floor", traj.time(i));

    double lhs = 0.0;
    for (int i = 0; i < traj.samples(); ++i) lhs = std::max(lhs, lhs_at(i));

    double g1_int = 0.0;
    if (!g1_besov.empty()) {
        if (static_cast<int>(g1_besov.size()) != traj.samples())
            throw ShapeError("transport: g1 samples must match the trajectory");
        g1_int = trapezoid(traj.times(), g1_besov);
    }
    const double prefactor = sched.lambda / (sched.lambda - c_margin);
    const double rhs =
        prefactor * (traj.scalar().besov_at(0, sched.sigma, infinity) + g1_int);
    return make_report(traj, std::move(law_id), sched.sigma, p, lhs, rhs);
}

}  // namespace

InequalityReport linear_loss_report(const TransportTrajectory& traj, const LossSchedule& sched,
                                    const std::vector<double>& g1_besov, double c_margin) {
    const std::vector<double> sigma_t = loss_schedule_series(traj, sched);
    return linear_loss_common(traj, sched, g1_besov, c_margin, "transport-linear-loss",
                              [&](int i) {
                                  return traj.scalar().besov_at(
                                      i, sigma_t[static_cast<std::size_t>(i)], infinity);
                              });
}

InequalityReport linear_loss_tail_report(const TransportTrajectory& traj,
                                         const LossSchedule& sched,
                                         const std::vector<double>& g1_besov, int m,
                                         double c_margin) {
    const std::vector<double> sigma_t = loss_schedule_series(traj, sched);
    return linear_loss_common(traj, sched, g1_besov, c_margin,
                              "transport-linear-loss-tail[m=" + std::to_string(m) + "]",
                              [&](int i) {
                                  return traj.scalar().besov_tail_at(
                                      i, sigma_t[static_cast<std::size_t>(i)], 1.0, m);
                              });
}

}  // namespace lpflow
