#include "lpflow/elliptic.hpp"

#include <cmath>

namespace lpflow {

CoefficientField::CoefficientField(const DyadicDecomposition& dec, const SpectralField& a,
                                   double p1)
    : dec_(&dec), a_(a), p1_(p1) {
    require_same_grid(dec.grid(), a.grid());
    if (a.components() != 1) throw ShapeError("CoefficientField: a must be scalar");
    if (!(p1 >= 1.0)) throw ParameterError("CoefficientField: p1 must be >= 1");
    const RealField aphys = inverse_transform(a);
    b_lower_ = 1.0 + aphys.data().col(0).minCoeff();
    if (!(b_lower_ > 0.0))
        throw ParameterError("CoefficientField: 1 + a must be bounded below by a positive constant");
    block_p1_ = dec.block_norms(a_, p1_);
}

double CoefficientField::tail_sum(int m) const {
    const double dim_over_p1 =
        std::isinf(p1_) ? 0.0 : static_cast<double>(dec_->grid().dim()) / p1_;
    double acc = 0.0;
    for (int l = std::max(m, -1); l <= dec_->lmax(); ++l)
        acc += std::pow(2.0, l * dim_over_p1) * block_p1_[l + 1];
    return acc;
}

int CoefficientField::cutoff_index(double c) const {
    if (!(c > 0.0)) throw ParameterError("cutoff_index: threshold must be positive");
    int m = 0;
    while (m <= dec_->lmax() && tail_sum(m) > c) ++m;
    return m;
}

SpectralField CoefficientField::tail_field(int m) const {
    return a_ - dec_->low_pass(a_, m);
}

double CoefficientField::tail_besov_sup(int m) const {
    const double dim_over_p1 =
        std::isinf(p1_) ? 0.0 : static_cast<double>(dec_->grid().dim()) / p1_;
    return dec_->besov_norm(tail_field(m), dim_over_p1, p1_, infinity);
}

double CoefficientField::tail_sup(int m) const { return lp_norm(tail_field(m), infinity); }

SpectralField div_b_grad(const CoefficientField& coef, const SpectralField& pi) {
    const SpectralField gp = gradient(pi);
    return divergence(gp + pointwise_product(coef.a(), gp));
}

PressureSolution solve_pressure(const CoefficientField& coef, const SpectralField& F,
                                double tol, int max_iter) {
    const TorusGrid& g = F.grid();
    require_same_grid(coef.a().grid(), g);
    if (F.components() != g.dim()) throw ShapeError("solve_pressure: F must have dim components");
    if (max_iter < 1) throw ParameterError("solve_pressure: max_iter must be >= 1");

    const SpectralField divF = divergence(F);
    const double nF = l2_norm(divF);
    PressureSolution sol{SpectralField(g, g.dim()), 0, 0.0, {}};
    if (nF == 0.0) return sol;

    const SpectralField QF = leray_complement(F);
    SpectralField grad_pi = QF;
    SpectralField d_prev(g, 1);
    double res_prev = 0.0;
    int growth_streak = 0;

    for (int k = 0; k < max_iter; ++k) {
        // With grad Pi[k] = Q(F - G[k-1]), the exact residual of iterate k is
        // div(G[k]) - div(G[k-1]) where G = a grad Pi.
        const SpectralField G = pointwise_product(coef.a(), grad_pi);
        const SpectralField d = divergence(G);
        const double res = l2_norm(d - d_prev) / nF;
        const double contraction = k > 0 && res_prev > 0.0 ? res / res_prev : 0.0;
        sol.log.push_back({k, res, contraction});

        if (res <= tol) {
            sol.grad_pi = grad_pi;
            sol.iterations = k + 1;
            const SpectralField direct =
                divergence(grad_pi + pointwise_product(coef.a(), grad_pi)) - divF;
            sol.residual = l2_norm(direct) / nF;
            return sol;
        }
        if (k > 0 && res > res_prev) {
            if (++growth_streak >= 5)
                throw ConvergenceError(
                    "solve_pressure: residual grew for five consecutive iterations "
                    "(coefficient too far from unity for the fixed-point contraction)",
                    contraction, k + 1);
        } else {
            growth_streak = 0;
        }

        grad_pi = leray_complement(F - G);
        d_prev = d;
        res_prev = res;
    }
    throw ConvergenceError("solve_pressure: max_iter exhausted before reaching tolerance",
                           res_prev, max_iter);
}

std::pair<PressureSolution, PressureSolution> split_sources(const CoefficientField& coef,
                                                            const SpectralField& f,
                                                            const SpectralField& H, double tol,
                                                            int max_iter) {
    return {solve_pressure(coef, f, tol, max_iter), solve_pressure(coef, H, tol, max_iter)};
}

InequalityReport elliptic_estimate_check(const CoefficientField& coef, const SpectralField& F,
                                         const SpectralField& grad_pi, double sigma, double p,
                                         double r, double alpha) {
    if (!(alpha > 0.0)) throw ParameterError("elliptic_estimate_check: alpha must be positive");
    const DyadicDecomposition& dec = coef.decomposition();
    const double N = dec.grid().dim();
    const double p1 = coef.p1();
    const double dim_over_p1 = std::isinf(p1) ? 0.0 : N / p1;

    InequalityReport rep;
    rep.law_id = "elliptic-regularity";
    rep.s = sigma;
    rep.p = p;
    rep.r = r;
    rep.lhs = coef.b_lower() * dec.besov_norm(grad_pi, sigma, p, r);
    const double grad_b = dec.besov_norm(gradient(coef.a()), dim_over_p1 + alpha - 1.0, p1, r);
    const double amp = 1.0 + grad_b / coef.b_lower();
    rep.rhs = std::pow(amp, std::abs(sigma) / std::min(1.0, alpha)) *
              dec.besov_norm(leray_complement(F), sigma, p, r);
    rep.degenerate = !(rep.rhs > 0.0);
    return rep;
}

}  // namespace lpflow
