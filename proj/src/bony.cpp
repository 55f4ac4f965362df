#include "lpflow/bony.hpp"

#include <cmath>
#include <string>

namespace lpflow {

namespace {

int product_components(const SpectralField& a, const SpectralField& b) {
    if (a.components() == b.components()) return a.components();
    if (a.components() == 1) return b.components();
    if (b.components() == 1) return a.components();
    throw ShapeError("bony: incompatible component counts in product");
}

double inv(double q) { return std::isinf(q) ? 0.0 : 1.0 / q; }

void req(bool ok, const std::string& msg) {
    if (!ok) throw ParameterError("product law: " + msg);
}

}  // namespace

SpectralField paraproduct(const DyadicDecomposition& dec, const SpectralField& u,
                          const SpectralField& v) {
    require_same_grid(u.grid(), v.grid());
    require_same_grid(dec.grid(), u.grid());
    SpectralField out(u.grid(), product_components(u, v));
    for (int q = 1; q <= dec.lmax(); ++q)
        out += pointwise_product(dec.low_pass(u, q - 1), dec.block(v, q));
    return out;
}

SpectralField remainder(const DyadicDecomposition& dec, const SpectralField& u,
                        const SpectralField& v) {
    require_same_grid(u.grid(), v.grid());
    require_same_grid(dec.grid(), u.grid());
    SpectralField out(u.grid(), product_components(u, v));
    for (int q = -1; q <= dec.lmax(); ++q) {
        SpectralField near = dec.block(v, q - 1) + dec.block(v, q) + dec.block(v, q + 1);
        out += pointwise_product(dec.block(u, q), near);
    }
    return out;
}

SpectralField paraproduct_tilde(const DyadicDecomposition& dec, const SpectralField& u,
                                const SpectralField& v) {
    require_same_grid(u.grid(), v.grid());
    require_same_grid(dec.grid(), u.grid());
    SpectralField out(u.grid(), product_components(u, v));
    for (int q = -1; q <= dec.lmax(); ++q)
        out += pointwise_product(dec.low_pass(u, q + 2), dec.block(v, q));
    return out;
}

SpectralField commutator_block(const DyadicDecomposition& dec, const SpectralField& a,
                               const SpectralField& w, int axis, int q) {
    require_same_grid(a.grid(), w.grid());
    const SpectralField adw = pointwise_product(a, derivative(w, axis));
    const SpectralField a_dqw = pointwise_product(a, dec.block(w, q));
    return dec.block(adw, q) - derivative(a_dqw, axis);
}

CommutatorSplit commutator_split(const DyadicDecomposition& dec, const SpectralField& a,
                                 const SpectralField& w, int axis, int q) {
    const SpectralField da = derivative(a, axis);
    const SpectralField dw = derivative(w, axis);
    const SpectralField dqw = dec.block(w, q);
    return CommutatorSplit{
        derivative(dec.block(paraproduct(dec, a, w), q) - paraproduct(dec, a, dqw), axis),
        dec.block(paraproduct(dec, da, w), q),
        dec.block(paraproduct(dec, dw, a), q),
        dec.block(remainder(dec, dw, a), q),
        derivative(paraproduct_tilde(dec, dqw, a), axis)};
}

SpectralField commutator_bracket(const DyadicDecomposition& dec, const SpectralField& a,
                                 const SpectralField& w, int q, int qprime) {
    const SpectralField sa = dec.low_pass(a, qprime - 1);
    const SpectralField dqw = dec.block(w, qprime);
    return dec.block(pointwise_product(sa, dqw), q) -
           pointwise_product(sa, dec.block(dqw, q));
}

const char* ProductLawCase::id() const {
    switch (law) {
        case ProductLaw::law22: return "2.2";
        case ProductLaw::law23: return "2.3";
        case ProductLaw::law24: return "2.4";
        case ProductLaw::law25: return "2.5";
        case ProductLaw::corollary: return "corollary";
    }
    return "?";
}

void ProductLawCase::validate(int dim) const {
    const double N = dim;
    req(p >= 1.0 && r >= 1.0 && p1 >= 1.0 && p2 >= 1.0 && lambda1 >= 1.0 && lambda2 >= 1.0,
        "integrability and summation indices must be >= 1");
    const bool shared_preamble = law == ProductLaw::law23 || law == ProductLaw::law24;
    if (shared_preamble) {
        req(inv(p) <= inv(p1) + inv(p2), "requires 1/p <= 1/p1 + 1/p2");
        req(p1 <= lambda2, "requires p1 <= lambda2");
        req(p2 <= lambda1, "requires p2 <= lambda1");
        req(inv(p) <= inv(p1) + inv(lambda1), "requires 1/p <= 1/p1 + 1/lambda1");
        req(inv(p) <= inv(p2) + inv(lambda2), "requires 1/p <= 1/p2 + 1/lambda2");
    }
    switch (law) {
        case ProductLaw::law22:
            break;  // every s in R, (p,r) in [1,inf]^2
        case ProductLaw::law23:
            req(s1 + s2 + N * std::min(0.0, 1.0 - inv(p1) - inv(p2)) > 0.0,
                "law 2.3 requires s1 + s2 + N inf(0, 1 - 1/p1 - 1/p2) > 0");
            req(s1 + N * inv(lambda2) < N * inv(p1), "law 2.3 requires s1 + N/lambda2 < N/p1");
            req(s2 + N * inv(lambda1) < N * inv(p2), "law 2.3 requires s2 + N/lambda1 < N/p2");
            break;
        case ProductLaw::law24:
            req(s1 + s2 == 0.0, "law 2.4 requires s1 + s2 = 0");
            req(inv(p1) + inv(p2) <= 1.0, "law 2.4 requires 1/p1 + 1/p2 <= 1");
            req(s1 > N * inv(lambda1) - N * inv(p2), "law 2.4 requires s1 > N/lambda1 - N/p2");
            req(s1 <= N * inv(p1) - N * inv(lambda2), "law 2.4 requires s1 <= N/p1 - N/lambda2");
            break;
        case ProductLaw::law25:
            if (p >= 2.0)
                req(std::abs(s) < N * inv(p), "law 2.5 requires |s| < N/p when p >= 2");
            else
                req(-N * (1.0 - inv(p)) < s && s < N * inv(p),
                    "law 2.5 requires -N/p' < s < N/p when p < 2");
            break;
        case ProductLaw::corollary:
            req(p <= p1, "corollary requires p <= p1");
            if (inv(p) + inv(p1) <= 1.0)
                req(-N * inv(p1) < s && s < N * inv(p1),
                    "corollary requires s in (-N/p1, N/p1) when 1/p + 1/p1 <= 1");
            else
                req(-N * inv(p1) + N * (inv(p) + inv(p1) - 1.0) < s && s < N * inv(p1),
                    "corollary requires s in (-N/p1 + N(1/p + 1/p1 - 1), N/p1)");
            break;
    }
}

InequalityReport product_law_check(const DyadicDecomposition& dec, const ProductLawCase& cse,
                                   const SpectralField& u, const SpectralField& v) {
    cse.validate(dec.grid().dim());
    require_same_grid(u.grid(), v.grid());
    require_same_grid(dec.grid(), u.grid());
    const double N = dec.grid().dim();
    const SpectralField uv = pointwise_product(u, v);

    InequalityReport rep;
    rep.law_id = cse.id();
    switch (cse.law) {
        case ProductLaw::law22:
            rep.s = cse.s;
            rep.p = cse.p;
            rep.r = cse.r;
            rep.lhs = dec.besov_norm(uv, cse.s, cse.p, cse.r);
            rep.rhs = lp_norm(u, infinity) * dec.besov_norm(v, cse.s, cse.p, cse.r) +
                      lp_norm(v, infinity) * dec.besov_norm(u, cse.s, cse.p, cse.r);
            break;
        case ProductLaw::law23: {
            const double sl = cse.s1 + cse.s2 - N * (inv(cse.p1) + inv(cse.p2) - inv(cse.p));
            rep.s = sl;
            rep.p = cse.p;
            rep.r = cse.r;
            rep.lhs = dec.besov_norm(uv, sl, cse.p, cse.r);
            rep.rhs = dec.besov_norm(u, cse.s1, cse.p1, cse.r) *
                      dec.besov_norm(v, cse.s2, cse.p2, infinity);
            break;
        }
        case ProductLaw::law24: {
            const double sl = -N * (inv(cse.p1) + inv(cse.p2) - inv(cse.p));
            rep.s = sl;
            rep.p = cse.p;
            rep.r = infinity;
            rep.lhs = dec.besov_norm(uv, sl, cse.p, infinity);
            rep.rhs = dec.besov_norm(u, cse.s1, cse.p1, 1.0) *
                      dec.besov_norm(v, cse.s2, cse.p2, infinity);
            break;
        }
        case ProductLaw::law25:
            rep.s = cse.s;
            rep.p = cse.p;
            rep.r = cse.r;
            rep.lhs = dec.besov_norm(uv, cse.s, cse.p, cse.r);
            rep.rhs = dec.besov_norm(u, cse.s, cse.p, cse.r) *
                      std::max(dec.besov_norm(v, N * inv(cse.p), cse.p, infinity),
                               lp_norm(v, infinity));
            break;
        case ProductLaw::corollary:
            rep.s = cse.s;
            rep.p = cse.p;
            rep.r = cse.r;
            rep.lhs = dec.besov_norm(uv, cse.s, cse.p, cse.r);
            rep.rhs = dec.besov_norm(u, cse.s, cse.p, cse.r) *
                      std::max(dec.besov_norm(v, N * inv(cse.p1), cse.p1, infinity),
                               lp_norm(v, infinity));
            break;
    }
    rep.degenerate = !(rep.rhs > 0.0);
    return rep;
}

InequalityReport commutator_estimate_check(const DyadicDecomposition& dec,
                                           const SpectralField& a, const SpectralField& w,
                                           int axis, double sigma, double p, double p1,
                                           double r, double alpha) {
    require_same_grid(a.grid(), w.grid());
    require_same_grid(dec.grid(), a.grid());
    const double N = dec.grid().dim();
    req(p >= 1.0 && p1 >= 1.0 && r >= 1.0, "commutator estimate needs p, p1, r >= 1");
    req(alpha > 1.0 - N * inv(p) && alpha < 1.0,
        "commutator estimate needs alpha in (1 - N/p, 1)");
    req(sigma >= -N * inv(p1) && sigma <= N * inv(p1) + alpha,
        "commutator estimate needs -N/p1 <= sigma <= N/p1 + alpha");
    const bool limit = sigma == -N * inv(p1);

    Eigen::ArrayXd blocks(dec.block_count());
    for (int q = dec.lmin(); q <= dec.lmax(); ++q)
        blocks(q + 1) = lp_norm(commutator_block(dec, a, w, axis, q), p);

    InequalityReport rep;
    rep.law_id = limit ? "commutator-estimate-limit" : "commutator-estimate";
    rep.s = sigma;
    rep.p = p;
    rep.r = limit ? infinity : r;
    rep.lhs = DyadicDecomposition::weighted_lr(blocks, sigma, rep.r);
    rep.rhs = limit ? dec.besov_norm(a, alpha + N * inv(p1), p, 1.0) *
                          dec.besov_norm(w, -N * inv(p1) + 1.0 - alpha, p, infinity)
                    : dec.besov_norm(a, N * inv(p1) + alpha, p1, r) *
                          dec.besov_norm(w, sigma + 1.0 - alpha, p, r);
    rep.degenerate = !(rep.rhs > 0.0);
    return rep;
}

}  // namespace lpflow
