#pragma once

#include "lpflow/inequality.hpp"
#include "lpflow/littlewood_paley.hpp"

namespace lpflow {

/// Bony paraproduct T_u v = sum_{q} S_{q-1}u . Delta_q v (terms with
/// q <= 0 vanish since S_{-2} = S_{-1} = 0). Products are pointwise on the
/// native grid; no dealiasing is applied inside the operator, so the
/// decomposition identities below hold exactly on the lattice.
SpectralField paraproduct(const DyadicDecomposition& dec, const SpectralField& u,
                          const SpectralField& v);

/// Remainder R(u,v) = sum_q Delta_q u (Delta_{q-1} + Delta_q + Delta_{q+1}) v,
/// symmetric in (u,v) term by term.
SpectralField remainder(const DyadicDecomposition& dec, const SpectralField& u,
                        const SpectralField& v);

/// T'_u v = T_u v + R(u,v) = sum_q S_{q+2}u . Delta_q v.
SpectralField paraproduct_tilde(const DyadicDecomposition& dec, const SpectralField& u,
                                const SpectralField& v);

/// Commutator of the dyadic block with multiplication by a along a derivative:
/// R_q = Delta_q(a d_k w) - d_k(a Delta_q w).
SpectralField commutator_block(const DyadicDecomposition& dec, const SpectralField& a,
                               const SpectralField& w, int axis, int q);

/// Five-term split of the block commutator,
///   R_q = r1 - r2 + r3 + r4 - r5,
/// with r1 = d_k [Delta_q, T_a] w,    r2 = Delta_q T_{d_k a} w,
///      r3 = Delta_q T_{d_k w} a,     r4 = Delta_q R(d_k w, a),
///      r5 = d_k T'_{Delta_q w} a.
/// The recombination is algebraically exact; on the lattice it is exact to
/// round-off provided no intermediate product aliases (band-limit inputs to
/// a quarter of the grid per axis to guarantee that).
struct CommutatorSplit {
    SpectralField r1, r2, r3, r4, r5;
    SpectralField recombined() const { return r1 - r2 + r3 + r4 - r5; }
};
CommutatorSplit commutator_split(const DyadicDecomposition& dec, const SpectralField& a,
                                 const SpectralField& w, int axis, int q);

/// The elementary bracket inside r1: [Delta_q, S_{q'-1}a] Delta_{q'} w.
/// With the default shell parameter it vanishes (alias-free inputs) unless
/// q' - 2 <= q <= q' + 5 ... i.e. q' in [q - 2, q + 5].
SpectralField commutator_bracket(const DyadicDecomposition& dec, const SpectralField& a,
                                 const SpectralField& w, int q, int qprime);

/// Which product law an index case instantiates.
enum class ProductLaw { law22, law23, law24, law25, corollary };

/// Index tuple for one product-law instance. Fields not used by the selected
/// law are ignored. lambda1/lambda2 default to infinity (the least binding
/// admissible choice); the harness may set them per the 1/lambda = 1/p1 - 1/p2
/// convention.
struct ProductLawCase {
    ProductLaw law = ProductLaw::law22;
    double s = 0.0;        // laws 2.2, 2.5, corollary
    double s1 = 0.0;       // laws 2.3, 2.4
    double s2 = 0.0;
    double p = 2.0;
    double p1 = 2.0;
    double p2 = 2.0;
    double r = 2.0;
    double lambda1 = infinity;
    double lambda2 = infinity;

    const char* id() const;
    /// Throws ParameterError naming the violated constraint.
    void validate(int dim) const;
};

/// Evaluate the selected law on the pair (u, v):
///   2.2:  ||uv||_{B^s_{p,r}} <= C (||u||_inf ||v||_{B^s_{p,r}} + ||v||_inf ||u||_{B^s_{p,r}})
///   2.3:  ||uv||_{B^{s1+s2-N(1/p1+1/p2-1/p)}_{p,r}} <= C ||u||_{B^{s1}_{p1,r}} ||v||_{B^{s2}_{p2,inf}}
///   2.4:  ||uv||_{B^{-N(1/p1+1/p2-1/p)}_{p,inf}} <= C ||u||_{B^{s1}_{p1,1}} ||v||_{B^{s2}_{p2,inf}}
///   2.5:  ||uv||_{B^s_{p,r}} <= C ||u||_{B^s_{p,r}} max(||v||_{B^{N/p}_{p,inf}}, ||v||_inf)
///   cor:  ||uv||_{B^s_{p,r}} <= C ||u||_{B^s_{p,r}} max(||v||_{B^{N/p1}_{p1,inf}}, ||v||_inf)
/// Intersection norms use the max of the two members. The report's (s,p,r)
/// describe the left-hand norm; ratio = lhs/rhs is the empirical constant.
InequalityReport product_law_check(const DyadicDecomposition& dec, const ProductLawCase& cse,
                                   const SpectralField& u, const SpectralField& v);

/// Blockwise commutator estimate aggregated over the grid's block range.
/// For -N/p1 < sigma <= N/p1 + alpha and alpha in (1 - N/p, 1):
///   lhs = | (2^{q sigma} |R_q|_{L^p})_q |_{ell^r},
///   rhs = |a|_{B^{N/p1+alpha}_{p1,r}} |w|_{B^{sigma+1-alpha}_{p,r}},
/// so the ratio dominates every ell^r partial sum of the normalized
/// per-block sequence c_q. At the endpoint sigma = -N/p1 the norms take
/// the stated limit form instead:
///   lhs = sup_q 2^{-q N/p1} |R_q|_{L^p},
///   rhs = |a|_{B^{alpha+N/p1}_{p,1}} |w|_{B^{-N/p1+1-alpha}_{p,infty}}.
/// Throws ParameterError outside the admissible index window.
InequalityReport commutator_estimate_check(const DyadicDecomposition& dec,
                                           const SpectralField& a, const SpectralField& w,
                                           int axis, double sigma, double p, double p1,
                                           double r, double alpha);

}  // namespace lpflow
