#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "lpflow/inequality.hpp"
#include "lpflow/littlewood_paley.hpp"

namespace lpflow {

/// Recipe for a random field of prescribed Besov regularity on the
/// 2pi-periodic square (or cubic) grid. Each dyadic block l carries a
/// single conjugate mode pair drawn from the annulus where the shell
/// filter equals one, with coefficient magnitude calibrated so that
///   |Delta_l u|_{L^p} = 2^{-l s} * eps_l,
/// where eps_l = amplitude for r = infinity and
/// eps_l = amplitude * (l+2)^{-(1/r + 0.1)} otherwise (an ell^r envelope).
/// Block -1 contributes a constant. Mode choice, sign, and phase are pure
/// functions of (seed, component, block), independent of the resolution,
/// so the same seed at two resolutions shares every common block
/// coefficientwise (the integer frequency lattices are nested).
struct SampleSpec {
    static constexpr int auto_block = std::numeric_limits<int>::min();

    int dim = 2;
    int resolution = 64;  ///< nodes per axis (power of two, >= 8)
    int components = 1;
    double s = 1.0;          ///< design regularity
    double p = 2.0;          ///< design integrability
    double r = 2.0;          ///< envelope summability
    double amplitude = 1.0;  ///< overall scale of the envelope
    int first_block = -1;
    int last_block = auto_block;  ///< auto: top block fully inside Nyquist
    std::uint64_t seed = 0;

    void validate() const;
};

/// Resolved index of the spec's top populated block: last_block, or for
/// auto_block the largest l whose pure-shell annulus |k| <= 3*2^{l-1} is
/// representable at the spec resolution.
int top_design_block(const SampleSpec& spec);

/// The designed value of besov_norm(u, s, p, r): the ell^r norm of the
/// envelope (eps_l) over the populated blocks. Quadrature of |cos|^p makes
/// the measured norm differ from this by a few percent at most for p != 2;
/// at p = 2 the design is exact by Parseval.
double design_norm(const SampleSpec& spec);

/// Deterministically generate the sample on its own grid, or on a caller
/// grid (which must be 2pi-periodic with the spec's dim; the spec
/// resolution is ignored in that case). Throws ParameterError when a
/// populated block is not representable on the target grid.
SpectralField generate_sample(const SampleSpec& spec);
SpectralField generate_sample(const SampleSpec& spec, const TorusGrid& grid);

/// One law suite evaluated at every configured resolution. The registry
/// (see registered_laws) maps a law id to an evaluator producing one
/// InequalityReport per sample; per-law knobs are read from
/// params["<law>.<knob>"]. Knobs and defaults:
///   besov-derivative        s=1, p=2, r=2
///   bernstein               block=3, p=2
///   embedding               s=1, p1=2, p2=inf, r1=1, r2=2
///   r-monotonicity          s=0.5, p=2, r1=1, r2=3
///   interpolation           s1=0.25, s2=1.25, theta=0.5, p=2
///   log-interpolation       s=0.5, p=2, eps=0.2, rho=inf
///   bgamma-link             p=2, r=2
///   vprime-integral         p2=2, r=2
///   bony-identity           (none)
///   commutator-split        block=2, axis=0
///   commutator-estimate     sigma=0.5, p=2, p1=2, r=2, alpha=0.7, axis=0
///   commutator-estimate-limit  p=2, p1=2, alpha=0.7, axis=0
///   product-22              s=0.5, p=2, r=2
///   product-23              s1=0.3, s2=0.4, p=2, p1=2, p2=2, r=2
///   product-24              s1=0.5, s2=-0.5, p=2, p1=2, p2=2
///   product-25              s=0.5, p=2, r=2
///   product-corollary       s=0.4, p=2, p1=4, r=1
///   elliptic-regularity     sigma=0.5, p=2, r=2, alpha=0.5, contrast=0.2, tol=1e-10
///   transport-limited-loss  sigma=0.5, eps=0.1, p=2, p1=inf, alpha=0.5,
///                           t-final=0.1, steps=8, v-sup=0.5
///   transport-linear-loss   sigma=0.5, lambda=2, p=2, p1=inf,
///                           t-final=0.1, steps=8, v-sup=0.5
///   ns-parabolic            s=0.5, mtime=1, mu=0.5, t-final=0.05, steps=4,
///                           a-sup=0.05, u-sup=0.1
///   ns-pressure-h           (same as ns-parabolic)
///   ns-pressure-var         (same as ns-parabolic)
struct SuiteConfig {
    std::vector<std::string> laws;
    int samples = 20;  ///< per resolution; >= 20 for constant estimation
    std::vector<int> resolutions = {32, 64};  ///< ordered coarse -> fine
    int dim = 2;
    std::uint64_t seed = 1;
    double stability_ceiling = 2.0;
    double degenerate_quota = 0.10;  ///< max degenerate fraction per law
    std::map<std::string, double> params;

    void validate() const;
};

/// Aggregate verdict for one law. c_emp[i] is the max ratio over the
/// non-degenerate samples at resolutions[i]. For laws bounding an
/// empirical constant (ceiling = infinity) the coarsest-to-finest drift
/// of c_emp must stay within stability_ceiling; identity- and
/// bracket-type laws instead enforce their absolute per-sample ceiling,
/// where c_emp is round-off noise and drift is not checked.
struct LawSummary {
    std::string law;
    double ceiling = infinity;  ///< per-sample ratio ceiling in effect
    bool stability_checked = true;
    std::vector<double> c_emp;
    double stability = 1.0;  ///< c_emp.back() / c_emp.front()
    int samples = 0;         ///< reports evaluated (all resolutions)
    int degenerate = 0;
    bool invalid = false;  ///< degenerate quota exceeded
    bool passed = false;

    std::string verdict() const { return invalid ? "INVALID" : passed ? "PASS" : "FAIL"; }
};

struct SuiteResult {
    std::vector<InequalityReport> reports;  ///< every sample, in order
    std::vector<LawSummary> summaries;      ///< one per requested law
    bool passed = false;                    ///< all laws valid and passing
};

/// Evaluate the requested laws over cfg.samples deterministic samples at
/// each resolution. Reports are produced in (law, resolution, sample)
/// order; reruns with an identical config reproduce them bit-identically.
/// Unknown law ids throw ParameterError before any computation.
SuiteResult run_suite(const SuiteConfig& cfg);

/// Registered law ids, sorted.
std::vector<std::string> registered_laws();
bool law_registered(const std::string& law);

}  // namespace lpflow
