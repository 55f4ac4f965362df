#include "lpflow/harness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <utility>

#include "lpflow/bony.hpp"
#include "lpflow/chemin_lerner.hpp"
#include "lpflow/elliptic.hpp"
#include "lpflow/ns.hpp"
#include "lpflow/operators.hpp"
#include "lpflow/transport.hpp"

namespace lpflow {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ParameterError("harness: " + msg);
}

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a + 0x9e3779b97f4a7c15ULL * (b + 0x632be59bd9b4e019ULL);
    return splitmix64(x);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

double uniform01(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

double inv(double q) { return std::isinf(q) ? 0.0 : 1.0 / q; }

/// Canonical conjugate-pair representatives of the integer modes n with
/// (4/3) 2^l <= |n| <= (3/2) 2^l (the annulus where the default shell
/// filter is identically one). Exact integer window test; resolution
/// independent; deterministic lexicographic order.
const std::vector<std::array<int, 3>>& shell_modes(int dim, int l) {
    static std::map<std::pair<int, int>, std::vector<std::array<int, 3>>> cache;
    auto it = cache.find({dim, l});
    if (it != cache.end()) return it->second;

    const std::int64_t four_l = std::int64_t{1} << (2 * l);
    const int hi = static_cast<int>((3 * (std::int64_t{1} << l)) / 2);
    std::vector<std::array<int, 3>> modes;
    const int lo2 = dim == 3 ? -hi : 0;
    for (int n0 = -hi; n0 <= hi; ++n0)
        for (int n1 = -hi; n1 <= hi; ++n1)
            for (int n2 = lo2; n2 <= (dim == 3 ? hi : 0); ++n2) {
                const std::int64_t nn = std::int64_t{n0} * n0 + std::int64_t{n1} * n1 +
                                        std::int64_t{n2} * n2;
                if (9 * nn < 16 * four_l || 4 * nn > 9 * four_l) continue;
                const bool canonical =
                    n0 > 0 || (n0 == 0 && (n1 > 0 || (n1 == 0 && n2 > 0)));
                if (canonical) modes.push_back({n0, n1, n2});
            }
    return cache.emplace(std::make_pair(dim, l), std::move(modes)).first->second;
}

/// |2 cos|_{L^p} on the continuum torus, per unit coefficient magnitude:
/// 2 vol^{1/p} (mean |cos|^p)^{1/p} with the closed-form cosine moment.
double pair_lp_factor(double p, double vol) {
    if (std::isinf(p)) return 2.0;
    const double logm =
        (std::lgamma((p + 1.0) / 2.0) - std::lgamma(p / 2.0 + 1.0) - 0.5 * std::log(pi)) / p;
    return 2.0 * std::pow(vol, 1.0 / p) * std::exp(logm);
}

double envelope_weight(int l, double r) {
    return std::isinf(r) ? 1.0 : std::pow(l + 2.0, -(1.0 / r + 0.1));
}

int wrap_index(int n, int size) { return n >= 0 ? n : n + size; }

}  // namespace

void SampleSpec::validate() const {
    require(dim == 2 || dim == 3, "sample dim must be 2 or 3");
    require(resolution >= 8 && (resolution & (resolution - 1)) == 0,
            "sample resolution must be a power of two >= 8");
    require(components >= 1, "sample components must be >= 1");
    require(std::isfinite(s), "sample regularity must be finite");
    require(p >= 1.0 && r >= 1.0, "sample p and r must be >= 1");
    require(amplitude > 0.0 && std::isfinite(amplitude), "sample amplitude must be positive");
    require(first_block >= -1, "sample first_block must be >= -1");
    require(last_block == auto_block || last_block >= first_block,
            "sample last_block must be >= first_block");
}

int top_design_block(const SampleSpec& spec) {
    spec.validate();
    if (spec.last_block != SampleSpec::auto_block) return spec.last_block;
    // Highest l whose shell annulus |n| <= 3*2^{l-1} fits under the axis
    // Nyquist bound size/2 - 1, i.e. 3*2^l <= size - 2.
    int l = 0;
    while (3 * (std::int64_t{1} << (l + 1)) <= spec.resolution - 2) ++l;
    return l;
}

double design_norm(const SampleSpec& spec) {
    const int top = top_design_block(spec);
    if (std::isinf(spec.r)) return spec.amplitude;  // envelope is flat
    double sum = 0.0;
    for (int l = spec.first_block; l <= top; ++l)
        sum += std::pow(envelope_weight(l, spec.r), spec.r);
    return spec.amplitude * std::pow(sum, 1.0 / spec.r);
}

SpectralField generate_sample(const SampleSpec& spec, const TorusGrid& grid) {
    spec.validate();
    require(grid.dim() == spec.dim, "sample dim does not match the target grid");
    for (int a = 0; a < grid.dim(); ++a)
        require(grid.period(a) == two_pi, "sample grids must be 2pi-periodic");

    const int top = top_design_block(spec);
    require(spec.first_block <= top,
            "no representable blocks in [" + std::to_string(spec.first_block) + ", " +
                std::to_string(top) + "]");
    const double vol = grid.volume();
    SpectralField u(grid, spec.components);
    const double comp_scale = 1.0 / std::sqrt(static_cast<double>(spec.components));

    for (int c = 0; c < spec.components; ++c) {
        for (int l = spec.first_block; l <= top; ++l) {
            const double target = std::pow(2.0, -l * spec.s) * spec.amplitude *
                                  envelope_weight(l, spec.r);
            std::uint64_t state = hash_combine(
                spec.seed, (static_cast<std::uint64_t>(c) << 32) ^
                               static_cast<std::uint64_t>(l + 1));
            if (l == -1) {
                // The low block holds a signed constant; |const|_p is exact
                // for every p (and for the multi-component magnitude).
                const double sign = (splitmix64(state) & 1ULL) ? 1.0 : -1.0;
                const double value =
                    std::isinf(spec.p) ? target : target / std::pow(vol, 1.0 / spec.p);
                u(grid.flatten(0, 0), c) = sign * comp_scale * value;
                continue;
            }
            const auto& modes = shell_modes(spec.dim, l);
            require(!modes.empty(), "no lattice modes in shell block " + std::to_string(l));
            const auto& n = modes[splitmix64(state) % modes.size()];
            for (int a = 0; a < grid.dim(); ++a)
                require(std::abs(n[a]) <= grid.size(a) / 2 - 1,
                        "block " + std::to_string(l) + " is not representable at resolution " +
                            std::to_string(grid.size(a)));
            const double theta = two_pi * uniform01(splitmix64(state));
            const double magnitude = comp_scale * target / pair_lp_factor(spec.p, vol);
            const Complex coeff = magnitude * Complex(std::cos(theta), std::sin(theta));
            const std::int64_t plus =
                grid.flatten(wrap_index(n[0], grid.size(0)), wrap_index(n[1], grid.size(1)),
                             spec.dim == 3 ? wrap_index(n[2], grid.size(2)) : 0);
            const std::int64_t minus =
                grid.flatten(wrap_index(-n[0], grid.size(0)), wrap_index(-n[1], grid.size(1)),
                             spec.dim == 3 ? wrap_index(-n[2], grid.size(2)) : 0);
            u(plus, c) = coeff;
            u(minus, c) = std::conj(coeff);
        }
    }
    return u;
}

SpectralField generate_sample(const SampleSpec& spec) {
    spec.validate();
    const TorusGrid grid = spec.dim == 2 ? TorusGrid::square(spec.resolution)
                                         : TorusGrid::cube(spec.resolution);
    return generate_sample(spec, grid);
}

namespace {

/// Per-sample evaluation context handed to the law evaluators.
struct Ctx {
    const DyadicDecomposition& dec;
    const SuiteConfig& cfg;
    const std::string& law;
    int sample = 0;

    double param(const std::string& key, double def) const {
        auto it = cfg.params.find(law + "." + key);
        return it == cfg.params.end() ? def : it->second;
    }

    double dimension() const { return static_cast<double>(dec.grid().dim()); }

    /// Deterministic sample field: the seed depends on the suite seed, the
    /// law id, the sample index, and the slot (so paired fields differ).
    SpectralField field(int slot, double s, double p, double r, int comps = 1,
                        int first = -1, int last = SampleSpec::auto_block,
                        double amplitude = 1.0) const {
        SampleSpec sp;
        sp.dim = dec.grid().dim();
        sp.resolution = dec.grid().size(0);
        sp.components = comps;
        sp.s = s;
        sp.p = p;
        sp.r = r;
        sp.amplitude = amplitude;
        sp.first_block = first;
        sp.last_block = last;
        sp.seed = hash_combine(hash_combine(cfg.seed, fnv1a(law)),
                               static_cast<std::uint64_t>(sample) * 8ULL +
                                   static_cast<std::uint64_t>(slot));
        return generate_sample(sp, dec.grid());
    }

    /// Rescale to a prescribed sup norm; returns a zero field untouched.
    static SpectralField rescale_sup(SpectralField f, double sup) {
        const double cur = lp_norm(f, infinity);
        if (cur > 0.0) f *= sup / cur;
        return f;
    }
};

using LawFn = std::function<InequalityReport(const Ctx&)>;

struct LawEntry {
    LawFn fn;
    double ceiling = infinity;
    bool stability_checked = true;
};

InequalityReport two_sided(double lo, double hi, double measured, double s, double p, double r) {
    InequalityReport rep;
    rep.s = s;
    rep.p = p;
    rep.r = r;
    rep.lhs = measured > 0.0 ? std::max(measured / hi, lo / measured) : infinity;
    rep.rhs = 1.0;
    rep.degenerate = !(measured > 0.0);
    return rep;
}

/// Short heat flow of u0 recorded into an accumulator at p; also reports
/// the sample times and fields through the callback.
CheminLernerAccumulator heat_trajectory(
    const DyadicDecomposition& dec, const SpectralField& u0, double p,
    const std::function<void(double, const SpectralField&)>& visit = {}) {
    CheminLernerAccumulator acc(dec, p);
    for (int i = 0; i < 5; ++i) {
        const double t = 0.005 * i;
        SpectralField ut = radial_multiplier(u0, [t](double k) { return std::exp(-t * k * k); });
        acc.record(t, ut);
        if (visit) visit(t, ut);
    }
    return acc;
}

InequalityReport law_besov_derivative(const Ctx& c) {
    const double s = c.param("s", 1.0), p = c.param("p", 2.0), r = c.param("r", 2.0);
    SpectralField u = c.field(0, s, p, r);
    const double n_u = c.dec.besov_norm(u, s, p, r);
    const double n_grad = c.dec.besov_norm(gradient(u), s - 1.0, p, r);
    InequalityReport rep;
    rep.s = s;
    rep.p = p;
    rep.r = r;
    rep.degenerate = !(n_u > 0.0) || !(n_grad > 0.0);
    rep.lhs = rep.degenerate ? 0.0 : std::max(n_u / n_grad, n_grad / n_u);
    rep.rhs = 1.0;
    return rep;
}

InequalityReport law_bernstein(const Ctx& c) {
    const int l = static_cast<int>(c.param("block", 3.0));
    const double p = c.param("p", 2.0);
    require(l >= 0, "bernstein block must be >= 0");
    SpectralField u = c.field(0, 0.0, p, infinity, 1, l, l);
    const double ratio = std::pow(2.0, -l) * lp_norm(gradient(u), p) / lp_norm(u, p);
    const double alpha = c.dec.pou().outer();
    return two_sided(1.0 / (2.0 * alpha), 2.0 * alpha, ratio, 0.0, p, infinity);
}

InequalityReport law_embedding(const Ctx& c) {
    const double s = c.param("s", 1.0);
    const double p1 = c.param("p1", 2.0), p2 = c.param("p2", infinity);
    const double r1 = c.param("r1", 1.0), r2 = c.param("r2", 2.0);
    require(p1 < p2 && r1 <= r2, "embedding needs p1 < p2 and r1 <= r2");
    SpectralField u = c.field(0, s, p1, r1);
    InequalityReport rep;
    rep.s = s - c.dimension() * (inv(p1) - inv(p2));
    rep.p = p2;
    rep.r = r2;
    rep.lhs = c.dec.besov_norm(u, rep.s, p2, r2);
    rep.rhs = c.dec.besov_norm(u, s, p1, r1);
    rep.degenerate = !(rep.rhs > 0.0);
    return rep;
}

InequalityReport law_r_monotonicity(const Ctx& c) {
    const double s = c.param("s", 0.5), p = c.param("p", 2.0);
    const double r1 = c.param("r1", 1.0), r2 = c.param("r2", 3.0);
    require(r1 <= r2, "r-monotonicity needs r1 <= r2");
    SpectralField u = c.field(0, s, p, 2.0);
    InequalityReport rep;
    rep.s = s;
    rep.p = p;
    rep.r = r2;
    rep.lhs = c.dec.besov_norm(u, s, p, r2);
    rep.rhs = c.dec.besov_norm(u, s, p, r1);
    rep.degenerate = !(rep.rhs > 0.0);
    return rep;
}

InequalityReport law_interpolation(const Ctx& c) {
    const double s1 = c.param("s1", 0.25), s2 = c.param("s2", 1.25);
    const double theta = c.param("theta", 0.5), p = c.param("p", 2.0);
    require(theta > 0.0 && theta < 1.0, "interpolation needs theta in (0,1)");
    SpectralField u = c.field(0, 0.5 * (s1 + s2), p, 2.0);
    InequalityReport rep;
    rep.s = theta * s1 + (1.0 - theta) * s2;
    rep.p = p;
    rep.r = infinity;
    rep.lhs = c.dec.besov_norm(u, rep.s, p, infinity);
    rep.rhs = std::pow(c.dec.besov_norm(u, s1, p, infinity), theta) *
              std::pow(c.dec.besov_norm(u, s2, p, infinity), 1.0 - theta);
    rep.degenerate = !(rep.rhs > 0.0);
    return rep;
}

InequalityReport law_log_interpolation(const Ctx& c) {
    const double s = c.param("s", 0.5), p = c.param("p", 2.0);
    const double eps = c.param("eps", 0.2), rho = c.param("rho", infinity);
    require(eps > 0.0, "log-interpolation needs eps > 0");
    SpectralField u0 = c.field(0, s + eps, p, 2.0);
    CheminLernerAccumulator acc = heat_trajectory(c.dec, u0, p);
    LogInterpolationCheck chk = log_interpolation_check(acc, rho, s, eps);
    InequalityReport rep;
    rep.s = s;
    rep.p = p;
    rep.r = 1.0;
    rep.lhs = chk.lhs;
    rep.rhs = chk.rhs;
    rep.degenerate = chk.degenerate;
    return rep;
}

InequalityReport law_bgamma_link(const Ctx& c) {
    const double p = c.param("p", 2.0), r = c.param("r", 2.0);
    const double sn = c.dimension() * inv(p) + 1.0;
    SpectralField u = c.field(0, sn, p, r);
    InequalityReport rep;
    rep.s = sn;
    rep.p = p;
    rep.r = r;
    rep.lhs = c.dec.v_prime(u, infinity, 1.0 - inv(r));
    rep.rhs = c.dec.besov_norm(u, sn, p, r);
    rep.degenerate = !(rep.rhs > 0.0);
    return rep;
}

InequalityReport law_vprime_integral(const Ctx& c) {
    const double p2 = c.param("p2", 2.0), r = c.param("r", 2.0);
    const double sn = c.dimension() * inv(p2) + 1.0;
    SpectralField v0 = c.field(0, sn, p2, r, c.dec.grid().dim());
    std::vector<double> times, values;
    CheminLernerAccumulator acc =
        heat_trajectory(c.dec, v0, p2, [&](double t, const SpectralField& vt) {
            times.push_back(t);
            values.push_back(c.dec.v_prime(vt, infinity, 1.0 - inv(r)));
        });
    InequalityReport rep;
    rep.s = sn;
    rep.p = p2;
    rep.r = r;
    rep.lhs = trapezoid(times, values);
    rep.rhs = acc.chemin_lerner(1.0, sn, r);
    rep.degenerate = !(rep.rhs > 0.0);
    return rep;
}

InequalityReport law_bony_identity(const Ctx& c) {
    SpectralField u = c.field(0, 1.0, 2.0, 2.0);
    SpectralField v = c.field(1, 1.0, 2.0, 2.0);
    SpectralField defect = pointwise_product(u, v) - paraproduct(c.dec, u, v) -
                           paraproduct(c.dec, v, u) - remainder(c.dec, u, v);
    InequalityReport rep;
    rep.s = 0.0;
    rep.p = infinity;
    rep.r = infinity;
    rep.lhs = lp_norm(defect, infinity);
    rep.rhs = lp_norm(u, infinity) * lp_norm(v, infinity);
    rep.degenerate = !(rep.rhs > 0.0);
    return rep;
}

InequalityReport law_commutator_split(const Ctx& c) {
    const int q = static_cast<int>(c.param("block", 2.0));
    const int axis = static_cast<int>(c.param("axis", 0.0));
    // Band-limit both inputs to a quarter of the axis Nyquist so no product
    // in the five-term split aliases: 3*2^{l-1} <= size/8.
    int lq = -1;
    while (3 * (std::int64_t{1} << (lq + 2)) <= c.dec.grid().size(0) / 4) ++lq;
    require(lq >= 0, "grid too coarse for an alias-free commutator split");
    SpectralField a = c.field(0, 1.0, 2.0, 2.0, 1, -1, lq);
    SpectralField w = c.field(1, 1.0, 2.0, 2.0, 1, -1, lq);
    CommutatorSplit split = commutator_split(c.dec, a, w, axis, q);
    SpectralField defect = commutator_block(c.dec, a, w, axis, q) - split.recombined();
    InequalityReport rep;
    rep.s = 0.0;
    rep.p = infinity;
    rep.r = infinity;
    rep.lhs = lp_norm(defect, infinity);
    rep.rhs = lp_norm(a, infinity) * lp_norm(gradient(w), infinity);
    rep.degenerate = !(rep.rhs > 0.0);
    return rep;
}

InequalityReport law_commutator_estimate(const Ctx& c) {
    const double sigma = c.param("sigma", 0.5), p = c.param("p", 2.0);
    const double p1 = c.param("p1", 2.0), r = c.param("r", 2.0);
    const double alpha = c.param("alpha", 0.7);
    const int axis = static_cast<int>(c.param("axis", 0.0));
    const double N = c.dimension();
    SpectralField a = c.field(0, N * inv(p1) + alpha, p1, r);
    SpectralField w = c.field(1, sigma + 1.0 - alpha, p, r);
    return commutator_estimate_check(c.dec, a, w, axis, sigma, p, p1, r, alpha);
}

InequalityReport law_commutator_estimate_limit(const Ctx& c) {
    const double p = c.param("p", 2.0), p1 = c.param("p1", 2.0);
    const double alpha = c.param("alpha", 0.7);
    const int axis = static_cast<int>(c.param("axis", 0.0));
    const double N = c.dimension();
    const double sigma = -N * inv(p1);
    SpectralField a = c.field(0, alpha + N * inv(p1), p, 1.0);
    SpectralField w = c.field(1, sigma + 1.0 - alpha, p, infinity);
    return commutator_estimate_check(c.dec, a, w, axis, sigma, p, p1, infinity, alpha);
}

InequalityReport law_product(const Ctx& c, ProductLaw law) {
    ProductLawCase cse;
    cse.law = law;
    cse.s = c.param("s", law == ProductLaw::corollary ? 0.4 : 0.5);
    cse.s1 = c.param("s1", law == ProductLaw::law24 ? 0.5 : 0.3);
    cse.s2 = c.param("s2", law == ProductLaw::law24 ? -0.5 : 0.4);
    cse.p = c.param("p", 2.0);
    cse.p1 = c.param("p1", law == ProductLaw::corollary ? 4.0 : 2.0);
    cse.p2 = c.param("p2", 2.0);
    cse.r = c.param("r", law == ProductLaw::corollary ? 1.0 : 2.0);
    cse.validate(c.dec.grid().dim());

    const double N = c.dimension();
    SpectralField u(c.dec.grid(), 1), v(c.dec.grid(), 1);
    switch (law) {
        case ProductLaw::law22:
        case ProductLaw::law25:
            u = c.field(0, cse.s, cse.p, cse.r);
            v = law == ProductLaw::law25 ? c.field(1, N * inv(cse.p), cse.p, 2.0)
                                         : c.field(1, cse.s, cse.p, cse.r);
            break;
        case ProductLaw::law23:
            u = c.field(0, cse.s1, cse.p1, cse.r);
            v = c.field(1, cse.s2, cse.p2, cse.r);
            break;
        case ProductLaw::law24:
            u = c.field(0, cse.s1, cse.p1, 1.0);
            v = c.field(1, cse.s2, cse.p2, infinity);
            break;
        case ProductLaw::corollary:
            u = c.field(0, cse.s, cse.p, cse.r);
            v = c.field(1, N * inv(cse.p1), cse.p1, 2.0);
            break;
    }
    return product_law_check(c.dec, cse, u, v);
}

InequalityReport law_elliptic_regularity(const Ctx& c) {
    const double sigma = c.param("sigma", 0.5), p = c.param("p", 2.0);
    const double r = c.param("r", 2.0), alpha = c.param("alpha", 0.5);
    const double contrast = c.param("contrast", 0.2), tol = c.param("tol", 1e-10);
    SpectralField a = Ctx::rescale_sup(c.field(0, 1.5, 2.0, 2.0), contrast);
    SpectralField F = c.field(1, 1.0, 2.0, 2.0, c.dec.grid().dim());
    CoefficientField coef(c.dec, a, c.param("p1", infinity));
    PressureSolution sol = solve_pressure(coef, F, tol);
    return elliptic_estimate_check(coef, F, sol.grad_pi, sigma, p, r, alpha);
}

TransportTrajectory transport_run(const Ctx& c, double p, double p1) {
    const double t_final = c.param("t-final", 0.1);
    const double steps = c.param("steps", 8.0);
    const double vsup = c.param("v-sup", 0.5);
    SpectralField a0 = c.field(0, 1.0, p, 2.0);
    SpectralField v =
        Ctx::rescale_sup(leray_project(c.field(1, 2.0, 2.0, 2.0, c.dec.grid().dim())), vsup);
    TransportConfig tc;
    tc.dt = t_final / steps;
    tc.t_final = t_final;
    tc.p = p;
    tc.p1_list = {p1};
    return advect(c.dec, a0, [&v](double) { return v; }, SourceFn{}, tc);
}

InequalityReport law_transport_limited_loss(const Ctx& c) {
    const double sigma = c.param("sigma", 0.5), eps = c.param("eps", 0.1);
    const double p = c.param("p", 2.0), p1 = c.param("p1", infinity);
    const double alpha = c.param("alpha", 0.5);
    TransportTrajectory traj = transport_run(c, p, p1);
    return limited_loss_report(traj, sigma, eps, p, p1, alpha);
}

InequalityReport law_transport_linear_loss(const Ctx& c) {
    const double sigma = c.param("sigma", 0.5), lambda = c.param("lambda", 2.0);
    const double p = c.param("p", 2.0), p1 = c.param("p1", infinity);
    TransportTrajectory traj = transport_run(c, p, p1);
    LossSchedule sched;
    sched.sigma = sigma;
    sched.lambda = lambda;
    sched.s1 = sigma - 10.0;  // generous floor; never reached on [0, t-final]
    sched.p1 = p1;
    return linear_loss_report(traj, sched, {});
}

RunResult ns_short_run(const Ctx& c) {
    const int dim = c.dec.grid().dim();
    SpectralField a0 = Ctx::rescale_sup(c.field(0, 2.0, 2.0, 2.0), c.param("a-sup", 0.05));
    SpectralField u0 = Ctx::rescale_sup(leray_project(c.field(1, 2.0, 2.0, 2.0, dim)),
                                        c.param("u-sup", 0.1));
    SolverConfig nc;
    nc.mu = c.param("mu", 0.5);
    nc.t_final = c.param("t-final", 0.05);
    nc.dt = nc.t_final / c.param("steps", 4.0);
    nc.p1 = infinity;
    nc.p2 = 2.0;
    nc.r = 1.0;
    nc.monitor_every = 1;
    nc.pressure_split_diagnostics = true;
    return run(c.dec, a0, u0, ForceFn{}, nc);
}

InequalityReport law_ns_parabolic(const Ctx& c) {
    const double s = c.param("s", 0.5), mtime = c.param("mtime", 1.0);
    RunResult res = ns_short_run(c);
    std::optional<InequalityReport> rep = res.monitor->parabolic_estimate(s, mtime);
    if (!rep) {
        InequalityReport deg;
        deg.s = s;
        deg.degenerate = true;
        return deg;
    }
    return *rep;
}

InequalityReport law_ns_pressure(const Ctx& c, int which) {
    const double s = c.param("s", 0.5), mtime = c.param("mtime", 1.0);
    RunResult res = ns_short_run(c);
    std::vector<InequalityReport> reps = res.monitor->pressure_estimate(s, mtime);
    if (static_cast<int>(reps.size()) <= which || reps[which].degenerate) {
        InequalityReport deg;
        deg.s = s;
        deg.degenerate = true;
        return deg;
    }
    return reps[which];
}

const std::map<std::string, LawEntry>& registry() {
    static const std::map<std::string, LawEntry> reg = [] {
        std::map<std::string, LawEntry> m;
        const double exact = 1.0 + 1e-12;
        m["besov-derivative"] = {law_besov_derivative, infinity, true};
        m["bernstein"] = {law_bernstein, 1.0, false};
        m["embedding"] = {law_embedding, infinity, true};
        m["r-monotonicity"] = {law_r_monotonicity, exact, false};
        m["interpolation"] = {law_interpolation, exact, false};
        m["log-interpolation"] = {law_log_interpolation, infinity, true};
        m["bgamma-link"] = {law_bgamma_link, infinity, true};
        m["vprime-integral"] = {law_vprime_integral, infinity, true};
        m["bony-identity"] = {law_bony_identity, 1e-12, false};
        m["commutator-split"] = {law_commutator_split, 1e-12, false};
        m["commutator-estimate"] = {law_commutator_estimate, infinity, true};
        m["commutator-estimate-limit"] = {law_commutator_estimate_limit, infinity, true};
        m["product-22"] = {[](const Ctx& c) { return law_product(c, ProductLaw::law22); },
                           infinity, true};
        m["product-23"] = {[](const Ctx& c) { return law_product(c, ProductLaw::law23); },
                           infinity, true};
        m["product-24"] = {[](const Ctx& c) { return law_product(c, ProductLaw::law24); },
                           infinity, true};
        m["product-25"] = {[](const Ctx& c) { return law_product(c, ProductLaw::law25); },
                           infinity, true};
        m["product-corollary"] =
            {[](const Ctx& c) { return law_product(c, ProductLaw::corollary); }, infinity, true};
        m["elliptic-regularity"] = {law_elliptic_regularity, infinity, true};
        m["transport-limited-loss"] = {law_transport_limited_loss, infinity, true};
        m["transport-linear-loss"] = {law_transport_linear_loss, infinity, true};
        m["ns-parabolic"] = {law_ns_parabolic, infinity, true};
        m["ns-pressure-h"] = {[](const Ctx& c) { return law_ns_pressure(c, 0); }, infinity,
                              true};
        m["ns-pressure-var"] = {[](const Ctx& c) { return law_ns_pressure(c, 1); }, infinity,
                                true};
        return m;
    }();
    return reg;
}

}  // namespace

void SuiteConfig::validate() const {
    require(!laws.empty(), "suite needs at least one law");
    for (const std::string& law : laws)
        require(law_registered(law), "unknown law '" + law + "'");
    require(samples >= 1, "suite needs at least one sample");
    require(!resolutions.empty(), "suite needs at least one resolution");
    for (int res : resolutions)
        require(res >= 8 && (res & (res - 1)) == 0,
                "suite resolutions must be powers of two >= 8");
    require(dim == 2 || dim == 3, "suite dim must be 2 or 3");
    require(stability_ceiling > 0.0, "stability ceiling must be positive");
    require(degenerate_quota >= 0.0 && degenerate_quota <= 1.0,
            "degenerate quota must lie in [0, 1]");
}

std::vector<std::string> registered_laws() {
    std::vector<std::string> out;
    for (const auto& [id, entry] : registry()) out.push_back(id);
    return out;
}

bool law_registered(const std::string& law) { return registry().count(law) != 0; }

SuiteResult run_suite(const SuiteConfig& cfg) {
    cfg.validate();

    std::vector<DyadicDecomposition> decs;
    decs.reserve(cfg.resolutions.size());
    for (int res : cfg.resolutions)
        decs.emplace_back(cfg.dim == 2 ? TorusGrid::square(res) : TorusGrid::cube(res));

    SuiteResult out;
    out.passed = true;
    for (const std::string& law : cfg.laws) {
        const LawEntry& entry = registry().at(law);
        LawSummary sum;
        sum.law = law;
        sum.ceiling = entry.ceiling;
        sum.stability_checked = entry.stability_checked;
        bool ratios_ok = true;

        for (std::size_t ri = 0; ri < decs.size(); ++ri) {
            double c_emp = 0.0;
            for (int i = 0; i < cfg.samples; ++i) {
                Ctx ctx{decs[ri], cfg, law, i};
                InequalityReport rep = entry.fn(ctx);
                rep.sample_id = std::to_string(i);
                rep.law_id = law;
                rep.resolution = decs[ri].grid().size(0);
                ++sum.samples;
                if (rep.degenerate) {
                    ++sum.degenerate;
                } else {
                    const double ratio = rep.ratio();
                    if (!std::isfinite(ratio) || ratio < 0.0 || ratio > sum.ceiling)
                        ratios_ok = false;
                    c_emp = std::max(c_emp, ratio);
                }
                out.reports.push_back(std::move(rep));
            }
            sum.c_emp.push_back(c_emp);
        }

        sum.invalid = sum.degenerate > cfg.degenerate_quota * sum.samples;
        bool stable = true;
        if (sum.stability_checked && sum.c_emp.size() >= 2) {
            const double coarse = sum.c_emp.front(), fine = sum.c_emp.back();
            sum.stability = coarse > 0.0 ? fine / coarse : (fine > 0.0 ? infinity : 1.0);
            stable = sum.stability <= cfg.stability_ceiling;
        }
        sum.passed = !sum.invalid && ratios_ok && stable;
        out.passed = out.passed && sum.passed;
        out.summaries.push_back(std::move(sum));
    }
    return out;
}

}  // namespace lpflow
