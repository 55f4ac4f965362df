#include <cmath>

#include "doctest.h"
#include "lpflow/chemin_lerner.hpp"
#include "test_util.hpp"

using namespace lpflow;
using namespace lpflow::testutil;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

int wrap_index(int n, int size) { return n >= 0 ? n : n + size; }

/// Add amplitude*cos(n.x) to component c (Hermitian pair of coefficients).
void add_cos_mode(SpectralField& u, std::array<int, 3> n, double amplitude, int c = 0) {
    const TorusGrid& g = u.grid();
    const std::int64_t plus =
        g.flatten(wrap_index(n[0], g.size(0)), wrap_index(n[1], g.size(1)),
                  g.dim() == 3 ? wrap_index(n[2], g.size(2)) : 0);
    const std::int64_t minus =
        g.flatten(wrap_index(-n[0], g.size(0)), wrap_index(-n[1], g.size(1)),
                  g.dim() == 3 ? wrap_index(-n[2], g.size(2)) : 0);
    if (plus == minus) {
        u(plus, c) += amplitude;
    } else {
        u(plus, c) += amplitude / 2.0;
        u(minus, c) += amplitude / 2.0;
    }
}

/// Pure mode landing in shell l for the default profile: lattice vector with
/// 2^{-l}|k| inside the phi == 1 plateau [4/3, 3/2].
std::array<int, 3> shell_mode(int l) {
    if (l == 5) return {31, 31, 0};  // |k| = 43.84, 2^-5|k| = 1.370
    const int m = 1 << l;
    return {m, m, 0};  // |k| = sqrt(2) 2^l, within the plateau
}

}  // namespace

TEST_CASE("partition profiles: supports, plateau, midpoint closed form") {
    PartitionOfUnity pou;
    CHECK(pou.alpha() == doctest::Approx(4.0 / 3.0));

    // chi: 1 up to 3/4, 0 from 4/3 on, strictly between on the ramp.
    CHECK(pou.chi(0.0) == 1.0);
    CHECK(pou.chi(0.75) == 1.0);
    CHECK(pou.chi(4.0 / 3.0) == 0.0);
    CHECK(pou.chi(3.0) == 0.0);
    // Midpoint of the ramp: the bump step is symmetric, so chi = 1/2 there.
    CHECK(pou.chi(0.5 * (0.75 + 4.0 / 3.0)) == doctest::Approx(0.5).epsilon(1e-14));
    // Monotone on the ramp.
    double prev = 1.0;
    for (int i = 1; i <= 20; ++i) {
        double r = 0.75 + i * (4.0 / 3.0 - 0.75) / 21.0;
        double c = pou.chi(r);
        CHECK(c < prev);
        CHECK(c > 0.0);
        prev = c;
    }

    // chi(1) in closed form: ramp coordinate t = 3/7, step value
    // 1/(1 + exp(7/3 - 7/4)), hence chi(1) = e^{7/12}/(1 + e^{7/12}).
    const double chi1 = std::exp(7.0 / 12.0) / (1.0 + std::exp(7.0 / 12.0));
    CHECK(pou.chi(1.0) == doctest::Approx(chi1).epsilon(1e-14));

    // phi = chi(r/2) - chi(r): supported in [3/4, 8/3], plateau [4/3, 3/2].
    CHECK(pou.phi(0.7) == 0.0);
    CHECK(pou.phi(4.0 / 3.0) == 1.0);
    CHECK(pou.phi(1.45) == 1.0);
    CHECK(pou.phi(1.5) == 1.0);
    CHECK(pou.phi(8.0 / 3.0) == 0.0);
    CHECK(pou.phi(3.0) == 0.0);
    for (double r : {0.8, 1.0, 1.3, 1.6, 2.0, 2.5}) {
        CHECK(pou.phi(r) >= 0.0);
        CHECK(pou.phi(r) <= 1.0);
    }

    // Telescoping partition of unity at arbitrary radii.
    for (double r : {0.1, 0.9, 1.7, 3.3, 12.8, 201.0}) {
        double total = pou.chi(r);
        for (int l = 0; l < 40; ++l) total += pou.phi(std::ldexp(r, -l));
        CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    }

    CHECK_THROWS_AS(PartitionOfUnity(1.0), ParameterError);
    CHECK_THROWS_AS(PartitionOfUnity(1.5), ParameterError);  // > sqrt(2)
}

TEST_CASE("dyadic blocks reconstruct the field exactly") {
    for (const TorusGrid& g : {TorusGrid::square(64), TorusGrid::cube(16)}) {
        DyadicDecomposition dec(g);
        RealField u = random_smooth(g, 1, 97, 6.0);
        SpectralField uh = transform(u);

        SpectralField sum(g, 1);
        for (int l = -1; l <= dec.lmax(); ++l) sum += dec.block(uh, l);
        CHECK(max_abs_diff(sum, uh) <= 1e-12 * max_abs(uh));

        // Low-pass saturates to the identity once l exceeds lmax + 1.
        CHECK(max_abs_diff(dec.low_pass(uh, dec.lmax() + 2), uh) == 0.0);
        // S_l telescopes the blocks below l.
        SpectralField partial(g, 1);
        for (int l = -1; l <= 2; ++l) partial += dec.block(uh, l);
        CHECK(max_abs_diff(partial, dec.low_pass(uh, 3)) <= 1e-12 * max_abs(uh));
        // Out-of-range blocks and low-passes vanish.
        CHECK(max_abs(dec.block(uh, -2)) == 0.0);
        CHECK(max_abs(dec.block(uh, dec.lmax() + 1)) == 0.0);
        CHECK(max_abs(dec.low_pass(uh, -1)) == 0.0);
    }
}

TEST_CASE("shell disjointness and adjacent overlap") {
    TorusGrid g = TorusGrid::square(64);
    DyadicDecomposition dec(g);
    SpectralField uh = transform(random_real(g, 1, 11));

    for (int l = -1; l <= dec.lmax(); ++l)
        for (int m = -1; m <= dec.lmax(); ++m) {
            if (std::abs(l - m) < 2) continue;
            CHECK(max_abs(dec.block(dec.block(uh, l), m)) == 0.0);
        }
    // Adjacent shells genuinely overlap (not an accident of the profile).
    CHECK(max_abs(dec.block(dec.block(uh, 2), 3)) > 0.0);
}

TEST_CASE("constant field lives entirely in the lowest block") {
    TorusGrid g = TorusGrid::square(32);
    DyadicDecomposition dec(g);
    SpectralField uh(g, 1);
    uh(0, 0) = 3.5;
    CHECK(max_abs_diff(dec.block(uh, -1), uh) == 0.0);
    for (int l = 0; l <= dec.lmax(); ++l) CHECK(max_abs(dec.block(uh, l)) == 0.0);
    CHECK(dec.besov_norm(uh, BesovParams{2.7, inf, 1.0}) ==
          doctest::Approx(std::pow(2.0, -2.7) * 3.5));
}

TEST_CASE("cos(4 x1): weights split between shells 1 and 2 and sum to one") {
    TorusGrid g = TorusGrid::square(32);
    DyadicDecomposition dec(g);
    SpectralField uh(g, 1);
    add_cos_mode(uh, {4, 0, 0}, 1.0);

    // |k| = 4: shell 1 sees phi(2) = chi(1), shell 2 sees phi(1) = 1 - chi(1),
    // with chi(1) = e^{7/12}/(1 + e^{7/12}) in closed form.
    const double chi1 = std::exp(7.0 / 12.0) / (1.0 + std::exp(7.0 / 12.0));
    Eigen::ArrayXd w = dec.block_norms(uh, inf);
    CHECK(w[-1 + 1] == 0.0);
    CHECK(w[0 + 1] == 0.0);
    CHECK(w[1 + 1] == doctest::Approx(chi1).epsilon(1e-12));
    CHECK(w[2 + 1] == doctest::Approx(1.0 - chi1).epsilon(1e-12));
    for (int l = 3; l <= dec.lmax(); ++l) CHECK(w[l + 1] == doctest::Approx(0.0));
}

TEST_CASE("single-shell mode: Besov norm in closed form, r-independent") {
    TorusGrid g = TorusGrid::square(64);
    DyadicDecomposition dec(g);
    const int l = 2;
    SpectralField uh(g, 1);
    add_cos_mode(uh, shell_mode(l), 1.0);

    // The mode sits on the phi == 1 plateau of shell 2 and nowhere else.
    CHECK(max_abs_diff(dec.block(uh, l), uh) <= 1e-15);

    // ||cos||_2 = sqrt(vol/2); ||cos||_4 = (vol*3/8)^(1/4) (power sums of the
    // pure mode are integrated exactly by the lattice); ||cos||_inf = 1.
    const double vol = 4.0 * pi * pi;
    const double s = 1.3;
    CHECK(dec.besov_norm(uh, s, 2.0, 1.0) ==
          doctest::Approx(std::pow(2.0, l * s) * std::sqrt(vol / 2.0)).epsilon(1e-12));
    CHECK(dec.besov_norm(uh, s, 4.0, 7.0) ==
          doctest::Approx(std::pow(2.0, l * s) * std::pow(vol * 3.0 / 8.0, 0.25)).epsilon(1e-12));
    CHECK(dec.besov_norm(uh, s, inf, inf) ==
          doctest::Approx(std::pow(2.0, l * s)).epsilon(1e-12));
    // One-term sum: identical for every r.
    CHECK(dec.besov_norm(uh, s, 2.0, 1.0) == doctest::Approx(dec.besov_norm(uh, s, 2.0, inf)));
}

TEST_CASE("Bernstein bracket for block-filtered fields") {
    // For a field supported in shell l, ||grad u||_p / ||u||_p must sit within
    // the shell's wavenumber span; the widest admissible bracket with
    // alpha = 4/3 on the unit torus is [3/8, 8/3] * 2^l.
    for (int n : {64, 128}) {
        TorusGrid g = TorusGrid::square(n);
        DyadicDecomposition dec(g);

        // Pure shell modes: the ratio is exactly |k|/2^l for every p.
        for (int l = 0; l <= 5; ++l) {
            SpectralField uh(g, 1);
            add_cos_mode(uh, shell_mode(l), 1.0);
            for (double p : {2.0, 4.0, inf}) {
                const double ratio =
                    lp_norm(gradient(uh), p) / lp_norm(uh, p) / std::ldexp(1.0, l);
                CHECK(ratio >= 3.0 / 8.0);
                CHECK(ratio <= 8.0 / 3.0);
            }
        }

        // Random block-filtered fields: Parseval pins the p = 2 ratio inside
        // the exact shell support [3/4, 8/3] * 2^l.
        SpectralField uh = transform(random_smooth(g, 1, 5 + n, n / 8.0));
        for (int l = 2; l <= 4; ++l) {
            SpectralField bl = dec.block(uh, l);
            const double ratio = l2_norm(gradient(bl)) / l2_norm(bl) / std::ldexp(1.0, l);
            CHECK(ratio >= 3.0 / 4.0);
            CHECK(ratio <= 8.0 / 3.0);
        }
    }
}

TEST_CASE("derivative shifts Besov regularity by one, p = 2 bracket exact") {
    TorusGrid g = TorusGrid::square(64);
    DyadicDecomposition dec(g);
    SpectralField uh = transform(random_smooth(g, 1, 21, 8.0));
    const double s = 0.8;
    for (double r : {1.0, 2.0, inf}) {
        const double num = dec.besov_norm(gradient(uh), s - 1.0, 2.0, r);
        const double den = dec.besov_norm(uh, s, 2.0, r);
        // Per block, Parseval bounds ||grad Delta_l u||_2 between 3/4*2^l and
        // 8/3*2^l times ||Delta_l u||_2, and the bracket survives the lr sum.
        CHECK(num / den >= 0.75);
        CHECK(num / den <= 8.0 / 3.0);
    }
}

TEST_CASE("r-monotonicity and blockwise interpolation") {
    TorusGrid g = TorusGrid::square(64);
    DyadicDecomposition dec(g);
    SpectralField uh = transform(random_smooth(g, 1, 33, 10.0));

    const double s = 0.4, p = 3.0;
    const double n1 = dec.besov_norm(uh, s, p, 1.0);
    const double n2 = dec.besov_norm(uh, s, p, 2.0);
    const double n4 = dec.besov_norm(uh, s, p, 4.0);
    const double ninf = dec.besov_norm(uh, s, p, inf);
    CHECK(n1 >= n2);
    CHECK(n2 >= n4);
    CHECK(n4 >= ninf);

    // r = inf interpolation is exact: max of a product of powers is bounded
    // by the product of the maxes.
    const double s1 = -0.5, s2 = 1.5;
    for (double theta : {0.25, 0.5, 0.9}) {
        const double mid = dec.besov_norm(uh, theta * s1 + (1 - theta) * s2, p, inf);
        const double bound = std::pow(dec.besov_norm(uh, s1, p, inf), theta) *
                             std::pow(dec.besov_norm(uh, s2, p, inf), 1 - theta);
        CHECK(mid <= bound * (1.0 + 1e-12));
    }
}

TEST_CASE("embedding: lower integrability with spent regularity, single mode") {
    TorusGrid g = TorusGrid::square(64);
    DyadicDecomposition dec(g);
    const int l = 3;
    SpectralField uh(g, 1);
    add_cos_mode(uh, shell_mode(l), 1.0);

    // ||u||_{B^{s - N(1/p1 - 1/p2)}_{p2,r}} <= C ||u||_{B^s_{p1,r}}; for a pure
    // mode both sides are explicit and C = 1 already works.
    const double s = 1.1;
    const double lhs = dec.besov_norm(uh, s - 2.0 * (1.0 / 2.0 - 0.0), inf, 1.0);
    const double rhs = dec.besov_norm(uh, s, 2.0, 1.0);
    CHECK(lhs <= rhs);
}

TEST_CASE("b_gamma_norm: constants, gradient comparison, validation") {
    TorusGrid g = TorusGrid::square(64);
    DyadicDecomposition dec(g);

    SpectralField c(g, 1);
    c(0, 0) = -2.0;
    auto gamma_one = [](double) { return 1.0; };
    CHECK(dec.b_gamma_norm(c, gamma_one) == doctest::Approx(2.0));

    // With Gamma == 1 the sup term brackets the true gradient sup: the sup
    // includes the saturated low-pass (= identity), and each S_j is an
    // averaging filter with kernel mass O(1).
    SpectralField uh = transform(random_smooth(g, 1, 44, 6.0));
    const double uinf = lp_norm(uh, inf);
    const double ginf = lp_norm(gradient(uh), inf);
    const double b = dec.b_gamma_norm(uh, gamma_one);
    CHECK(b >= uinf + ginf * (1.0 - 1e-12));
    CHECK(b <= uinf + 3.0 * ginf);

    CHECK_THROWS_AS(dec.b_gamma_norm(uh, [](double) { return 0.0; }), ParameterError);
}

TEST_CASE("v_prime: zero field, coincidence with b_gamma sup term, validation") {
    TorusGrid g = TorusGrid::square(32);
    DyadicDecomposition dec(g);

    SpectralField z(g, 2);
    CHECK(dec.v_prime(z, 3.0, 0.5) == 0.0);

    SpectralField v = transform(random_smooth(g, 1, 7, 5.0));
    auto gamma_one = [](double) { return 1.0; };
    const double sup_term = dec.b_gamma_norm(v, gamma_one) - lp_norm(v, inf);
    CHECK(dec.v_prime(v, inf, 0.0) == doctest::Approx(sup_term).epsilon(1e-12));

    CHECK_THROWS_AS(dec.v_prime(v, 0.5, 0.5), ParameterError);
    CHECK_THROWS_AS(dec.v_prime(v, 2.0, 1.5), ParameterError);
}

TEST_CASE("Chemin-Lerner accumulator: constants, orderings, equality at r = rho") {
    TorusGrid g = TorusGrid::square(64);
    DyadicDecomposition dec(g);
    SpectralField uh = transform(random_smooth(g, 1, 60, 7.0));

    CheminLernerAccumulator acc(dec, 2.0);
    CHECK_THROWS_AS(acc.chemin_lerner(inf, 0.0, 2.0), StateError);

    acc.record(0.0, uh);
    acc.record(0.5, uh);
    acc.record(1.25, uh);
    CHECK_THROWS_AS(acc.record(1.0, uh), StateError);

    // Time-constant field: tilde-L^inf norm equals the static Besov norm and
    // the L^1-in-time norms equal T times it.
    const double stat = dec.besov_norm(uh, 0.7, 2.0, 2.0);
    CHECK(acc.chemin_lerner(inf, 0.7, 2.0) == doctest::Approx(stat).epsilon(1e-13));
    CHECK(acc.lebesgue_besov(inf, 0.7, 2.0) == doctest::Approx(stat).epsilon(1e-13));
    CHECK(acc.chemin_lerner(1.0, 0.7, 2.0) == doctest::Approx(1.25 * stat).epsilon(1e-13));

    // r = rho: the two orderings agree exactly (linearity of the quadrature).
    CheminLernerAccumulator acc2(dec, 2.0);
    for (int i = 0; i <= 4; ++i) {
        SpectralField w = transform(random_smooth(g, 1, 100 + i, 7.0));
        acc2.record(0.3 * i, w);
    }
    CHECK(acc2.chemin_lerner(2.0, 0.4, 2.0) ==
          doctest::Approx(acc2.lebesgue_besov(2.0, 0.4, 2.0)).epsilon(1e-13));
    // Minkowski ordering on both sides of r = rho.
    CHECK(acc2.chemin_lerner(inf, 0.4, 1.0) >=
          acc2.lebesgue_besov(inf, 0.4, 1.0) * (1.0 - 1e-13));
    CHECK(acc2.chemin_lerner(1.0, 0.4, inf) <=
          acc2.lebesgue_besov(1.0, 0.4, inf) * (1.0 + 1e-13));
}

TEST_CASE("staggered two-block trajectory: tilde norm strictly larger") {
    TorusGrid g = TorusGrid::square(64);
    DyadicDecomposition dec(g);
    const double amp = 1.0 / std::sqrt(2.0 * pi * pi);  // unit L^2 per mode

    SpectralField u0(g, 1), u1(g, 1);
    add_cos_mode(u0, shell_mode(2), amp);
    add_cos_mode(u1, shell_mode(5), amp);

    CheminLernerAccumulator acc(dec, 2.0);
    acc.record(0.0, u0);
    acc.record(1.0, u1);

    // Blockwise sup in time sees both shells (2), the sup of the Besov norm
    // sees one at a time (1).
    CHECK(acc.chemin_lerner(inf, 0.0, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(acc.lebesgue_besov(inf, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));

    // Tail variant drops the low shell.
    CHECK(acc.chemin_lerner_tail(inf, 0.0, 1.0, 3) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(acc.chemin_lerner_tail(inf, 0.0, 1.0, dec.lmax() + 1) == 0.0);
}

TEST_CASE("log-interpolation check: geometric block profile in closed form") {
    TorusGrid g = TorusGrid::square(64);
    DyadicDecomposition dec(g);
    const double s = 0.9, eps = 1.0;
    const double amp = 1.0 / std::sqrt(2.0 * pi * pi);

    // ||Delta_l u||_2 = 2^{-l s} for l = 0..5: flat weighted profile.
    SpectralField uh(g, 1);
    for (int l = 0; l <= 5; ++l)
        add_cos_mode(uh, shell_mode(l), amp * std::pow(2.0, -l * s));

    CheminLernerAccumulator acc(dec, 2.0);
    acc.record(0.0, uh);

    LogInterpolationCheck chk = log_interpolation_check(acc, inf, s, eps);
    CHECK(!chk.degenerate);
    CHECK(chk.lhs == doctest::Approx(6.0).epsilon(1e-10));
    CHECK(chk.x == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(chk.y == doctest::Approx(32.0).epsilon(1e-9));
    const double expected_rhs = (1.0 + eps) / eps * chk.x * (1.0 + std::log(chk.y / chk.x));
    CHECK(chk.rhs == doctest::Approx(expected_rhs));
    CHECK(chk.lhs <= chk.rhs);
    CHECK(chk.ratio() > 0.0);

    // Zero field degenerates.
    CheminLernerAccumulator zacc(dec, 2.0);
    zacc.record(0.0, SpectralField(g, 1));
    CHECK(log_interpolation_check(zacc, inf, s, eps).degenerate);
}
