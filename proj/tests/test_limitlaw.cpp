#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "spectra/limitlaw.hpp"

using namespace spectra;

namespace {
// g via the t-form int t^{alpha/2-1} e^{-t} e^{-t^{alpha/2} y} dt
cplx g_oracle(cplx y, double alpha) {
    boost::math::quadrature::exp_sinh<double> q;
    auto part = [&](bool imag) {
        return q.integrate([&](double t) {
            cplx v = std::pow(t, alpha / 2 - 1) * std::exp(-t - std::pow(t, alpha / 2) * y);
            return imag ? v.imag() : v.real();
        });
    };
    return {part(false), part(true)};
}
}  // namespace

TEST_SUITE("limitlaw") {
TEST_CASE("principal branch powers") {
    CHECK(std::abs(power_branch(cplx(0, 1), 0.5) - std::polar(1.0, M_PI / 4)) < 1e-15);
    CHECK(std::abs(power_branch(4.0, 0.5) - 2.0) < 1e-15);
    CHECK(std::abs(power_branch(cplx(-1.0, -0.0), 0.5) - cplx(0, -1)) < 1e-15);
    CHECK(std::abs(power_branch(cplx(-1.0, 0.0), 0.5) - cplx(0, 1)) < 1e-15);
    CHECK_THROWS(power_branch(0.0, -1.0));
}

TEST_CASE("constants") {
    AlphaContext c = make_alpha_context(1.0);
    CHECK(c.c_scale == doctest::Approx(std::sqrt(M_PI)));
    CHECK(std::abs(c.c_complex - cplx(0, -1) / std::sqrt(M_PI)) < 1e-15);
    AlphaContext p = make_alpha_context(1.0, {PhaseConvention::printed, ScaleConvention::cosine});
    CHECK(std::abs(p.c_complex - cplx(0, 1) / std::sqrt(M_PI)) < 1e-15);
    CHECK(p.c_scale == doctest::Approx(std::cos(M_PI / 4)));
    CHECK_THROWS(make_alpha_context(2.0));
}

TEST_CASE("g_alpha") {
    CHECK(std::abs(g_alpha(0.0, 1.0) - std::sqrt(M_PI)) < 1e-13);
    for (double a : {0.25, 0.8, 1.7}) CHECK(std::abs(g_alpha(0.0, a) - std::tgamma(a / 2)) < 1e-12 * std::tgamma(a / 2));
    CHECK(std::abs(g_alpha(1.0, 1.0) - g_oracle(1.0, 1.0)) < 1e-10);
    for (double a : {0.5, 1.5})
        for (cplx y : {cplx(0.3, -0.7), cplx(2.0, 1.0), cplx(-0.5, 0.2)})
            CHECK(std::abs(g_alpha(y, a) - g_oracle(y, a)) < 1e-9 * std::abs(g_oracle(y, a)));
    CHECK(std::abs(g_alpha(1e3, 1.0)) < 3e-3);
    CHECK(std::abs(g_alpha(1e3, 1.0)) < std::abs(g_alpha(1e2, 1.0)));
    GValue d = g_alpha_d(cplx(0.4, 0.3), 1.2);
    const double h = 1e-5;
    cplx fd = (g_alpha(cplx(0.4 + h, 0.3), 1.2) - g_alpha(cplx(0.4 - h, 0.3), 1.2)) / (2 * h);
    CHECK(std::abs(d.dg - fd) < 1e-7);
    CHECK(std::abs(g_alpha_d(0.0, 0.7).dg + std::tgamma(0.7)) < 1e-11);
}

TEST_CASE("Y at z = 100i for alpha = 1") {
    AlphaContext c = make_alpha_context(1.0);
    YSolution s = solve_Y(cplx(0, 100), c);
    REQUIRE(s.converged);
    // corrected phase: e^{-i pi/2} (-z)^{-1} = +0.01
    // next order is Gamma(1-a/2) Gamma(a) / (Gamma(a/2) |z|^a) = 1% here
    CHECK(std::abs(s.y - 0.01) < 0.02 * 0.01);
    CHECK(s.y.real() > 0);
}

TEST_CASE("residual, conjugate symmetry and asymptotics") {
    for (double a : {0.5, 1.0, 1.5}) {
        AlphaContext c = make_alpha_context(a);
        for (cplx z : {cplx(0.5, 0.1), cplx(-3, 1), cplx(7, 0.01), cplx(0, 2)}) {
            YSolution s = solve_Y(z, c), m = solve_Y(-std::conj(z), c);
            REQUIRE(s.converged);
            REQUIRE(m.converged);
            CHECK(y_residual(z, s.y, c) <= 1e-10 * (1 + std::pow(std::abs(z), a)));
            CHECK(std::abs(m.y - std::conj(s.y)) < 1e-8 * std::abs(s.y));
            CHECK(std::abs(s.x_value - power_branch(-z, a / 2) * s.y) < 1e-12);
        }
        const cplx lead = c.c_complex * std::tgamma(a / 2);
        double prev = INFINITY;
        for (double r : {50.0, 100.0, 200.0}) {
            YSolution s = solve_Y(cplx(0, r), c);
            const double dev = std::abs(s.y * power_branch(cplx(0, -r), a) - lead);
            CHECK(dev < prev);
            prev = dev;
            CHECK(std::abs(s.y * power_branch(cplx(0, -r), a)) <= 2 * std::abs(lead));
        }
    }
}

TEST_CASE("first-order asymptotic correction Gamma(1-a/2) Gamma(a) / (Gamma(a/2) |z|^a)") {
    for (double a : {0.25, 0.5, 1.0}) {
        AlphaContext c = make_alpha_context(a);
        const double r = 1e4;
        YSolution s = solve_Y(cplx(0, r), c);
        const cplx lead = c.c_complex * std::tgamma(a / 2);
        const double dev = std::abs(s.y * power_branch(cplx(0, -r), a) - lead) / std::abs(lead);
        const double first = std::tgamma(1 - a / 2) * std::tgamma(a) / (std::tgamma(a / 2) * std::pow(r, a));
        CHECK(dev == doctest::Approx(first).epsilon(0.1));
    }
}

TEST_CASE("Newton from random seeds reaches the same Y for |z| >= 10") {
    AlphaContext c = make_alpha_context(0.8);
    Rng rng(4);
    for (cplx z : {cplx(0, 10), cplx(8, 7), cplx(-15, 2)}) {
        const YSolution ref = solve_Y(z, c);
        const cplx y0 = asymptotic_seed(z, c);
        for (int i = 0; i < 10; ++i) {
            const double r = 2 * std::abs(y0) * std::sqrt(uniform01(rng)), th = 2 * M_PI * uniform01(rng);
            YSolution s = solve_Y(z, c, std::polar(r, th));
            CHECK(s.converged);
            CHECK(std::abs(s.y - ref.y) <= 1e-8);
        }
    }
}

TEST_CASE("Stieltjes transform") {
    for (double a : {0.5, 1.0, 1.5}) {
        AlphaContext c = make_alpha_context(a);
        const cplx g100 = stieltjes_G(solve_Y(cplx(0, 100), c), c);
        CHECK(std::abs(g100 - cplx(0, -0.01)) < 5 * std::pow(10.0, -2 - a));
        for (cplx z : {cplx(0.3, 0.05), cplx(-2, 1), cplx(5, 3)}) {
            const cplx g = stieltjes_G(solve_Y(z, c), c);
            CHECK(g.imag() < 0);
            CHECK(std::abs(g) <= 1.0 / z.imag());
            CHECK(std::abs(stieltjes_G(solve_Y(-std::conj(z), c), c) + std::conj(g)) < 1e-10);
        }
    }
    YSolution bad;
    CHECK_THROWS(stieltjes_G(bad, make_alpha_context(1.0)));
}

TEST_CASE("continuation to the real axis") {
    AlphaContext c1 = make_alpha_context(1.0);
    YSolution far = continue_to_axis(50.0, c1);
    REQUIRE(far.converged);
    CHECK(std::abs(std::abs(far.y) * 50.0 - 1.0) < 0.02);
    YSolution direct = solve_boundary(50.0, c1, asymptotic_seed(cplx(50, -0.0), c1));
    CHECK(std::abs(direct.y - far.y) < 1e-8);

    YSolution p = continue_to_axis(2.5, c1), m = continue_to_axis(-2.5, c1);
    CHECK(std::abs(m.y - std::conj(p.y)) < 1e-9);

    AlphaContext c15 = make_alpha_context(1.5);
    YSolution b0 = continue_to_axis(3.0, c15, 1.0, 0.0), b6 = continue_to_axis(3.0, c15, 1.0, 1e-6);
    CHECK(std::abs(b0.y - b6.y) < 1e-4);
    CHECK(y_residual(cplx(3.0, 0.0), b0.y, c15, true) < 1e-9);
    CHECK_THROWS(continue_to_axis(0.0, c15));
}

TEST_CASE("density") {
    AlphaContext c = make_alpha_context(1.0);
    DensityPoint d2 = density_at(2.0, c);
    REQUIRE_FALSE(d2.failed);
    CHECK(d2.rho == doctest::Approx(0.066041).epsilon(1e-4));
    CHECK(std::abs(density_eta(2.0, 1e-4, c) - d2.rho) < 0.01);
    for (double x : {0.01, 0.7, 4.0}) CHECK(std::abs(density_at(x, c).rho - density_at(-x, c).rho) < 1e-10);
    CHECK(100.0 * density_at(10.0, c).rho == doctest::Approx(0.5).epsilon(0.1));
    for (double x : {-3.0, 0.0, 0.5, 20.0}) CHECK(density_eta(x, 0.05, c) >= 0);
    std::vector<double> xs;
    for (int i = 0; i <= 40; ++i) xs.push_back(-2 + 0.1 * i);
    const std::vector<double> line = density_eta_line(xs, 0.05, c, 7);
    for (std::size_t i = 0; i < xs.size(); i += 10) CHECK(std::abs(line[i] - density_eta(xs[i], 0.05, c)) < 1e-10);
}

TEST_CASE("Cauchy-smoothed density integrates to one") {
    // alpha = 1.5: the tails beyond |x| = 200 carry about 2 L / (alpha 200^alpha) + eta/(pi 200)
    AlphaContext c = make_alpha_context(1.5);
    const double eta = 1.0, X = 200.0, h = 0.05;
    std::vector<double> xs;
    for (double x = 0; x <= X + 1e-9; x += h) xs.push_back(x);
    const std::vector<double> r = density_eta_line(xs, eta, c);
    double s = 0;
    for (std::size_t i = 1; i < r.size(); ++i) s += 0.5 * h * (r[i - 1] + r[i]);
    s *= 2;
    const double tail = 2 * (0.75 / 1.5) * std::pow(X, -1.5) + 2 * eta / (M_PI * X);
    CHECK(std::abs(s + tail - 1.0) < 1e-3);
}

TEST_CASE("tail constant is alpha/2") {
    for (double a : {0.5, 1.0, 1.5}) {
        TailEstimate t = tail_constant(make_alpha_context(a));
        CHECK(t.value == doctest::Approx(a / 2).epsilon(0.01));
        CHECK(t.error <= 0.05 * t.value);
        CHECK(t.value > 0);
    }
}

TEST_CASE("contour representations") {
    for (double a : {0.5, 1.0, 1.5}) {
        AlphaContext c = make_alpha_context(a);
        CHECK(repre1_check(cplx(0, 1), c) < 1e-10);
        CHECK(std::abs(power_branch(cplx(0, -1), a / 2) - std::polar(1.0, -M_PI * a / 4)) < 1e-15);
        CHECK(repre1_check(cplx(-1.5, 0.4), c) < 1e-10);
    }
    AlphaContext c1 = make_alpha_context(1.0);
    CHECK(repre_check(cplx(0, 2), 1.0, c1) < 1e-8);
    const cplx z(0.7, 1.3), y(0.4, -0.2);
    const double psi0 = M_PI - std::arg(z);
    CHECK(std::abs(repre_rhs(z, y, c1, psi0) - repre_rhs(z, y, c1, psi0 - 0.3)) < 1e-10);
    AlphaContext printed = make_alpha_context(1.0, {PhaseConvention::printed, ScaleConvention::gamma});
    CHECK(repre1_check(cplx(0, 1), printed) > 0.5);
}

TEST_CASE("Cizeau-Bouchaud fixed point") {
    AlphaContext c = make_alpha_context(1.0);
    for (double x : {2.0, 5.0, 10.0}) {
        CbResult r = cb_fixed_point(x, c);
        REQUIRE(r.converged);
        CHECK(std::abs(r.k - r.x_value) < 1e-6);
        CHECK(std::abs(r.cb_density - r.density) < 1e-4);
    }
    CHECK_THROWS(cb_fixed_point(-1.0, c));
}

TEST_CASE("mass of the density curve") {
    AlphaContext c = make_alpha_context(1.0);
    DensityCurve curve = density_curve(default_density_grid(1e-3, 10.0, 1e3, 8, 0.25), c);
    MassReport m = density_mass(curve);
    CHECK(std::abs(m.total - 1.0) < 0.01);
}
}
