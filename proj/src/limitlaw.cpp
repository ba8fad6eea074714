#include "spectra/limitlaw.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spectra/quadrature.hpp"
#include "spectra/rng.hpp"

namespace spectra {

namespace {

const cplx I1(0.0, 1.0);

double p_of(const AlphaContext& c) { return 2.0 / c.alpha; }

// (-z)^a; for boundary points the limit from z = x + i0.
cplx minus_z_pow(cplx z, double a, bool boundary) {
    if (boundary) return power_branch(cplx(-z.real(), -0.0), a);
    return power_branch(-z, a);
}

YSolution newton(cplx z, bool boundary, cplx y0, const AlphaContext& ctx, const SolverOptions& opt) {
    const double a = ctx.alpha, c = ctx.c_scale;
    const cplx C = ctx.c_complex;
    const cplx w = minus_z_pow(z, a, boundary);
    const double tol = opt.tol * (1.0 + std::abs(w));

    auto eval = [&](cplx y, cplx& F, cplx& dF) {
        GValue gv = g_alpha_d(c * y, a);
        F = C * gv.g - w * y;
        dF = C * c * gv.dg - w;
    };

    YSolution s;
    s.z = boundary ? cplx(z.real(), 0.0) : z;
    s.boundary = boundary;
    cplx y = y0, F, dF;
    double r;
    try {
        eval(y, F, dF);
        r = std::abs(F);
    } catch (const std::domain_error&) {
        r = INFINITY;
    }
    int stall = 0, polish = 0, it = 0;
    bool ok = false;
    static const double lams[] = {1.0, 0.5, 0.25, 0.125};
    for (; it < opt.max_iter && std::isfinite(r); ++it) {
        if (r <= tol) {
            ok = true;
            if (polish >= 2) break;
        }
        if (dF == cplx(0.0)) break;
        cplx step = -F / dF;
        cplx yn, Fn, dFn;
        double rn = INFINITY;
        bool improved = false;
        for (double lam : lams) {
            yn = y + lam * step;
            try {
                eval(yn, Fn, dFn);
                rn = std::abs(Fn);
            } catch (const std::domain_error&) {
                rn = INFINITY;
            }
            if (std::isfinite(rn) && rn < r) {
                improved = true;
                break;
            }
        }
        if (ok) {
            if (!improved) break;
            ++polish;
        } else if (!improved) {
            if (++stall >= opt.stall_limit || !std::isfinite(rn)) break;
        } else {
            stall = 0;
        }
        y = yn;
        F = Fn;
        dF = dFn;
        r = rn;
    }
    s.y = y;
    s.residual = r;
    s.iterations = it;
    s.converged = std::isfinite(r) && r <= tol;
    s.x_value = minus_z_pow(z, a / 2.0, boundary) * y;
    return s;
}

// Warm-started move along Re z = xr from height h_from (solution y) to h_to,
// splitting the step geometrically when Newton fails.
bool descend(double xr, double h_from, cplx& y, double h_to, const AlphaContext& ctx,
             const SolverOptions& opt, int depth, YSolution& out) {
    YSolution s = newton(cplx(xr, h_to), false, y, ctx, opt);
    if (s.converged) {
        y = s.y;
        out = s;
        return true;
    }
    if (depth == 0) return false;
    double h_mid = std::sqrt(h_from * h_to);
    return descend(xr, h_from, y, h_mid, ctx, opt, depth - 1, out) &&
           descend(xr, h_mid, y, h_to, ctx, opt, depth - 1, out);
}

}  // namespace

cplx power_branch(cplx x, double a) {
    double r = std::abs(x);
    if (r == 0.0) {
        if (a > 0) return 0.0;
        throw std::domain_error("power_branch: zero base with non-positive exponent");
    }
    return std::polar(std::pow(r, a), a * std::atan2(x.imag(), x.real()));
}

GValue g_alpha_d(cplx y, double alpha) {
    const double p = 2.0 / alpha;
    static const double qs[] = {0.0, 1.0};
    PowerExpResult r = power_exp_integral(1.0, y, p, qs);
    return {p * r.values[0], -p * r.values[1]};
}

cplx g_alpha(cplx y, double alpha) {
    const double p = 2.0 / alpha;
    static const double qs[] = {0.0};
    return p * power_exp_integral(1.0, y, p, qs).values[0];
}

cplx asymptotic_seed(cplx z, const AlphaContext& ctx) {
    return ctx.c_complex * std::tgamma(ctx.alpha / 2.0) / power_branch(-z, ctx.alpha);
}

double y_residual(cplx z, cplx y, const AlphaContext& ctx, bool boundary) {
    cplx w = minus_z_pow(z, ctx.alpha, boundary);
    return std::abs(ctx.c_complex * g_alpha(ctx.c_scale * y, ctx.alpha) - w * y);
}

YSolution solve_Y(cplx z, const AlphaContext& ctx, std::optional<cplx> seed, const SolverOptions& opt) {
    if (!(z.imag() > 0)) throw std::invalid_argument("solve_Y: need Im z > 0");
    if (seed) return newton(z, false, *seed, ctx, opt);
    if (std::abs(z) >= opt.direct_radius) return newton(z, false, asymptotic_seed(z, ctx), ctx, opt);

    const double xr = z.real();
    double h = opt.direct_radius;
    YSolution cur = newton(cplx(xr, h), false, asymptotic_seed(cplx(xr, h), ctx), ctx, opt);
    if (!cur.converged) {
        cur.failed_eta = h;
        return cur;
    }
    cplx y = cur.y;
    while (h > z.imag()) {
        double hn = std::max(0.5 * h, z.imag());
        if (!descend(xr, h, y, hn, ctx, opt, 8, cur)) {
            YSolution f = newton(z, false, y, ctx, opt);
            f.converged = false;
            f.failed_eta = hn;
            return f;
        }
        h = hn;
    }
    return cur;
}

YSolution solve_boundary(double x, const AlphaContext& ctx, cplx seed, const SolverOptions& opt) {
    if (x == 0.0) throw std::invalid_argument("solve_boundary: x = 0 excluded");
    return newton(cplx(x, 0.0), true, seed, ctx, opt);
}

YSolution continue_to_axis(double x, const AlphaContext& ctx, double eta_start, double eta_min,
                           const SolverOptions& opt) {
    if (x == 0.0) throw std::invalid_argument("continue_to_axis: x = 0 excluded");
    if (!(eta_start > 0) || eta_min < 0 || (eta_min > 0 && eta_min >= eta_start))
        throw std::invalid_argument("continue_to_axis: need eta_start > eta_min >= 0");
    YSolution cur = solve_Y(cplx(x, eta_start), ctx, {}, opt);
    if (!cur.converged) {
        if (cur.failed_eta == 0.0) cur.failed_eta = eta_start;
        return cur;
    }
    const double floor = eta_min > 0 ? eta_min : std::min(1e-6, 1e-3 * std::abs(x));
    double eta = eta_start;
    cplx y = cur.y;
    while (eta > floor) {
        double en = std::max(0.5 * eta, floor);
        if (!descend(x, eta, y, en, ctx, opt, 8, cur)) {
            cur.converged = false;
            cur.failed_eta = en;
            return cur;
        }
        eta = en;
    }
    if (eta_min > 0) return cur;
    YSolution b = solve_boundary(x, ctx, y, opt);
    if (b.converged && std::abs(b.y - y) > 0.02 * std::abs(b.y)) {
        b.converged = false;
        b.failed_eta = floor;
    }
    return b;
}

cplx stieltjes_G(const YSolution& y, const AlphaContext& ctx) {
    if (!y.converged) throw std::invalid_argument("stieltjes_G: unconverged Y");
    const double p = p_of(ctx);
    const double qs[] = {p - 1.0};
    cplx I = power_exp_integral(1.0, ctx.c_scale * y.y, p, qs).values[0];
    return p * I / y.z;
}

DensityPoint density_at(double x, const AlphaContext& ctx) {
    DensityPoint d;
    d.x = x;
    YSolution s = continue_to_axis(x, ctx, 1.0, 0.0);
    if (!s.converged) {
        d.failed = true;
        d.rho = NAN;
        return d;
    }
    d.rho = -stieltjes_G(s, ctx).imag() / M_PI;
    if (d.rho < 0) {
        if (d.rho >= -1e-9) {
            d.rho = 0.0;
        } else {
            d.failed = true;
        }
    }
    return d;
}

double density_eta(double x, double eta, const AlphaContext& ctx) {
    if (!(eta > 0)) throw std::invalid_argument("density_eta: eta must be positive");
    YSolution s = solve_Y(cplx(x, eta), ctx);
    if (!s.converged) throw std::runtime_error("density_eta: solver did not converge");
    return -stieltjes_G(s, ctx).imag() / M_PI;
}

std::vector<double> density_eta_line(const std::vector<double>& xs, double eta, const AlphaContext& ctx,
                                     int check_every) {
    std::vector<double> out(xs.size());
    std::optional<cplx> prev;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        cplx z(xs[i], eta);
        YSolution s;
        bool cold = !prev || (check_every > 0 && i % check_every == 0);
        if (!cold) {
            s = solve_Y(z, ctx, prev);
            if (!s.converged) cold = true;
        }
        if (cold) s = solve_Y(z, ctx);
        if (!s.converged) throw std::runtime_error("density_eta_line: solver did not converge");
        prev = s.y;
        out[i] = -stieltjes_G(s, ctx).imag() / M_PI;
    }
    return out;
}

std::vector<double> default_density_grid(double x_lo, double x_bulk, double x_hi, int per_decade,
                                         double bulk_step) {
    std::vector<double> pos;
    int n1 = static_cast<int>(std::lround(-std::log10(x_lo) * per_decade));
    for (int i = 0; i <= n1; ++i) pos.push_back(x_lo * std::pow(10.0, static_cast<double>(i) / per_decade));
    int n2 = static_cast<int>(std::lround((x_bulk - 1.0) / bulk_step));
    for (int i = 1; i <= n2; ++i) pos.push_back(1.0 + i * bulk_step);
    int n3 = static_cast<int>(std::lround(std::log10(x_hi / x_bulk) * per_decade));
    for (int i = 1; i <= n3; ++i) pos.push_back(x_bulk * std::pow(10.0, static_cast<double>(i) / per_decade));
    std::vector<double> xs;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) xs.push_back(-*it);
    xs.insert(xs.end(), pos.begin(), pos.end());
    return xs;
}

DensityCurve density_curve(const std::vector<double>& xs, const AlphaContext& ctx, unsigned threads) {
    std::vector<DensityPoint> pts(xs.size());
    parallel_for(xs.size(), threads, [&](std::size_t i) { pts[i] = density_at(xs[i], ctx); });
    DensityCurve c;
    for (const auto& d : pts) {
        c.x.push_back(d.x);
        c.rho.push_back(d.rho);
        c.eta_used.push_back(d.eta_used);
        c.failed.push_back(d.failed);
    }
    return c;
}

MassReport density_mass(const DensityCurve& c) {
    MassReport m;
    for (int side : {1, -1}) {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < c.x.size(); ++i)
            if (!c.failed[i] && c.x[i] * side > 0) pts.push_back({std::abs(c.x[i]), c.rho[i]});
        std::sort(pts.begin(), pts.end());
        if (pts.size() < 3) continue;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            auto [x0, r0] = pts[i];
            auto [x1, r1] = pts[i + 1];
            m.grid += 0.5 * (x0 * r0 + x1 * r1) * std::log(x1 / x0);
        }
        auto [a0, b0] = pts[0];
        auto [a1, b1] = pts[1];
        double gamma = b0 > 0 && b1 > 0 ? -std::log(b1 / b0) / std::log(a1 / a0) : 0.0;
        m.near_zero += gamma < 1.0 ? a0 * b0 / (1.0 - gamma) : INFINITY;
        auto [xn1, rn1] = pts[pts.size() - 2];
        auto [xn, rn] = pts.back();
        double kappa = rn > 0 && rn1 > 0 ? -std::log(rn / rn1) / std::log(xn / xn1) : INFINITY;
        m.far_tail += kappa > 1.0 ? xn * rn / (kappa - 1.0) : INFINITY;
    }
    m.total = m.grid + m.near_zero + m.far_tail;
    return m;
}

TailEstimate tail_constant(const AlphaContext& ctx) {
    TailEstimate t;
    const double a = ctx.alpha;
    for (int i = 0; i < 4; ++i) {
        DensityPoint d = density_at(t.x[i], ctx);
        if (d.failed) throw std::runtime_error("tail_constant: density failed on the tail grid");
        t.scaled[i] = std::pow(t.x[i], a + 1.0) * d.rho;
    }
    double r1 = std::pow(2.0, a), r2 = std::pow(2.0, 2.0 * a);
    double l1[3], l2[2];
    for (int i = 0; i < 3; ++i) l1[i] = (r1 * t.scaled[i + 1] - t.scaled[i]) / (r1 - 1.0);
    for (int i = 0; i < 2; ++i) l2[i] = (r2 * l1[i + 1] - l1[i]) / (r2 - 1.0);
    t.value = l2[1];
    t.error = std::abs(l2[1] - l2[0]);
    if (!(t.error <= 0.2 * std::abs(t.value)))
        throw std::runtime_error("tail_constant: x^{alpha+1} rho(x) does not plateau");
    return t;
}

cplx repre_rhs(cplx z, cplx y, const AlphaContext& ctx, double psi) {
    if (!(z.imag() > 0)) throw std::invalid_argument("repre_rhs: need Im z > 0");
    const double s = ctx.alpha / 2.0, p = p_of(ctx);
    cplx ray = std::polar(1.0, psi), ray_s = std::polar(1.0, psi * s);
    cplx A = -ray * z;
    cplx B = power_branch(-z, s) * ray_s * y;
    static const double qs[] = {0.0};
    return p * ray_s * power_exp_integral(A, B, p, qs).values[0];
}

double repre_check(cplx z, cplx y, const AlphaContext& ctx) {
    cplx lhs = power_branch(-1.0 / z, ctx.alpha / 2.0) * g_alpha(y, ctx.alpha);
    return std::abs(repre_rhs(z, y, ctx, M_PI - std::arg(z)) - lhs);
}

double repre1_check(cplx z, const AlphaContext& ctx) {
    cplx rhs = ctx.c_complex * repre_rhs(z, 0.0, ctx, M_PI - std::arg(z));
    return std::abs(power_branch(1.0 / z, ctx.alpha / 2.0) - rhs);
}

CbResult cb_fixed_point(double x, const AlphaContext& ctx) {
    if (!(x > 0)) throw std::invalid_argument("cb_fixed_point: need x > 0");
    CbResult r;
    r.x = x;
    YSolution s = continue_to_axis(x, ctx, 1.0, 0.0);
    if (!s.converged) return r;
    r.x_value = s.x_value;
    r.density = -stieltjes_G(s, ctx).imag() / M_PI;

    const double a = ctx.alpha, p = p_of(ctx);
    const cplx is = std::polar(1.0, M_PI * a / 4.0);  // i^{alpha/2}
    const cplx pref = ctx.c_complex * p * is;
    const cplx coef = ctx.c_scale * is;
    const cplx A = cplx(0.0, -x);
    static const double q01[] = {0.0, 1.0};

    cplx K = s.x_value;
    try {
        for (int it = 0; it < 60; ++it) {
            PowerExpResult J = power_exp_integral(A, coef * K, p, q01);
            cplx phi = K - pref * J.values[0];
            cplx dphi = 1.0 + pref * coef * J.values[1];
            cplx step = -phi / dphi;
            K += step;
            r.iterations = it + 1;
            if (std::abs(step) <= 1e-14 * (1.0 + std::abs(K))) {
                r.converged = true;
                break;
            }
        }
        const double qd[] = {p - 1.0};
        r.cb_density = (p * power_exp_integral(A, coef * K, p, qd).values[0]).real() / M_PI;
    } catch (const std::domain_error&) {
        r.converged = false;
    }
    r.k = K;
    cplx e = is * K;
    r.stable_scale = e.real() / std::cos(M_PI * a / 4.0);
    r.stable_skew = -e.imag() / std::sin(M_PI * a / 4.0);
    return r;
}

}  // namespace spectra
