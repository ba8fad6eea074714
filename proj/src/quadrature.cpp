#include "spectra/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace spectra {

namespace {

struct Gl32 {
    std::array<double, 32> x{}, w{};
    Gl32() {
        using G = boost::math::quadrature::gauss<double, 32>;
        const auto& a = G::abscissa();
        const auto& wt = G::weights();
        for (std::size_t i = 0; i < a.size(); ++i) {
            x[15 - i] = -a[i];
            w[15 - i] = wt[i];
            x[16 + i] = a[i];
            w[16 + i] = wt[i];
        }
    }
};

const Gl32& gl() {
    static const Gl32 t;
    return t;
}

constexpr int kGrading = 30;
constexpr double kDepth = 46.0;

struct Integrand {
    cplx A, B;
    double p;
    std::span<const double> qs;
    double shift;  // subtracted from Re of exponent to avoid overflow

    double width(double v, double kappa, double cap) const {
        double vp1 = v > 0 ? std::pow(v, p - 1.0) : 0.0;
        double osc = std::abs(A.imag()) * p * vp1 + std::abs(B.imag());
        double dec = std::abs(A.real()) * p * vp1 + std::abs(B.real());
        double h = cap;
        if (osc > 0) h = std::min(h, 4.0 * M_PI / osc);
        if (dec > 0) h = std::min(h, 8.0 / dec);
        return kappa * h;
    }

    void panel(double a, double b, std::vector<cplx>& acc, double& l1) const {
        const auto& t = gl();
        double c = 0.5 * (a + b), r = 0.5 * (b - a);
        for (int j = 0; j < 32; ++j) {
            double v = c + r * t.x[j];
            double lv = std::log(v);
            double vp = std::exp(p * lv);
            cplx e = std::exp(-A * vp - B * v - shift) * (r * t.w[j]);
            for (std::size_t k = 0; k < qs.size(); ++k) {
                cplx term = qs[k] == 0.0 ? e : e * std::exp(qs[k] * lv);
                acc[k] += term;
                if (k == 0) l1 += std::abs(term);
            }
        }
    }
};

// Re of the exponent -A v^p - B v.
double re_exponent(cplx A, cplx B, double p, double v) {
    return -A.real() * std::pow(v, p) - B.real() * v;
}

}  // namespace

const double* gl32_nodes() { return gl().x.data(); }
const double* gl32_weights() { return gl().w.data(); }

PowerExpResult power_exp_integral(cplx A, cplx B, double p, std::span<const double> qs,
                                  double rel_tol) {
    if (!(p > 1.0)) throw std::invalid_argument("power_exp_integral: need p > 1");
    if (qs.empty()) throw std::invalid_argument("power_exp_integral: no exponents");
    if (A.real() < 0 || (A.real() == 0 && B.real() <= 0))
        throw std::domain_error("power_exp_integral: integrand does not decay");

    double qmax = *std::max_element(qs.begin(), qs.end());

    // Peak of the real exponent.
    double vstar = 0.0, peak = 0.0;
    if (A.real() > 0 && B.real() < 0) {
        vstar = std::pow(-B.real() / (p * A.real()), 1.0 / (p - 1.0));
        peak = re_exponent(A, B, p, vstar);
    }
    auto below = [&](double v) {
        return re_exponent(A, B, p, v) + qmax * std::log(std::max(v, 1.0)) <= peak - kDepth;
    };
    double hi = std::max(vstar, 1.0);
    while (!below(hi)) {
        hi *= 2.0;
        if (hi > 1e12) throw std::domain_error("power_exp_integral: no cut-off found");
    }
    double lo = vstar;
    for (int it = 0; it < 100 && hi - lo > 1e-12 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (below(mid) ? hi : lo) = mid;
    }
    double vmax = hi;

    Integrand f{A, B, p, qs, peak};
    PowerExpResult prev;
    bool have_prev = false;
    for (double kappa = 1.0; kappa >= 1.0 / 256; kappa *= 0.5) {
        PowerExpResult cur;
        cur.values.assign(qs.size(), cplx{});
        double cap = vmax / 4.0;
        double h0 = std::min(f.width(0.0, kappa, cap), f.width(std::min(1.0, vmax), kappa, cap));
        h0 = std::min(h0, vmax);
        double a = h0;
        for (int k = 0; k < kGrading; ++k) {
            f.panel(0.5 * a, a, cur.values, cur.l1_scale);
            a *= 0.5;
            ++cur.panels;
        }
        f.panel(0.0, a, cur.values, cur.l1_scale);
        ++cur.panels;
        double v = h0;
        while (v < vmax) {
            double h = f.width(v, kappa, cap);
            h = std::min(h, f.width(v + h, kappa, cap));
            double b = std::min(v + h, vmax);
            if (vmax - b < 0.05 * h) b = vmax;
            f.panel(v, b, cur.values, cur.l1_scale);
            ++cur.panels;
            v = b;
        }
        if (have_prev) {
            double diff = 0.0;
            for (std::size_t k = 0; k < qs.size(); ++k)
                diff = std::max(diff, std::abs(cur.values[k] - prev.values[k]));
            double scale = std::max(cur.l1_scale, std::numeric_limits<double>::min());
            if (diff <= rel_tol * scale) {
                cur.converged = true;
                prev = std::move(cur);
                break;
            }
        }
        prev = std::move(cur);
        have_prev = true;
    }
    double factor = std::exp(peak);
    for (auto& v : prev.values) v *= factor;
    prev.l1_scale *= factor;
    return prev;
}

}  // namespace spectra
