#pragma once

#include <complex>
#include <span>
#include <vector>

namespace spectra {

using cplx = std::complex<double>;

struct PowerExpResult {
    std::vector<cplx> values;  // one per requested exponent q
    double l1_scale = 0.0;     // integral of |integrand| for the first q
    int panels = 0;
    bool converged = false;
};

// Computes  int_0^inf v^q exp(-A v^p - B v) dv  for every q in qs.
//
// Needs p > 1 and either Re A > 0, or Re A == 0 with Re B > 0. Panels are
// sized from the local oscillation frequency and decay rate, graded
// dyadically towards v = 0, and refined by halving the width until two
// successive results agree to rel_tol of the L1 scale.
PowerExpResult power_exp_integral(cplx A, cplx B, double p, std::span<const double> qs,
                                  double rel_tol = 1e-13);

// Composite 32-point Gauss-Legendre rule on [a,b] with n equal panels.
template <class F>
auto gauss_legendre(F&& f, double a, double b, int n) -> decltype(f(a));

const double* gl32_nodes();    // 32 nodes on [-1,1]
const double* gl32_weights();  // matching weights

template <class F>
auto gauss_legendre(F&& f, double a, double b, int n) -> decltype(f(a)) {
    using R = decltype(f(a));
    const double* x = gl32_nodes();
    const double* w = gl32_weights();
    R sum{};
    double h = (b - a) / n;
    for (int k = 0; k < n; ++k) {
        double c = a + (k + 0.5) * h, r = 0.5 * h;
        for (int j = 0; j < 32; ++j) sum += w[j] * r * f(c + r * x[j]);
    }
    return sum;
}

}  // namespace spectra
