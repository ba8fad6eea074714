#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "spectra/stable.hpp"

namespace spectra {

using cplx = std::complex<double>;

// Principal branch x^a on C \ R^-, angle in (-pi, pi]. On the negative real
// axis a negative zero imaginary part selects the limit from below,
// r^a e^{-i pi a}.
cplx power_branch(cplx x, double a);

// g(y) = (2/alpha) int_0^inf exp(-v^{2/alpha}) exp(-v y) dv and its derivative.
cplx g_alpha(cplx y, double alpha);
struct GValue {
    cplx g, dg;
};
GValue g_alpha_d(cplx y, double alpha);

struct YSolution {
    cplx z;                  // point; Im z = 0 for boundary solutions
    cplx y;                  // Y_z
    cplx x_value;            // X_z = (-z)^{alpha/2} Y_z
    double residual = 0.0;
    bool converged = false;
    bool boundary = false;
    int iterations = 0;
    double failed_eta = 0.0;  // first eta at which a continuation ladder failed
};

struct SolverOptions {
    int max_iter = 200;
    int stall_limit = 25;
    double tol = 1e-10;          // residual <= tol (1 + |(-z)^alpha|)
    double direct_radius = 10.0;  // |z| from which Newton starts at the asymptotic seed
};

// Y0 = C(alpha) Gamma(alpha/2) / (-z)^alpha
cplx asymptotic_seed(cplx z, const AlphaContext& ctx);

// Residual |C g(c y) - (-z)^alpha y|; boundary selects the x + i0 limit.
double y_residual(cplx z, cplx y, const AlphaContext& ctx, bool boundary = false);

// Newton with damping {1, 1/2, 1/4, 1/8}. Without a seed, points with
// |z| >= direct_radius start at the asymptotic seed; closer points are reached
// by warm-started continuation down the vertical line from Re z + i direct_radius.
YSolution solve_Y(cplx z, const AlphaContext& ctx, std::optional<cplx> seed = {},
                  const SolverOptions& opt = {});

// Newton on the boundary equation at z = x + i0 from the given seed.
YSolution solve_boundary(double x, const AlphaContext& ctx, cplx seed, const SolverOptions& opt = {});

// Halving eta ladder at fixed x from eta_start to eta_min. With eta_min = 0 the
// ladder runs down to min(1e-6, 1e-3 |x|) and ends with a boundary solve, which
// must agree with the last ladder value to 2%.
YSolution continue_to_axis(double x, const AlphaContext& ctx, double eta_start = 1.0,
                           double eta_min = 0.0, const SolverOptions& opt = {});

// G(z) = (1/z) int_0^inf e^{-t} exp(-c t^{alpha/2} Y_z) dt; boundary solutions give G(x + i0).
cplx stieltjes_G(const YSolution& y, const AlphaContext& ctx);

struct DensityPoint {
    double x = 0.0;
    double rho = 0.0;
    double eta_used = 0.0;  // 0 for boundary values
    bool failed = false;
};

DensityPoint density_at(double x, const AlphaContext& ctx);
double density_eta(double x, double eta, const AlphaContext& ctx);

// -(1/pi) Im G(x + i eta) along a sorted grid, warm-starting each point from
// its neighbour and re-checking against a cold solve every `check_every` points.
std::vector<double> density_eta_line(const std::vector<double>& xs, double eta, const AlphaContext& ctx,
                                     int check_every = 200);

struct DensityCurve {
    std::vector<double> x;
    std::vector<double> rho;
    std::vector<double> eta_used;
    std::vector<bool> failed;
};

// Log-spaced near 0 and in the far tail, linear in the bulk; symmetric, 0 excluded.
std::vector<double> default_density_grid(double x_lo = 1e-4, double x_bulk = 20.0, double x_hi = 1e4,
                                         int per_decade = 20, double bulk_step = 0.1);

DensityCurve density_curve(const std::vector<double>& xs, const AlphaContext& ctx, unsigned threads = 1);

struct MassReport {
    double grid = 0.0;       // trapezoid over the grid, both sides
    double near_zero = 0.0;  // power-law correction on (-x_lo, x_lo)
    double far_tail = 0.0;   // power-law correction beyond the outermost points
    double total = 0.0;
};

MassReport density_mass(const DensityCurve& c);

struct TailEstimate {
    double value = 0.0;
    double error = 0.0;
    std::array<double, 4> x = {20, 40, 80, 160};
    std::array<double, 4> scaled = {};  // x^{alpha+1} rho(x)
};

// Two-level Richardson extrapolation of x^{alpha+1} rho(x), correction
// exponents alpha and 2 alpha. Throws when the extrapolants disagree by more
// than 20%.
TailEstimate tail_constant(const AlphaContext& ctx);

// i int_0^inf (it)^{alpha/2-1} e^{itz} exp(-(-z)^{alpha/2} (it)^{alpha/2} y) dt
// integrated along the ray u = e^{i psi} r.
cplx repre_rhs(cplx z, cplx y, const AlphaContext& ctx, double psi);
// |rhs on the ray psi = pi - arg z  -  (-1/z)^{alpha/2} g(y)|
double repre_check(cplx z, cplx y, const AlphaContext& ctx);
// |(1/z)^{alpha/2} - i C(alpha) int_0^inf (it)^{alpha/2-1} e^{itz} dt|
double repre1_check(cplx z, const AlphaContext& ctx);

struct CbResult {
    double x = 0.0;
    cplx k;              // K_x
    cplx x_value;        // X_x from the boundary-continued solver
    double cb_density = 0.0;
    double density = 0.0;  // -(1/pi) Im G(x + i0)
    double stable_scale = 0.0;  // real stable parameters read off e^{i pi alpha/4} K
    double stable_skew = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Solves K = i C int_0^inf (it)^{alpha/2-1} e^{itx} exp(-c (it)^{alpha/2} K) dt
// by Newton from X_x, then evaluates the density
// (1/pi) Re int_0^inf e^{itx} exp(-c (it)^{alpha/2} K) dt.
CbResult cb_fixed_point(double x, const AlphaContext& ctx);

}  // namespace spectra
