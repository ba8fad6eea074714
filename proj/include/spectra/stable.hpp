#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "spectra/rng.hpp"
#include "spectra/sampling.hpp"

namespace spectra {

using cplx = std::complex<double>;

// Phase of the complex constant C(alpha). `corrected` uses e^{-i pi alpha/2};
// `printed` keeps e^{+i pi alpha/2} for comparison runs only.
enum class PhaseConvention { corrected, printed };
// Scale constant c(alpha): Gamma(1 - alpha/2) or cos(pi alpha/4).
enum class ScaleConvention { gamma, cosine };

struct Conventions {
    PhaseConvention phase = PhaseConvention::corrected;
    ScaleConvention scale = ScaleConvention::gamma;
};

struct AlphaContext {
    double alpha = 1.0;
    double c_norm = 0.0;   // C_alpha
    cplx c_complex;        // C(alpha)
    double c_scale = 0.0;  // c(alpha)
    Conventions conv;
};

// C_alpha = (1-alpha)/(Gamma(2-alpha) cos(pi alpha/2)), 2/pi at alpha = 1.
double c_norm(double alpha);
AlphaContext make_alpha_context(double alpha, Conventions conv = {});

struct RealStableSpec {
    double alpha = 0.5;
    double sigma = 1.0;
    double beta = 0.0;
    double mu = 0.0;
};

// exp(-sigma^a |t|^a (1 - i beta sign(t) tan(pi a/2)) + i mu t)
cplx real_stable_cf(const RealStableSpec& s, double t);

struct ComplexAtom {
    cplx location;
    double weight;
};

struct DiscreteComplexMeasure {
    std::vector<ComplexAtom> atoms;
};

DiscreteComplexMeasure point_mass(cplx at);
// Empirical measure (1/N) sum delta_{G_k}, equal coefficients merged.
DiscreteComplexMeasure empirical_measure(const std::vector<cplx>& coeffs);

struct SigmaBeta {
    double sigma = 0.0;
    double beta = 0.0;
};

// <t,z> = Re t Re z + Im t Im z.
SigmaBeta sigma_beta(const DiscreteComplexMeasure& nu, cplx t, double alpha);

// Characteristic function E exp(i <t, X>) of P^nu with index a.
cplx complex_stable_cf(const DiscreteComplexMeasure& nu, cplx t, double a);

// E exp(-i t X) = exp(-Gamma(1-a) (it)^a int x^a dnu) for nu in the closed
// lower half-plane.
cplx fl_transform(const DiscreteComplexMeasure& nu, double t, double a);

double sample_real_stable(const RealStableSpec& s, Rng& rng);

// Exact draw from P^nu for a discrete nu: each atom g with weight w adds
// g w^{1/a} Z with Z positive Stable_a(C_a^{-1/a}, 1, 0).
cplx sample_pnu(const DiscreteComplexMeasure& nu, double a, Rng& rng);

struct TriangularArrayRow {
    std::vector<cplx> coefficients;
    double bound = 0.0;  // sup |G_{N,k}|
};

TriangularArrayRow make_row(std::vector<cplx> coeffs);

// S_N = (1/a_N) sum G_k X_k, optionally with X_k cut at N^delta a_N.
cplx triangular_sum(const TriangularArrayRow& row, const HeavyTailLaw& law, int N,
                    std::optional<double> delta, Rng& rng);

struct StableCheckOptions {
    std::optional<double> delta;
    std::vector<cplx> t_grid = {0.5, 1.0, 2.0, cplx(0, 0.5), cplx(0, 1), cplx(0, 2), cplx(1, 1)};
    double degenerate_tol = 0.05;  // limit scale sigma^alpha(1) + sigma^alpha(i) below this is flagged
    unsigned threads = 1;
};

struct StableCheckReport {
    double ks_real = 0.0;
    double ks_imag = 0.0;
    double cf_error = 0.0;
    double limit_scale = 0.0;
    bool degenerate = false;
    std::vector<cplx> sums;
};

using RowFamily = std::function<TriangularArrayRow(int)>;

// Draws `reps` sums S_N (rep r uses derive_seed(seed, r)) and compares the real
// and imaginary marginals with exact stable samples of the limit, and the
// empirical characteristic function with complex_stable_cf on the t-grid.
StableCheckReport verify_stable_convergence(const RowFamily& family, const HeavyTailLaw& law, int N,
                                            int reps, std::uint64_t seed,
                                            const StableCheckOptions& opt = {});

}  // namespace spectra
