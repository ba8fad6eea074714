#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "spectra/rng.hpp"
#include "spectra/sampling.hpp"

namespace spectra {

using cplx = std::complex<double>;

struct SymMatrix {
    int N = 0;
    Eigen::MatrixXd a;  // already divided by a_N
};

struct SpectralSample {
    int N = 0;
    std::vector<double> eigenvalues;  // ascending
};

struct Atom {
    double x;
    double w;
};

struct EmpiricalMeasure {
    std::vector<Atom> atoms;  // sorted by x, equal locations merged
    double mass() const;
};

// Merges and sorts; weights must be positive.
EmpiricalMeasure make_measure(std::vector<Atom> atoms);

struct ResolventDiagSample {
    cplx z;
    std::vector<cplx> values;
};

// Raw entries x_ij for i <= j, drawn row by row (i, then j = i..N-1).
Eigen::MatrixXd sample_raw(const HeavyTailLaw& law, int N, Rng& rng);

// Zero out |x| > threshold.
Eigen::MatrixXd apply_cut(const Eigen::MatrixXd& x, double threshold);

SymMatrix build_matrix(const HeavyTailLaw& law, const TruncationRule& trunc, int N, bool center, Rng& rng);

// Normalizes raw (already truncated) entries; center subtracts the entry mean
// E[x 1_{|x| <= threshold}] from every entry.
SymMatrix normalize(const Eigen::MatrixXd& raw, const HeavyTailLaw& law, double threshold, bool center);

SpectralSample eigenvalues(const SymMatrix& m);
ResolventDiagSample resolvent_diag(const SymMatrix& m, cplx z);
EmpiricalMeasure esd(const SpectralSample& s);

// Mean of the resolvent diagonal, (1/N) tr (z - A)^{-1}, from eigenvalues.
cplx stieltjes_from_spectrum(const SpectralSample& s, cplx z);

// |(A - z)^{-1}_00 - (A_00 - z - sum_{k,l>=1} A_0k A_l0 (A' - z)^{-1}_kl)^{-1}|
double schur_check(const SymMatrix& m_plus, cplx z);

// Rank by full-pivot LU with threshold 1e-10 relative to max |entry|.
int exact_rank(const Eigen::MatrixXd& m);

struct TruncationTrial {
    int rowcount = 0;  // rows of X - X^B with a nonzero entry
    int rank = 0;
    double d1 = 0.0;   // d1(esd(A_N), esd(A_N^B))
};

struct RankDefectReport {
    std::vector<TruncationTrial> trials;
    double mean_rank_bound = 0.0;  // mean rank
    double mean_rowcount = 0.0;
    bool rank_le_rowcount = true;
    bool lidskii_holds = true;  // d1 <= 2 rank / N on every trial
};

// Trial t uses derive_seed(seed, t).
RankDefectReport rank_defect(const HeavyTailLaw& law, int N, double B, int trials, std::uint64_t seed,
                             unsigned threads = 1);

// d1 and the full Dudley distance under ||f|| = Lip(f) + sup|f| <= 1.
double d1_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);
double dudley_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

// Maximum of sum c_i f_i over the chain constraints |f_i| <= b, step bounds
// 0 <= f_{i+1} - f_i <= l dx_i (monotone) or |f_{i+1} - f_i| <= l dx_i,
// maximized over b + l = 1.
double chain_lp(const std::vector<double>& x, const std::vector<double>& c, bool monotone);

}  // namespace spectra
