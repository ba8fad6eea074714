#include "spectra/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spectra {

double EmpiricalMeasure::mass() const {
    double m = 0.0;
    for (const auto& a : atoms) m += a.w;
    return m;
}

EmpiricalMeasure make_measure(std::vector<Atom> atoms) {
    for (const auto& a : atoms)
        if (!(a.w > 0) || !std::isfinite(a.x)) throw std::invalid_argument("make_measure: bad atom");
    std::sort(atoms.begin(), atoms.end(), [](const Atom& p, const Atom& q) { return p.x < q.x; });
    EmpiricalMeasure m;
    for (const auto& a : atoms) {
        if (!m.atoms.empty() && m.atoms.back().x == a.x)
            m.atoms.back().w += a.w;
        else
            m.atoms.push_back(a);
    }
    return m;
}

Eigen::MatrixXd sample_raw(const HeavyTailLaw& law, int N, Rng& rng) {
    if (N < 1) throw std::invalid_argument("sample_raw: N must be >= 1");
    validate(law);
    Eigen::MatrixXd x(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) x(i, j) = x(j, i) = sample_entry(law, rng);
    return x;
}

Eigen::MatrixXd apply_cut(const Eigen::MatrixXd& x, double threshold) {
    return (x.array().abs() <= threshold).select(x, 0.0);
}

SymMatrix normalize(const Eigen::MatrixXd& raw, const HeavyTailLaw& law, double threshold, bool center) {
    SymMatrix m;
    m.N = static_cast<int>(raw.rows());
    double aN = a_n(law, m.N);
    m.a = raw / aN;
    if (center) {
        double mean = truncated_mean(law, threshold);
        if (!std::isfinite(mean)) throw std::invalid_argument("centering needs a finite entry mean");
        m.a.array() -= mean / aN;
    }
    return m;
}

SymMatrix build_matrix(const HeavyTailLaw& law, const TruncationRule& trunc, int N, bool center, Rng& rng) {
    double thr = truncation_threshold(law, trunc, N);
    return normalize(apply_cut(sample_raw(law, N, rng), thr), law, thr, center);
}

SpectralSample eigenvalues(const SymMatrix& m) {
    if (!m.a.allFinite()) throw std::invalid_argument("eigenvalues: non-finite entries");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.a, Eigen::EigenvaluesOnly);
    SpectralSample s;
    s.N = m.N;
    s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + m.N);
    std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
    return s;
}

ResolventDiagSample resolvent_diag(const SymMatrix& m, cplx z) {
    if (z.imag() == 0.0) throw std::invalid_argument("resolvent_diag: z must be off the real axis");
    if (!m.a.allFinite()) throw std::invalid_argument("resolvent_diag: non-finite entries");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.a);
    const auto& U = es.eigenvectors();
    const auto& lam = es.eigenvalues();
    ResolventDiagSample r;
    r.z = z;
    r.values.assign(m.N, cplx(0.0));
    for (int i = 0; i < m.N; ++i) {
        cplx inv = 1.0 / (z - lam(i));
        for (int k = 0; k < m.N; ++k) r.values[k] += U(k, i) * U(k, i) * inv;
    }
    return r;
}

EmpiricalMeasure esd(const SpectralSample& s) {
    std::vector<Atom> atoms;
    atoms.reserve(s.eigenvalues.size());
    for (double l : s.eigenvalues) atoms.push_back({l, 1.0 / s.N});
    return make_measure(std::move(atoms));
}

cplx stieltjes_from_spectrum(const SpectralSample& s, cplx z) {
    cplx sum = 0.0;
    for (double l : s.eigenvalues) sum += 1.0 / (z - l);
    return sum / static_cast<double>(s.eigenvalues.size());
}

double schur_check(const SymMatrix& m_plus, cplx z) {
    if (z.imag() == 0.0) throw std::invalid_argument("schur_check: z must be off the real axis");
    const int n = m_plus.N;
    Eigen::MatrixXcd M = m_plus.a.cast<cplx>();
    M.diagonal().array() -= z;
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(n);
    e0(0) = 1.0;
    cplx direct = M.partialPivLu().solve(e0)(0);
    cplx border = 0.0;
    if (n > 1) {
        Eigen::MatrixXcd minor = M.bottomRightCorner(n - 1, n - 1);
        Eigen::VectorXcd a0 = m_plus.a.col(0).tail(n - 1).cast<cplx>();
        border = a0.transpose() * minor.partialPivLu().solve(a0);
    }
    cplx formula = 1.0 / (m_plus.a(0, 0) - z - border);
    return std::abs(direct - formula);
}

int exact_rank(const Eigen::MatrixXd& m) {
    std::vector<int> rows, cols;
    for (int i = 0; i < m.rows(); ++i)
        if ((m.row(i).array() != 0.0).any()) rows.push_back(i);
    for (int j = 0; j < m.cols(); ++j)
        if ((m.col(j).array() != 0.0).any()) cols.push_back(j);
    if (rows.empty()) return 0;
    Eigen::MatrixXd sub(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) sub(i, j) = m(rows[i], cols[j]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    lu.setThreshold(1e-10);
    return static_cast<int>(lu.rank());
}

RankDefectReport rank_defect(const HeavyTailLaw& law, int N, double B, int trials, std::uint64_t seed,
                             unsigned threads) {
    if (trials < 1) throw std::invalid_argument("rank_defect: trials must be >= 1");
    RankDefectReport rep;
    rep.trials.resize(trials);
    const double thr = B * a_n(law, N);
    parallel_for(trials, threads, [&](std::size_t t) {
        Rng rng(derive_seed(seed, t));
        Eigen::MatrixXd raw = sample_raw(law, N, rng);
        Eigen::MatrixXd cut = apply_cut(raw, thr);
        Eigen::MatrixXd diff = raw - cut;
        TruncationTrial& tr = rep.trials[t];
        for (int i = 0; i < N; ++i)
            if ((diff.row(i).array() != 0.0).any()) ++tr.rowcount;
        tr.rank = exact_rank(diff);
        const double inf = std::numeric_limits<double>::infinity();
        auto full = esd(eigenvalues(normalize(raw, law, inf, false)));
        auto trunc = esd(eigenvalues(normalize(cut, law, thr, false)));
        tr.d1 = d1_distance(full, trunc);
    });
    for (const auto& tr : rep.trials) {
        rep.mean_rank_bound += tr.rank;
        rep.mean_rowcount += tr.rowcount;
        if (tr.rank > tr.rowcount) rep.rank_le_rowcount = false;
        if (tr.d1 > 2.0 * tr.rank / N) rep.lidskii_holds = false;
    }
    rep.mean_rank_bound /= trials;
    rep.mean_rowcount /= trials;
    return rep;
}

}  // namespace spectra
