#include "spectra/stable.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "spectra/stats.hpp"

namespace spectra {

namespace {

// z^a on the principal branch, with the negative real axis taken from below.
cplx power_lower(cplx z, double a) {
    double im = z.imag() == 0.0 ? -0.0 : z.imag();
    double r = std::abs(z);
    if (r == 0.0) return 0.0;
    return std::polar(std::pow(r, a), a * std::atan2(im, z.real()));
}

double inner(cplx t, cplx z) { return t.real() * z.real() + t.imag() * z.imag(); }

}  // namespace

double c_norm(double alpha) {
    if (std::abs(alpha - 1.0) < 1e-9) return 2.0 / M_PI;
    return (1.0 - alpha) / (std::tgamma(2.0 - alpha) * std::cos(M_PI * alpha / 2.0));
}

AlphaContext make_alpha_context(double alpha, Conventions conv) {
    if (!(alpha > 0 && alpha < 2)) throw std::invalid_argument("alpha must lie in (0,2)");
    AlphaContext c;
    c.alpha = alpha;
    c.conv = conv;
    c.c_norm = c_norm(alpha);
    double phase = (conv.phase == PhaseConvention::corrected ? -1.0 : 1.0) * M_PI * alpha / 2.0;
    c.c_complex = std::polar(1.0 / std::tgamma(alpha / 2.0), phase);
    c.c_scale = conv.scale == ScaleConvention::gamma ? std::tgamma(1.0 - alpha / 2.0)
                                                     : std::cos(M_PI * alpha / 4.0);
    return c;
}

cplx real_stable_cf(const RealStableSpec& s, double t) {
    if (t == 0.0) return 1.0;
    double sgn = t > 0 ? 1.0 : -1.0;
    double m = std::pow(s.sigma, s.alpha) * std::pow(std::abs(t), s.alpha);
    cplx e = -m * cplx(1.0, -s.beta * sgn * std::tan(M_PI * s.alpha / 2.0)) + cplx(0.0, s.mu * t);
    return std::exp(e);
}

DiscreteComplexMeasure point_mass(cplx at) { return {{{at, 1.0}}}; }

DiscreteComplexMeasure empirical_measure(const std::vector<cplx>& coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("empirical_measure: no coefficients");
    std::map<std::pair<double, double>, double> counts;
    for (const cplx& g : coeffs) counts[{g.real(), g.imag()}] += 1.0;
    DiscreteComplexMeasure nu;
    for (const auto& [k, c] : counts) nu.atoms.push_back({cplx(k.first, k.second), c / coeffs.size()});
    return nu;
}

SigmaBeta sigma_beta(const DiscreteComplexMeasure& nu, cplx t, double alpha) {
    double I = 0.0, J = 0.0;
    for (const auto& a : nu.atoms) {
        double s = inner(t, a.location);
        double m = std::pow(std::abs(s), alpha) * a.weight;
        I += m;
        J += s > 0 ? m : (s < 0 ? -m : 0.0);
    }
    SigmaBeta r;
    r.sigma = std::pow(I / c_norm(alpha), 1.0 / alpha);
    r.beta = I > 0 ? J / I : 0.0;
    return r;
}

cplx complex_stable_cf(const DiscreteComplexMeasure& nu, cplx t, double a) {
    if (!(a > 0 && a < 1)) throw std::invalid_argument("complex_stable_cf: index must lie in (0,1)");
    SigmaBeta sb = sigma_beta(nu, t, a);
    double m = std::pow(sb.sigma, a);
    return std::exp(-m * cplx(1.0, -sb.beta * std::tan(M_PI * a / 2.0)));
}

cplx fl_transform(const DiscreteComplexMeasure& nu, double t, double a) {
    if (!(a > 0 && a < 1)) throw std::invalid_argument("fl_transform: index must lie in (0,1)");
    if (!(t > 0)) throw std::invalid_argument("fl_transform: t must be positive");
    cplx moment = 0.0;
    for (const auto& at : nu.atoms) {
        if (at.location.imag() > 0)
            throw std::invalid_argument("fl_transform: atom in the open upper half-plane");
        moment += at.weight * power_lower(at.location, a);
    }
    cplx it_a = std::polar(std::pow(t, a), M_PI * a / 2.0);
    return std::exp(-std::tgamma(1.0 - a) * it_a * moment);
}

double sample_real_stable(const RealStableSpec& s, Rng& rng) {
    if (std::abs(s.alpha - 1.0) < 1e-12) throw std::invalid_argument("sample_real_stable: alpha = 1");
    if (s.sigma == 0.0) return s.mu;
    const double a = s.alpha;
    double tan_pa = std::tan(M_PI * a / 2.0);
    double B = std::atan(s.beta * tan_pa) / a;
    double S = std::pow(1.0 + s.beta * s.beta * tan_pa * tan_pa, 1.0 / (2.0 * a));
    double V = M_PI * (uniform01(rng) - 0.5);
    double W = -std::log(uniform01(rng));
    double X = S * std::sin(a * (V + B)) / std::pow(std::cos(V), 1.0 / a) *
               std::pow(std::cos(V - a * (V + B)) / W, (1.0 - a) / a);
    return s.sigma * X + s.mu;
}

cplx sample_pnu(const DiscreteComplexMeasure& nu, double a, Rng& rng) {
    RealStableSpec z{a, std::pow(c_norm(a), -1.0 / a), 1.0, 0.0};
    cplx s = 0.0;
    for (const auto& at : nu.atoms) {
        if (at.weight <= 0 || at.location == cplx(0.0)) continue;
        s += at.location * std::pow(at.weight, 1.0 / a) * sample_real_stable(z, rng);
    }
    return s;
}

TriangularArrayRow make_row(std::vector<cplx> coeffs) {
    TriangularArrayRow r;
    for (const cplx& g : coeffs) r.bound = std::max(r.bound, std::abs(g));
    r.coefficients = std::move(coeffs);
    return r;
}

cplx triangular_sum(const TriangularArrayRow& row, const HeavyTailLaw& law, int N,
                    std::optional<double> delta, Rng& rng) {
    if (static_cast<int>(row.coefficients.size()) != N)
        throw std::invalid_argument("triangular_sum: row length differs from N");
    if (law.theta != 1.0) throw std::invalid_argument("triangular_sum: law must be nonnegative (theta = 1)");
    double aN = a_n(law, N);
    double cut = delta ? std::pow(static_cast<double>(N), *delta) * aN : INFINITY;
    cplx s = 0.0;
    for (int k = 0; k < N; ++k) {
        double x = sample_entry(law, rng);
        if (x > cut) x = 0.0;
        s += row.coefficients[k] * x;
    }
    return s / aN;
}

StableCheckReport verify_stable_convergence(const RowFamily& family, const HeavyTailLaw& law, int N,
                                            int reps, std::uint64_t seed,
                                            const StableCheckOptions& opt) {
    if (reps < 1000) throw std::invalid_argument("verify_stable_convergence: reps must be >= 1000");
    validate(law);
    const double a = law.alpha;
    TriangularArrayRow row = family(N);
    DiscreteComplexMeasure nu = empirical_measure(row.coefficients);

    StableCheckReport rep;
    rep.sums.resize(reps);
    parallel_for(reps, opt.threads, [&](std::size_t r) {
        Rng rng(derive_seed(seed, r));
        rep.sums[r] = triangular_sum(row, law, N, opt.delta, rng);
    });

    SigmaBeta re = sigma_beta(nu, 1.0, a), im = sigma_beta(nu, cplx(0, 1), a);
    RealStableSpec re_spec{a, re.sigma, re.beta, 0.0}, im_spec{a, im.sigma, im.beta, 0.0};
    std::vector<double> sr(reps), si(reps), orr(reps), oi(reps);
    std::uint64_t oracle_seed = mix64(seed ^ 0x6f7261636c65ULL);
    for (int r = 0; r < reps; ++r) {
        sr[r] = rep.sums[r].real();
        si[r] = rep.sums[r].imag();
        Rng rng(derive_seed(oracle_seed, r));
        orr[r] = sample_real_stable(re_spec, rng);
        oi[r] = sample_real_stable(im_spec, rng);
    }
    rep.ks_real = ks_two_sample(sr, orr);
    rep.ks_imag = ks_two_sample(si, oi);

    for (const cplx& t : opt.t_grid) {
        cplx emp = 0.0;
        for (const cplx& s : rep.sums)
            emp += std::exp(cplx(0.0, t.real() * s.real() + t.imag() * s.imag()));
        emp /= static_cast<double>(reps);
        rep.cf_error = std::max(rep.cf_error, std::abs(emp - complex_stable_cf(nu, t, a)));
    }
    rep.limit_scale = std::pow(re.sigma, a) + std::pow(im.sigma, a);
    rep.degenerate = rep.limit_scale < opt.degenerate_tol;
    return rep;
}

}  // namespace spectra
