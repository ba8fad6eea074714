#include "spectra/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>
#include <nlohmann/json.hpp>

#include "spectra/ensemble.hpp"
#include "spectra/limitlaw.hpp"
#include "spectra/moments.hpp"
#include "spectra/rng.hpp"
#include "spectra/sampling.hpp"
#include "spectra/stable.hpp"
#include "spectra/stats.hpp"

namespace spectra {

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("table " + name + ": row width mismatch");
    rows.push_back(std::move(row));
}

bool RunReport::all_pass() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

const Table* RunReport::table(const std::string& n) const {
    for (const auto& t : tables)
        if (t.name == n) return &t;
    return nullptr;
}

const Assertion* RunReport::assertion(const std::string& n) const {
    for (const auto& a : assertions)
        if (a.name == n) return &a;
    return nullptr;
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

namespace {

using Clock = std::chrono::steady_clock;

std::string tag(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

long long as_int(bool b) { return b ? 1 : 0; }

Assertion check(std::string name, double value, std::string rel, double threshold, std::string detail = "") {
    Assertion a{std::move(name), value, threshold, rel, false, std::move(detail)};
    if (rel == "<=")
        a.pass = value <= threshold;
    else if (rel == ">=")
        a.pass = value >= threshold;
    else if (rel == ">")
        a.pass = value > threshold;
    else
        a.pass = value == threshold;
    return a;
}

Assertion check_flag(std::string name, bool ok, std::string detail = "") {
    return check(std::move(name), ok ? 1.0 : 0.0, "==", 1.0, std::move(detail));
}

Conventions conventions(const ExperimentConfig& cfg) {
    Conventions c;
    c.phase = cfg.text("conventions.phase") == "printed" ? PhaseConvention::printed : PhaseConvention::corrected;
    c.scale = cfg.text("conventions.scale") == "cosine" ? ScaleConvention::cosine : ScaleConvention::gamma;
    return c;
}

TruncationRule truncation(const ExperimentConfig& cfg) {
    const std::string k = cfg.text("sample.truncation");
    if (k == "B") return TruncationRule::at_B(cfg.real("sample.B"));
    if (k == "kappa") return TruncationRule::at_kappa(cfg.real("sample.kappa"));
    return TruncationRule::none();
}

// Independent stream per sub-experiment; trials inside a stream use derive_seed(stream, t).
std::uint64_t stream(std::uint64_t seed, std::uint64_t id) { return derive_seed(seed, 0x100000000ULL + id); }

// ---- solve

void run_solve(const ExperimentConfig& cfg, unsigned threads, RunReport& rep) {
    const Conventions conv = conventions(cfg);
    std::vector<cplx> zs;
    if (cfg.boolean("solve.grid")) {
        const double x0 = cfg.real("solve.x_from"), x1 = cfg.real("solve.x_to"), dx = cfg.real("solve.x_step");
        const long long n = std::llround((x1 - x0) / dx);
        for (long long i = 0; i <= n; ++i)
            for (double eta : cfg.real_list("solve.etas")) zs.push_back({x0 + i * dx, eta});
    }
    for (cplx z : cfg.complex_list("solve.points")) {
        if (!(z.imag() > 0)) throw ConfigError("solve.points: need Im z > 0");
        zs.push_back(z);
    }

    Table asym{"asymptotic", {"alpha", "abs_z", "re_Y", "im_Y", "rel_dev"}, {}};
    for (double alpha : cfg.real_list("solve.alphas")) {
        const AlphaContext ctx = make_alpha_context(alpha, conv);
        const SolverOptions opt;
        std::vector<YSolution> sols(zs.size());
        parallel_for(zs.size(), threads, [&](std::size_t i) { sols[i] = solve_Y(zs[i], ctx); });

        Table t{"yfield_a" + tag(alpha), {"re_z", "im_z", "re_Y", "im_Y", "residual", "converged"}, {}};
        std::size_t good = 0;
        for (const auto& s : sols) {
            const double res = y_residual(s.z, s.y, ctx);
            const bool ok = s.converged && res <= opt.tol * (1.0 + std::pow(std::abs(s.z), alpha));
            good += ok;
            t.add({s.z.real(), s.z.imag(), s.y.real(), s.y.imag(), res, as_int(ok)});
        }
        rep.tables.push_back(std::move(t));
        if (cfg.has("assert.min_converged_fraction") && !zs.empty()) {
            const double frac = static_cast<double>(good) / zs.size();
            rep.assertions.push_back(check("converged_fraction[alpha=" + tag(alpha) + "]", frac, ">=",
                                           cfg.real("assert.min_converged_fraction"),
                                           std::to_string(good) + "/" + std::to_string(zs.size()) + " points"));
        }

        const cplx lead = ctx.c_complex * std::tgamma(alpha / 2.0);
        double dev200 = 0.0;
        for (double r : {50.0, 100.0, 200.0}) {
            const cplx z(0.0, r);
            const YSolution s = solve_Y(z, ctx);
            const double dev = std::abs(s.y * power_branch(-z, alpha) - lead) / std::abs(lead);
            asym.add({alpha, r, s.y.real(), s.y.imag(), dev});
            if (r == 200.0) dev200 = s.converged ? dev : INFINITY;
        }
        if (cfg.has("assert.asymptotic_rel_tol"))
            rep.assertions.push_back(check("asymptotic[alpha=" + tag(alpha) + "]", dev200, "<=",
                                           cfg.real("assert.asymptotic_rel_tol"), "z = 200i"));
    }
    rep.tables.push_back(std::move(asym));
}

// ---- density

void run_density(const ExperimentConfig& cfg, unsigned threads, RunReport& rep) {
    const Conventions conv = conventions(cfg);
    const auto xs = default_density_grid(cfg.real("density.x_lo"), cfg.real("density.x_bulk"),
                                         cfg.real("density.x_hi"), static_cast<int>(cfg.integer("density.per_decade")),
                                         cfg.real("density.bulk_step"));
    Table mass{"mass", {"alpha", "grid", "near_zero", "far_tail", "total", "failed_points"}, {}};
    Table sym{"symmetry", {"alpha", "max_abs_diff"}, {}};
    Table support{"support", {"alpha", "R", "rho"}, {}};
    Table tail{"tail", {"alpha", "x", "scaled"}, {}};
    Table tail_sum{"tail_summary", {"alpha", "L_estimate", "L_error", "spread", "L_closed_form"}, {}};

    for (double alpha : cfg.real_list("density.alphas")) {
        const AlphaContext ctx = make_alpha_context(alpha, conv);
        const std::string at = "[alpha=" + tag(alpha) + "]";
        const DensityCurve c = density_curve(xs, ctx, threads);
        Table t{"density_a" + tag(alpha), {"x", "rho", "eta_used", "flag"}, {}};
        long long failed = 0;
        for (std::size_t i = 0; i < c.x.size(); ++i) {
            t.add({c.x[i], c.rho[i], c.eta_used[i], as_int(c.failed[i])});
            failed += c.failed[i];
        }
        rep.tables.push_back(std::move(t));

        double asym = 0.0;
        const std::size_t n = c.x.size();
        for (std::size_t i = 0; i < n / 2; ++i)
            if (!c.failed[i] && !c.failed[n - 1 - i]) asym = std::max(asym, std::abs(c.rho[i] - c.rho[n - 1 - i]));
        sym.add({alpha, asym});
        if (cfg.has("assert.symmetry_tol"))
            rep.assertions.push_back(check("symmetry" + at, asym, "<=", cfg.real("assert.symmetry_tol")));

        const MassReport m = density_mass(c);
        mass.add({alpha, m.grid, m.near_zero, m.far_tail, m.total, failed});
        if (cfg.has("assert.mass_tol"))
            rep.assertions.push_back(check("mass" + at, std::abs(m.total - 1.0), "<=", cfg.real("assert.mass_tol"),
                                           "total " + format_real(m.total)));

        const double R = cfg.real("density.support_R");
        const DensityPoint d = density_at(R, ctx);
        support.add({alpha, R, d.failed ? NAN : d.rho});
        if (cfg.has("assert.support_positive") && cfg.boolean("assert.support_positive"))
            rep.assertions.push_back(check("support" + at, d.failed ? 0.0 : d.rho, ">", 0.0, "rho(" + tag(R) + ")"));

        if (!cfg.boolean("density.tail")) continue;
        TailEstimate te;
        bool plateau = true;
        try {
            te = tail_constant(ctx);
        } catch (const std::runtime_error&) {
            plateau = false;
            for (int i = 0; i < 4; ++i) te.scaled[i] = std::pow(te.x[i], alpha + 1.0) * density_at(te.x[i], ctx).rho;
        }
        for (int i = 0; i < 4; ++i) tail.add({alpha, te.x[i], te.scaled[i]});
        const double lo = std::min({te.scaled[1], te.scaled[2], te.scaled[3]});
        const double hi = std::max({te.scaled[1], te.scaled[2], te.scaled[3]});
        const double spread = (hi - lo) / ((te.scaled[1] + te.scaled[2] + te.scaled[3]) / 3.0);
        tail_sum.add({alpha, plateau ? te.value : NAN, plateau ? te.error : NAN, spread, alpha / 2.0});
        if (cfg.has("assert.tail_spread_max"))
            rep.assertions.push_back(check("tail_spread" + at, spread, "<=", cfg.real("assert.tail_spread_max"),
                                           "x in {40, 80, 160}"));
        if (cfg.has("assert.tail_positive") && cfg.boolean("assert.tail_positive"))
            rep.assertions.push_back(check("tail_positive" + at, plateau ? te.value : 0.0, ">", 0.0,
                                           plateau ? "extrapolated L" : "extrapolation did not plateau"));
    }
    for (Table* t : {&mass, &sym, &support, &tail, &tail_sum})
        if (!t->rows.empty()) rep.tables.push_back(std::move(*t));
}

// ---- sample

void run_sample(const ExperimentConfig& cfg, unsigned threads, RunReport& rep) {
    const HeavyTailLaw law{cfg.real("law.alpha"), cfg.real("law.x_min"), cfg.real("law.theta")};
    validate(law);
    const TruncationRule trunc = truncation(cfg);
    const std::uint64_t seed = cfg.seed();

    const int N = static_cast<int>(cfg.integer("sample.N"));
    if (N > 0) {
        const int trials = static_cast<int>(cfg.integer("sample.trials"));
        const bool center = cfg.boolean("sample.center");
        if (center && !std::isfinite(truncated_mean(law, truncation_threshold(law, trunc, N))))
            throw ConfigError("sample.center: entry mean is infinite without truncation for alpha <= 1");
        const int bins = static_cast<int>(cfg.integer("sample.bins"));
        const double R = cfg.real("sample.hist_range");
        std::vector<std::vector<double>> eig(trials);
        std::vector<std::array<double, 4>> traces(trials);
        parallel_for(trials, threads, [&](std::size_t t) {
            Rng rng(derive_seed(stream(seed, 1), t));
            SymMatrix m = build_matrix(law, trunc, N, center, rng);
            eig[t] = eigenvalues(m).eigenvalues;
            double s1 = 0, s2 = 0;
            for (double l : eig[t]) s1 += l, s2 += l * l;
            traces[t] = {s1, m.a.trace(), s2, m.a.squaredNorm()};
        });
        std::vector<double> hist(bins, 0.0);
        double outside = 0.0;
        const double w = 2.0 * R / bins, total = static_cast<double>(N) * trials;
        for (const auto& ev : eig)
            for (double l : ev) {
                if (l < -R || l >= R) {
                    outside += 1.0 / total;
                    continue;
                }
                hist[std::min(bins - 1, static_cast<int>((l + R) / w))] += 1.0 / (total * w);
            }
        Table h{"histogram", {"x", "density"}, {}};
        for (int b = 0; b < bins; ++b) h.add({-R + (b + 0.5) * w, hist[b]});
        rep.tables.push_back(std::move(h));
        Table tr{"trace_identities", {"trial", "sum_lambda", "trace", "sum_lambda2", "frobenius2"}, {}};
        for (int t = 0; t < trials; ++t)
            tr.add({static_cast<long long>(t), traces[t][0], traces[t][1], traces[t][2], traces[t][3]});
        rep.tables.push_back(std::move(tr));
        Table o{"histogram_outside", {"fraction"}, {}};
        o.add({outside});
        rep.tables.push_back(std::move(o));
    }

    const long long schur_n = cfg.integer("identities.schur_instances");
    if (schur_n > 0) {
        const int size = static_cast<int>(cfg.integer("identities.schur_size"));
        const auto zs = cfg.complex_list("identities.schur_z");
        Table t{"schur", {"instance", "re_z", "im_z", "residual"}, {}};
        double worst = 0.0;
        for (long long i = 0; i < schur_n; ++i) {
            Rng rng(derive_seed(stream(seed, 2), i));
            SymMatrix m = build_matrix(law, TruncationRule::none(), size, false, rng);
            for (cplx z : zs) {
                const double r = schur_check(m, z);
                worst = std::max(worst, std::isnan(r) ? INFINITY : r);
                t.add({i, z.real(), z.imag(), r});
            }
        }
        rep.tables.push_back(std::move(t));
        if (cfg.has("assert.schur_tol"))
            rep.assertions.push_back(check("schur", worst, "<=", cfg.real("assert.schur_tol"),
                                           std::to_string(schur_n) + " instances of size " + std::to_string(size)));
    }

    const long long rank_trials = cfg.integer("identities.rank_trials");
    if (rank_trials > 0) {
        const int rN = static_cast<int>(cfg.integer("identities.rank_N"));
        if (rN < 1) throw ConfigError("identities.rank_N: must be >= 1 when rank_trials > 0");
        const double B = cfg.real("identities.rank_B");
        const RankDefectReport rd = rank_defect(law, rN, B, static_cast<int>(rank_trials), stream(seed, 3), threads);
        Table t{"rank", {"trial", "rowcount", "rank", "d1", "lidskii_bound"}, {}};
        for (std::size_t i = 0; i < rd.trials.size(); ++i) {
            const auto& tr = rd.trials[i];
            t.add({static_cast<long long>(i), static_cast<long long>(tr.rowcount), static_cast<long long>(tr.rank),
                   tr.d1, 2.0 * tr.rank / rN});
        }
        rep.tables.push_back(std::move(t));

        // Exact Bernoulli oracle: each of the N entries of a row exceeds B a_N with probability p.
        const double thr = B * a_n(law, rN);
        const double p = thr >= law.x_min ? std::pow(law.x_min / thr, law.alpha) : 1.0;
        const double q0 = std::pow(1.0 - p, rN);
        const double q = 1.0 - q0;
        const double both = 1.0 - 2.0 * q0 + std::pow(1.0 - p, 2.0 * rN - 1.0);
        const double var = rN * q * (1.0 - q) + static_cast<double>(rN) * (rN - 1) * (both - q * q);
        const double se = std::sqrt(std::max(var, 0.0) / rank_trials);
        const double zscore = se > 0 ? std::abs(rd.mean_rowcount - rN * q) / se : std::abs(rd.mean_rowcount - rN * q);
        Table o{"rowcount_oracle", {"N", "B", "p_entry", "expected_rowcount", "mean_rowcount", "stderr", "z"}, {}};
        o.add({static_cast<long long>(rN), B, p, rN * q, rd.mean_rowcount, se, zscore});
        rep.tables.push_back(std::move(o));
        if (cfg.has("assert.lidskii") && cfg.boolean("assert.lidskii"))
            rep.assertions.push_back(check_flag("lidskii", rd.lidskii_holds, "d1 <= 2 rank / N on every trial"));
        if (cfg.has("assert.rank_le_rowcount") && cfg.boolean("assert.rank_le_rowcount"))
            rep.assertions.push_back(check_flag("rank_le_rowcount", rd.rank_le_rowcount));
        if (cfg.has("assert.rowcount_sigma"))
            rep.assertions.push_back(check("rowcount_oracle", zscore, "<=", cfg.real("assert.rowcount_sigma"),
                                           "standard errors from the exact mean"));
    }

    const long long ctrials = cfg.integer("identities.centering_trials");
    if (ctrials > 0) {
        const int cN = static_cast<int>(cfg.integer("identities.centering_N"));
        const double thr = truncation_threshold(law, trunc, cN);
        if (!std::isfinite(truncated_mean(law, thr)))
            throw ConfigError("identities.centering_trials: entry mean is infinite without truncation");
        std::vector<double> d1(ctrials);
        parallel_for(ctrials, threads, [&](std::size_t t) {
            Rng rng(derive_seed(stream(seed, 4), t));
            const Eigen::MatrixXd cut = apply_cut(sample_raw(law, cN, rng), thr);
            d1[t] = d1_distance(esd(eigenvalues(normalize(cut, law, thr, false))),
                                esd(eigenvalues(normalize(cut, law, thr, true))));
        });
        Table t{"centering", {"trial", "d1", "bound"}, {}};
        bool ok = true;
        for (long long i = 0; i < ctrials; ++i) {
            t.add({i, d1[i], 2.0 / cN});
            ok = ok && d1[i] <= 2.0 / cN;
        }
        rep.tables.push_back(std::move(t));
        if (cfg.has("assert.centering") && cfg.boolean("assert.centering"))
            rep.assertions.push_back(check_flag("centering", ok, "d1(centered, uncentered) <= 2/N"));
    }

    const long long rpts = cfg.integer("identities.repre_points");
    if (rpts > 0) {
        const auto alphas = cfg.real_list("identities.repre_alphas");
        if (alphas.empty()) throw ConfigError("identities.repre_alphas: empty");
        Rng rng(stream(seed, 5));
        Table t{"repre", {"alpha", "re_z", "im_z", "re_y", "im_y", "residual", "residual_y0"}, {}};
        std::vector<std::array<double, 5>> pts(rpts);
        for (auto& p : pts)
            p = {0.0, -3.0 + 6.0 * uniform01(rng), 0.2 + 2.8 * uniform01(rng),
                 2.0 * uniform01(rng), -1.0 + 2.0 * uniform01(rng)};
        for (long long i = 0; i < rpts; ++i) pts[i][0] = alphas[i % alphas.size()];
        std::vector<std::pair<double, double>> res(rpts);
        parallel_for(rpts, threads, [&](std::size_t i) {
            const AlphaContext ctx = make_alpha_context(pts[i][0], conventions(cfg));
            const cplx z(pts[i][1], pts[i][2]), y(pts[i][3], pts[i][4]);
            res[i] = {repre_check(z, y, ctx), repre1_check(z, ctx)};
        });
        double worst = 0.0;
        for (long long i = 0; i < rpts; ++i) {
            t.add({pts[i][0], pts[i][1], pts[i][2], pts[i][3], pts[i][4], res[i].first, res[i].second});
            worst = std::max({worst, std::isnan(res[i].first) ? INFINITY : res[i].first,
                              std::isnan(res[i].second) ? INFINITY : res[i].second});
        }
        rep.tables.push_back(std::move(t));
        if (cfg.has("assert.repre_tol"))
            rep.assertions.push_back(check("repre", worst, "<=", cfg.real("assert.repre_tol"),
                                           std::to_string(rpts) + " random (z, y)"));
    }
}

// ---- compare

void run_compare(const ExperimentConfig& cfg, unsigned threads, RunReport& rep) {
    const Conventions conv = conventions(cfg);
    const int N = static_cast<int>(cfg.integer("compare.N"));
    const int trials = static_cast<int>(cfg.integer("compare.trials"));
    const auto zs = cfg.complex_list("compare.z");
    for (cplx z : zs)
        if (!(z.imag() > 0)) throw ConfigError("compare.z: need Im z > 0");
    const double eta = cfg.real("compare.eta"), x_max = cfg.real("compare.x_max"), dx = cfg.real("compare.x_step");
    const std::uint64_t seed = cfg.seed();

    Table res{"resolvent",
              {"alpha", "re_z", "im_z", "re_G_solver", "im_G_solver", "re_G_mc", "im_G_mc", "mc_stderr", "abs_diff"},
              {}};
    Table dist{"distances", {"alpha", "ks", "d1", "dudley"}, {}};
    const auto alphas = cfg.real_list("compare.alphas");
    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
        const double alpha = alphas[ai];
        const std::string at = "[alpha=" + tag(alpha) + "]";
        const AlphaContext ctx = make_alpha_context(alpha, conv);
        const HeavyTailLaw law{alpha, cfg.real("law.x_min"), cfg.real("law.theta")};
        std::vector<SpectralSample> spec(trials);
        parallel_for(trials, threads, [&](std::size_t t) {
            Rng rng(derive_seed(stream(seed, ai), t));
            spec[t] = eigenvalues(build_matrix(law, TruncationRule::none(), N, false, rng));
        });

        if (cfg.boolean("compare.resolvent")) {
            for (std::size_t zi = 0; zi < zs.size(); ++zi) {
                const cplx z = zs[zi];
                std::vector<double> re(trials), im(trials);
                for (int t = 0; t < trials; ++t) {
                    const cplx g = stieltjes_from_spectrum(spec[t], z);
                    re[t] = g.real();
                    im[t] = g.imag();
                }
                const MeanErr mr = mean_stderr(re), mi = mean_stderr(im);
                const YSolution s = solve_Y(z, ctx);
                const cplx gs = s.converged ? stieltjes_G(s, ctx) : cplx(NAN, NAN);
                const double diff = std::abs(gs - cplx(mr.mean, mi.mean));
                res.add({alpha, z.real(), z.imag(), gs.real(), gs.imag(), mr.mean, mi.mean,
                         std::hypot(mr.stderr_, mi.stderr_), diff});
                if (cfg.has("assert.resolvent_tol"))
                    rep.assertions.push_back(check("resolvent[alpha=" + tag(alpha) + ",z=" + tag(z.real()) + "+" +
                                                       tag(z.imag()) + "i]",
                                                   std::isnan(diff) ? INFINITY : diff, "<=",
                                                   cfg.real("assert.resolvent_tol")));
            }
        }

        const bool want_ks = cfg.boolean("compare.ks"), want_dist = cfg.boolean("compare.distances");
        if (!want_ks && !want_dist) continue;
        // Solver side: rho_eta on x >= 0, mirrored by symmetry.
        const long long n = std::llround(x_max / dx);
        std::vector<double> xs(n + 1);
        for (long long i = 0; i <= n; ++i) xs[i] = i * dx;
        const std::vector<double> rho = density_eta_line(xs, eta, ctx);
        std::vector<double> F(n + 1);
        F[0] = 0.5;
        for (long long i = 1; i <= n; ++i) F[i] = F[i - 1] + 0.5 * dx * (rho[i - 1] + rho[i]);

        std::vector<double> pooled;
        pooled.reserve(static_cast<std::size_t>(N) * trials);
        for (const auto& s : spec) pooled.insert(pooled.end(), s.eigenvalues.begin(), s.eigenvalues.end());
        std::sort(pooled.begin(), pooled.end());

        double ks = NAN;
        if (want_ks) {
            constexpr long long stride = 4;
            std::vector<double> grid;
            for (long long i = n; i > 0; i -= stride) grid.push_back(-xs[i]);
            for (long long i = 0; i <= n; i += stride) grid.push_back(xs[i]);
            std::vector<double> fmc(grid.size());
            parallel_for(grid.size(), threads, [&](std::size_t g) {
                double acc = 0.0;
                for (double l : pooled) acc += std::atan((grid[g] - l) / eta);
                fmc[g] = 0.5 + acc / (std::numbers::pi * pooled.size());
            });
            Table c{"cdf_a" + tag(alpha), {"x", "F_solver", "F_mc"}, {}};
            ks = 0.0;
            for (std::size_t g = 0; g < grid.size(); ++g) {
                const long long idx = std::llround(std::abs(grid[g]) / dx);
                const double fs = grid[g] >= 0 ? F[idx] : 1.0 - F[idx];
                ks = std::max(ks, std::abs(fs - fmc[g]));
                c.add({grid[g], fs, fmc[g]});
            }
            rep.tables.push_back(std::move(c));
            if (cfg.has("assert.ks_max"))
                rep.assertions.push_back(check("ks" + at, std::isnan(ks) ? INFINITY : ks, "<=",
                                               cfg.real("assert.ks_max"), "eta = " + tag(eta)));
        }
        double d1 = NAN, dd = NAN;
        if (want_dist) {
            std::vector<Atom> sa;
            double mass = 0.0;
            for (long long i = -n; i <= n; ++i) {
                const double wgt = (i == -n || i == n ? 0.5 : 1.0) * dx * rho[std::abs(i)];
                if (wgt > 0) sa.push_back({i * dx, wgt});
                mass += wgt;
            }
            const double rest = std::max(0.0, 1.0 - mass) / 2.0;
            if (rest > 0) {
                sa.push_back({-x_max, rest});
                sa.push_back({x_max, rest});
            }
            std::vector<Atom> ma;
            ma.reserve(pooled.size());
            for (double l : pooled) ma.push_back({l, 1.0 / pooled.size()});
            const EmpiricalMeasure mu = make_measure(std::move(ma)), nu = make_measure(std::move(sa));
            d1 = d1_distance(mu, nu);
            dd = dudley_distance(mu, nu);
        }
        dist.add({alpha, ks, d1, dd});
    }
    if (!res.rows.empty()) rep.tables.push_back(std::move(res));
    if (!dist.rows.empty()) rep.tables.push_back(std::move(dist));
}

// ---- moments

void run_moments(const ExperimentConfig& cfg, unsigned threads, RunReport& rep) {
    const double alpha = cfg.real("law.alpha"), B = cfg.real("moments.B"), x_min = cfg.real("law.x_min");
    const int k_max = static_cast<int>(cfg.integer("moments.k_max"));
    const int mc_k = std::min(k_max, static_cast<int>(cfg.integer("moments.mc_k_max")));
    const int N = static_cast<int>(cfg.integer("moments.N"));
    const int trials = static_cast<int>(cfg.integer("moments.trials"));
    const auto thetas = cfg.real_list("moments.thetas");
    if (thetas.empty()) throw ConfigError("moments.thetas: empty");
    const std::uint64_t seed = cfg.seed();

    std::vector<MomentTable> tabs;
    std::vector<std::vector<MeanErr>> mcs;
    Table odd{"odd_moments", {"theta", "p", "mc_estimate", "mc_stderr"}, {}};
    for (std::size_t ti = 0; ti < thetas.size(); ++ti) {
        const double theta = thetas[ti];
        tabs.push_back(moment_table(alpha, B, theta, k_max));
        std::vector<MeanErr> mc;
        if (N > 0) {
            const bool center = theta != 0.5 && cfg.boolean("moments.center_skewed");
            mc = mc_moments({alpha, x_min, theta}, B, N, 2 * mc_k, trials, stream(seed, ti), center, threads);
            for (int p = 1; p <= 2 * mc_k; p += 2) odd.add({theta, static_cast<long long>(p), mc[p - 1].mean, mc[p - 1].stderr_});
        }
        mcs.push_back(mc);
        Table t{"moments_t" + tag(theta), {"k", "m_2k", "mc_estimate", "mc_stderr"}, {}};
        for (int k = 1; k <= k_max; ++k) {
            const bool has = k <= mc_k && !mc.empty();
            t.add({static_cast<long long>(k), tabs.back().m[k - 1], has ? mc[2 * k - 1].mean : NAN,
                   has ? mc[2 * k - 1].stderr_ : NAN});
        }
        rep.tables.push_back(std::move(t));
    }
    if (!odd.rows.empty()) rep.tables.push_back(std::move(odd));

    Table shapes{"shapes", {"k", "shape", "weight"}, {}};
    for (int k = 1; k <= k_max; ++k)
        for (const auto& [code, w] : tabs[0].shapes[k - 1]) shapes.add({static_cast<long long>(k), code, w});
    rep.tables.push_back(std::move(shapes));

    const auto cm = [&](int m) { return c_m(alpha, B, 0.5, m); };
    Table trees{"tree_check", {"k", "walk_sum", "colored_tree_sum", "rel_diff"}, {}};
    for (int k = 1; k <= k_max; ++k) {
        const double a = shape_sum(k, cm), b = colored_tree_sum(k, cm);
        trees.add({static_cast<long long>(k), a, b, std::abs(a - b) / std::abs(a)});
    }
    rep.tables.push_back(std::move(trees));

    static const long long catalan[] = {1, 2, 5, 14, 42, 132};
    Table cat{"catalan", {"k", "value", "expected"}, {}};
    bool cat_ok = true;
    for (int k = 1; k <= k_max; ++k) {
        const double v = shape_sum(k, [](int m) { return m == 2 ? 1.0 : 0.0; });
        cat.add({static_cast<long long>(k), v, catalan[k - 1]});
        cat_ok = cat_ok && v == static_cast<double>(catalan[k - 1]);
    }
    rep.tables.push_back(std::move(cat));
    if (cfg.has("assert.catalan") && cfg.boolean("assert.catalan"))
        rep.assertions.push_back(check_flag("catalan", cat_ok, "k = 1.." + std::to_string(k_max)));

    if (cfg.has("assert.mc_rel_tol") && N > 0) {
        const auto tol = cfg.real_list("assert.mc_rel_tol");
        for (int k = 1; k <= std::min<int>(mc_k, tol.size()); ++k) {
            const double m = tabs[0].m[k - 1], e = mcs[0][2 * k - 1].mean;
            rep.assertions.push_back(check("mc_moment[theta=" + tag(thetas[0]) + ",k=" + std::to_string(k) + "]",
                                           std::abs(e - m) / m, "<=", tol[k - 1],
                                           "limit " + format_real(m) + ", mc " + format_real(e)));
        }
    }
    if (thetas.size() > 1) {
        bool same = true;
        for (const auto& t : tabs) same = same && t.m == tabs[0].m;
        rep.assertions.push_back(check_flag("theta_identical_tables", same));
    }
    if (cfg.has("assert.theta_sigma") && N > 0) {
        const auto centered = [&](double th) { return th != 0.5 && cfg.boolean("moments.center_skewed"); };
        for (std::size_t a = 0; a < thetas.size(); ++a)
            for (std::size_t b = a + 1; b < thetas.size(); ++b) {
                if (centered(thetas[a]) != centered(thetas[b])) continue;  // different estimators
                for (int k = 1; k <= mc_k; ++k) {
                    const MeanErr &x = mcs[a][2 * k - 1], &y = mcs[b][2 * k - 1];
                    const double se = std::hypot(x.stderr_, y.stderr_);
                    const double zsc = se > 0 ? std::abs(x.mean - y.mean) / se : 0.0;
                    rep.assertions.push_back(check("theta_mc[" + tag(thetas[a]) + " vs " + tag(thetas[b]) +
                                                       ",k=" + std::to_string(k) + "]",
                                                   zsc, "<=", cfg.real("assert.theta_sigma"), "standard errors"));
                }
            }
    }
}

// ---- stable-check

DiscreteComplexMeasure parse_atoms(const std::string& text) {
    DiscreteComplexMeasure nu;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find(';', start);
        if (end == std::string::npos) end = text.size();
        const std::string item = text.substr(start, end - start);
        start = end + 1;
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("stable.fl_atoms: expected location:weight, got '" + item + "'");
        const cplx loc = parse_complex(item.substr(0, colon));
        double w;
        try {
            w = std::stod(item.substr(colon + 1));
        } catch (...) {
            throw ConfigError("stable.fl_atoms: bad weight in '" + item + "'");
        }
        if (!(w > 0)) throw ConfigError("stable.fl_atoms: weights must be positive");
        nu.atoms.push_back({loc, w});
    }
    double total = 0.0;
    for (const auto& a : nu.atoms) total += a.weight;
    if (nu.atoms.empty() || std::abs(total - 1.0) > 1e-12) throw ConfigError("stable.fl_atoms: weights must sum to 1");
    return nu;
}

void run_stable(const ExperimentConfig& cfg, unsigned threads, RunReport& rep) {
    const double alpha = cfg.real("stable.alpha");
    const HeavyTailLaw law{alpha, cfg.real("stable.x_min"), 1.0};
    const int N = static_cast<int>(cfg.integer("stable.N"));
    const int reps = static_cast<int>(cfg.integer("stable.reps"));
    const std::uint64_t seed = cfg.seed();
    StableCheckOptions opt;
    opt.threads = threads;

    const RowFamily ones = [](int n) { return make_row(std::vector<cplx>(n, 1.0)); };
    const RowFamily vanishing = [](int n) { return make_row(std::vector<cplx>(n, 1.0 / n)); };

    Table ks{"stable_ks", {"check", "ks_real", "ks_imag", "cf_error", "limit_scale", "degenerate"}, {}};
    const StableCheckReport main = verify_stable_convergence(ones, law, N, reps, stream(seed, 1), opt);
    ks.add({std::string("ones"), main.ks_real, main.ks_imag, main.cf_error, main.limit_scale, as_int(main.degenerate)});
    if (cfg.has("assert.ks_max"))
        rep.assertions.push_back(check("stable_ks", main.ks_real, "<=", cfg.real("assert.ks_max"),
                                       "G = 1, N = " + std::to_string(N) + ", reps = " + std::to_string(reps)));

    const StableCheckReport deg = verify_stable_convergence(vanishing, law, std::min(N, 1000), 1000, stream(seed, 2), opt);
    ks.add({std::string("vanishing"), deg.ks_real, deg.ks_imag, deg.cf_error, deg.limit_scale, as_int(deg.degenerate)});

    if (cfg.has("stable.delta")) {
        StableCheckOptions topt = opt;
        topt.delta = cfg.real("stable.delta");
        const StableCheckReport tr = verify_stable_convergence(ones, law, N, reps, stream(seed, 3), topt);
        ks.add({"truncated_delta" + tag(*topt.delta), tr.ks_real, tr.ks_imag, tr.cf_error, tr.limit_scale,
                as_int(tr.degenerate)});
        if (cfg.has("assert.truncated_ks_max"))
            rep.assertions.push_back(check("truncated_ks", tr.ks_real, "<=", cfg.real("assert.truncated_ks_max"),
                                           "delta = " + tag(*topt.delta)));
    }
    rep.tables.push_back(std::move(ks));

    const auto ts = cfg.real_list("stable.fl_t");
    Table fl{"fl_transform", {"source", "t", "re_mc", "im_mc", "re_closed", "im_closed", "abs_diff"}, {}};
    double worst = 0.0;

    // Laplace transform of the G = 1 sums against the positive-stable closed form.
    const DiscreteComplexMeasure one = point_mass(1.0);
    for (double t : ts) {
        double acc = 0.0;
        for (const cplx& s : main.sums) acc += std::exp(-t * s.real());
        acc /= main.sums.size();
        const double closed = std::exp(-std::tgamma(1.0 - alpha) * std::pow(t, alpha));
        const double d = std::abs(acc - closed);
        worst = std::max(worst, d);
        fl.add({std::string("laplace_ones"), t, acc, 0.0, closed, 0.0, d});
    }

    // E exp(-itS) of a mixed-phase row against the Fourier-Laplace closed form.
    const DiscreteComplexMeasure nu = parse_atoms(cfg.text("stable.fl_atoms"));
    const int flN = static_cast<int>(cfg.integer("stable.fl_N"));
    const int flreps = static_cast<int>(cfg.integer("stable.fl_reps"));
    std::vector<cplx> coeffs;
    for (const auto& a : nu.atoms) {
        const int cnt = static_cast<int>(std::llround(a.weight * flN));
        coeffs.insert(coeffs.end(), cnt, a.location);
    }
    if (static_cast<int>(coeffs.size()) != flN)
        throw ConfigError("stable.fl_atoms: weights times fl_N must be integers summing to fl_N");
    const TriangularArrayRow row = make_row(coeffs);
    std::vector<cplx> sums(flreps), exact(flreps);
    parallel_for(flreps, threads, [&](std::size_t r) {
        Rng rng(derive_seed(stream(seed, 4), r));
        sums[r] = triangular_sum(row, law, flN, std::nullopt, rng);
        Rng rng2(derive_seed(stream(seed, 5), r));
        exact[r] = sample_pnu(nu, alpha, rng2);
    });
    for (double t : ts) {
        const cplx closed = fl_transform(nu, t, alpha);
        for (int src = 0; src < 2; ++src) {
            const auto& v = src == 0 ? sums : exact;
            cplx acc = 0.0;
            for (const cplx& s : v) acc += std::exp(cplx(0.0, -t) * s);
            acc /= static_cast<double>(v.size());
            const double d = std::abs(acc - closed);
            if (src == 0) worst = std::max(worst, d);
            fl.add({std::string(src == 0 ? "row" : "exact_pnu"), t, acc.real(), acc.imag(), closed.real(),
                    closed.imag(), d});
        }
    }
    rep.tables.push_back(std::move(fl));
    if (cfg.has("assert.fl_tol"))
        rep.assertions.push_back(check("fl_transform", worst, "<=", cfg.real("assert.fl_tol"),
                                       "max over t of Monte Carlo vs closed form"));
}

// ---- cb-check

void run_cb(const ExperimentConfig& cfg, unsigned threads, RunReport& rep) {
    const Conventions conv = conventions(cfg);
    const auto xs = cfg.real_list("cb.x");
    Table t{"cb",
            {"alpha", "x", "re_K", "im_K", "re_X", "im_X", "k_diff", "cb_density", "density", "density_diff",
             "stable_scale", "stable_skew", "converged"},
            {}};
    for (double alpha : cfg.real_list("cb.alphas")) {
        const AlphaContext ctx = make_alpha_context(alpha, conv);
        std::vector<CbResult> r(xs.size());
        parallel_for(xs.size(), threads, [&](std::size_t i) { r[i] = cb_fixed_point(xs[i], ctx); });
        for (const auto& c : r) {
            const double kd = c.converged ? std::abs(c.k - c.x_value) : INFINITY;
            const double dd = c.converged ? std::abs(c.cb_density - c.density) : INFINITY;
            t.add({alpha, c.x, c.k.real(), c.k.imag(), c.x_value.real(), c.x_value.imag(), kd, c.cb_density,
                   c.density, dd, c.stable_scale, c.stable_skew, as_int(c.converged)});
            const std::string at = "[alpha=" + tag(alpha) + ",x=" + tag(c.x) + "]";
            if (cfg.has("assert.k_tol")) rep.assertions.push_back(check("cb_k" + at, kd, "<=", cfg.real("assert.k_tol")));
            if (cfg.has("assert.density_tol"))
                rep.assertions.push_back(check("cb_density" + at, dd, "<=", cfg.real("assert.density_tol")));
        }
    }
    rep.tables.push_back(std::move(t));
}

std::string csv_cell(const Cell& c) {
    if (const double* d = std::get_if<double>(&c)) return format_real(*d);
    if (const long long* i = std::get_if<long long>(&c)) return std::to_string(*i);
    const std::string& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

nlohmann::ordered_json json_cell(const Cell& c) {
    if (const double* d = std::get_if<double>(&c)) {
        if (!std::isfinite(*d)) return nullptr;
        return std::stod(format_real(*d));
    }
    if (const long long* i = std::get_if<long long>(&c)) return *i;
    return std::get<std::string>(c);
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    return f;
}

void write_csv(const Table& t, const std::filesystem::path& p) {
    auto f = open_out(p);
    for (std::size_t i = 0; i < t.columns.size(); ++i) f << (i ? "," : "") << t.columns[i];
    f << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << csv_cell(row[i]);
        f << "\n";
    }
}

void write_dat(const Table& t, const std::filesystem::path& p) {
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        if (t.rows.empty() || !std::holds_alternative<std::string>(t.rows[0][i])) cols.push_back(i);
    auto f = open_out(p);
    f << "#";
    for (std::size_t i : cols) f << " " << t.columns[i];
    f << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t j = 0; j < cols.size(); ++j) f << (j ? " " : "") << csv_cell(row[cols[j]]);
        f << "\n";
    }
}

Table assertion_table(const RunReport& r) {
    Table t{"assertions", {"name", "value", "relation", "threshold", "pass", "detail"}, {}};
    for (const auto& a : r.assertions) t.add({a.name, a.value, a.relation, a.threshold, as_int(a.pass), a.detail});
    return t;
}

}  // namespace

RunReport run(const ExperimentConfig& cfg, unsigned threads) {
    if (threads == 0) threads = static_cast<unsigned>(cfg.integer("threads"));
    if (threads == 0) threads = default_threads();
    RunReport rep;
    rep.kind = cfg.kind();
    rep.config = cfg.values();
    const auto t0 = Clock::now();
    const std::string& k = rep.kind;
    if (k == "solve")
        run_solve(cfg, threads, rep);
    else if (k == "density")
        run_density(cfg, threads, rep);
    else if (k == "sample")
        run_sample(cfg, threads, rep);
    else if (k == "compare")
        run_compare(cfg, threads, rep);
    else if (k == "moments")
        run_moments(cfg, threads, rep);
    else if (k == "stable-check")
        run_stable(cfg, threads, rep);
    else if (k == "cb-check")
        run_cb(cfg, threads, rep);
    else
        throw ConfigError("unknown kind '" + k + "'");
    rep.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return rep;
}

void emit(const RunReport& report, const std::string& dir, const std::string& format) {
    namespace fs = std::filesystem;
    if (format != "csv" && format != "json" && format != "both") throw std::invalid_argument("emit: unknown format " + format);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir + ": " + ec.message());
    const fs::path root(dir);
    const Table asr = assertion_table(report);
    const bool csv = format != "json", json = format != "csv";

    for (const auto& t : report.tables) {
        if (csv) write_csv(t, root / (t.name + ".csv"));
        write_dat(t, root / (t.name + ".dat"));
    }
    if (csv) write_csv(asr, root / "assertions.csv");
    if (!json) return;

    nlohmann::ordered_json j;
    j["kind"] = report.kind;
    j["version"] = report.version;
    j["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : report.config) j["config"][k] = v;
    j["tables"] = nlohmann::ordered_json::object();
    for (const Table* t : [&] {
             std::vector<const Table*> v;
             for (const auto& t : report.tables) v.push_back(&t);
             v.push_back(&asr);
             return v;
         }()) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const auto& row : t->rows) {
            nlohmann::ordered_json r = nlohmann::ordered_json::array();
            for (const auto& c : row) r.push_back(json_cell(c));
            rows.push_back(std::move(r));
        }
        j["tables"][t->name] = {{"columns", t->columns}, {"rows", std::move(rows)}};
    }
    j["all_pass"] = report.all_pass();
    auto f = open_out(root / "report.json");
    f << j.dump(1) << "\n";
}

}  // namespace spectra
