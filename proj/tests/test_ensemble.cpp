#include <doctest.h>

#include <cmath>

#include "spectra/ensemble.hpp"

using namespace spectra;

namespace {
SymMatrix from(const Eigen::MatrixXd& a) { return {static_cast<int>(a.rows()), a}; }
}  // namespace

TEST_SUITE("ensemble") {
TEST_CASE("eigenvalues of small matrices") {
    auto id = eigenvalues(from(Eigen::MatrixXd::Identity(3, 3))).eigenvalues;
    for (double l : id) CHECK(l == doctest::Approx(1.0));
    Eigen::MatrixXd d = Eigen::Vector2d(2.0, -1.0).asDiagonal();
    auto dv = eigenvalues(from(d)).eigenvalues;
    CHECK(dv[0] == doctest::Approx(-1.0));
    CHECK(dv[1] == doctest::Approx(2.0));
    Eigen::MatrixXd o(2, 2);
    o << 0, 3.5, 3.5, 0;
    auto ov = eigenvalues(from(o)).eigenvalues;
    CHECK(ov[0] == doctest::Approx(-3.5));
    CHECK(ov[1] == doctest::Approx(3.5));
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
    bad(0, 0) = NAN;
    CHECK_THROWS(eigenvalues(from(bad)));
}

TEST_CASE("trace identities and sorting") {
    Rng rng(1);
    SymMatrix m = build_matrix({1.2, 1.0, 0.5}, TruncationRule::none(), 200, false, rng);
    CHECK(m.a.isApprox(m.a.transpose(), 0.0));
    auto ev = eigenvalues(m).eigenvalues;
    CHECK(ev.size() == 200);
    CHECK(std::is_sorted(ev.begin(), ev.end()));
    double s1 = 0, s2 = 0;
    for (double l : ev) s1 += l, s2 += l * l;
    CHECK(std::abs(s1 - m.a.trace()) <= 1e-8 * 200 * (1 + std::abs(m.a.trace())));
    CHECK(std::abs(s2 - m.a.squaredNorm()) <= 1e-8 * 200 * m.a.squaredNorm());
}

TEST_CASE("matrix construction") {
    HeavyTailLaw law{1.0, 1.0, 0.5};
    Rng rng(7), replay(7);
    SymMatrix m = build_matrix(law, TruncationRule::none(), 2, false, rng);
    const double a = a_n(law, 2);
    const double x11 = sample_entry(law, replay), x12 = sample_entry(law, replay), x22 = sample_entry(law, replay);
    CHECK(m.a(0, 0) == x11 / a);
    CHECK(m.a(0, 1) == x12 / a);
    CHECK(m.a(1, 0) == x12 / a);
    CHECK(m.a(1, 1) == x22 / a);

    Rng r2(3);
    // B a_N below x_min removes every entry
    SymMatrix z = build_matrix(law, TruncationRule::at_B(0.5 / a_n(law, 50)), 50, false, r2);
    CHECK(z.a.isZero(0.0));
    CHECK(truncation_threshold(law, TruncationRule::at_kappa(0.2), 100) == doctest::Approx(std::pow(100.0, 0.2) * 100));
}

TEST_CASE("resolvent diagonal") {
    SymMatrix zero = from(Eigen::MatrixXd::Zero(4, 4));
    for (const cplx& v : resolvent_diag(zero, cplx(0, 1)).values) CHECK(std::abs(v - cplx(0, -1)) < 1e-15);
    CHECK_THROWS(resolvent_diag(from(Eigen::MatrixXd::Identity(1, 1)), 2.0));

    Rng rng(2);
    SymMatrix m = build_matrix({0.8, 1.0, 0.5}, TruncationRule::none(), 60, false, rng);
    const SpectralSample s = eigenvalues(m);
    for (cplx z : {cplx(0, 1), cplx(0.3, 0.01), cplx(-2, 3)}) {
        ResolventDiagSample r = resolvent_diag(m, z);
        cplx mean = 0;
        for (const cplx& v : r.values) {
            CHECK(v.imag() < 0);
            CHECK(std::abs(v) <= 1.0 / z.imag() + 1e-12);
            mean += v;
        }
        mean /= static_cast<double>(r.values.size());
        CHECK(std::abs(mean - stieltjes_from_spectrum(s, z)) < 1e-10);
        Eigen::MatrixXcd zi = -m.a.cast<cplx>();
        zi.diagonal().array() += z;
        CHECK(std::abs(zi.inverse()(5, 5) - r.values[5]) < 1e-10);
    }
}

TEST_CASE("Schur complement") {
    Eigen::MatrixXd one(1, 1);
    one << 0.7;
    CHECK(schur_check(from(one), cplx(0, 1)) < 1e-16);
    Rng rng(4);
    for (int i = 0; i < 20; ++i) {
        SymMatrix m = build_matrix({1.0, 1.0, 0.5}, TruncationRule::none(), 10, false, rng);
        CHECK(schur_check(m, cplx(0, 1)) <= 1e-10);
    }
    Eigen::MatrixXd d = Eigen::Vector4d(1, -2, 0.5, 3).asDiagonal();
    CHECK(schur_check(from(d), cplx(0.2, 0.5)) < 1e-15);
}

TEST_CASE("exact rank") {
    CHECK(exact_rank(Eigen::MatrixXd::Zero(5, 5)) == 0);
    CHECK(exact_rank(Eigen::MatrixXd::Identity(4, 4)) == 4);
    Eigen::MatrixXd r1 = Eigen::VectorXd::LinSpaced(6, 1, 6) * Eigen::RowVectorXd::LinSpaced(6, -1, 4);
    CHECK(exact_rank(r1) == 1);
    Eigen::MatrixXd r2 = r1 + Eigen::VectorXd::Ones(6) * Eigen::RowVectorXd::LinSpaced(6, 3, 9).array().square().matrix();
    CHECK(exact_rank(r2) == 2);
}

TEST_CASE("rank defect") {
    HeavyTailLaw law{1.0, 1.0, 0.5};
    RankDefectReport big = rank_defect(law, 100, 1e12, 3, 5);
    for (const auto& t : big.trials) {
        CHECK(t.rank == 0);
        CHECK(t.d1 == 0.0);
    }
    RankDefectReport r = rank_defect(law, 200, 1.0, 5, 6);
    CHECK(r.rank_le_rowcount);
    CHECK(r.lidskii_holds);
    for (const auto& t : r.trials) {
        CHECK(t.rank <= t.rowcount);
        CHECK(t.d1 <= 2.0 * t.rank / 200);
    }
    CHECK_THROWS(rank_defect(law, 10, 1.0, 0, 1));
}

TEST_CASE("centering is a rank-one perturbation") {
    HeavyTailLaw law{0.8, 1.0, 1.0};
    Rng rng(8);
    const int N = 120;
    const double thr = truncation_threshold(law, TruncationRule::at_B(1.0), N);
    const Eigen::MatrixXd cut = apply_cut(sample_raw(law, N, rng), thr);
    const double d = d1_distance(esd(eigenvalues(normalize(cut, law, thr, false))),
                                 esd(eigenvalues(normalize(cut, law, thr, true))));
    CHECK(d <= 2.0 / N);
    CHECK_THROWS(normalize(cut, law, INFINITY, true));
}

TEST_CASE("empirical spectral measure") {
    EmpiricalMeasure e = esd(eigenvalues(from(Eigen::MatrixXd::Identity(2, 2))));
    REQUIRE(e.atoms.size() == 1);
    CHECK(e.atoms[0].x == doctest::Approx(1.0));
    CHECK(e.atoms[0].w == 1.0);
    Eigen::MatrixXd d = Eigen::Vector2d(1, -1).asDiagonal();
    EmpiricalMeasure f = esd(eigenvalues(from(d)));
    REQUIRE(f.atoms.size() == 2);
    CHECK(f.atoms[0].x == -1.0);
    CHECK(f.atoms[1].w == 0.5);
    CHECK(f.mass() == 1.0);
    CHECK_THROWS(make_measure({{0.0, -1.0}}));
}
}
