#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "spectra/ensemble.hpp"

using namespace spectra;

namespace {

// Maximum of c.f over the polytope in (f_1..f_n, b, l) by enumerating every vertex.
double vertex_lp(const std::vector<double>& x, const std::vector<double>& c, bool monotone) {
    const int n = static_cast<int>(x.size()), dim = n + 2;
    std::vector<Eigen::VectorXd> rows;
    std::vector<double> rhs;
    auto add = [&](Eigen::VectorXd r, double v) {
        rows.push_back(std::move(r));
        rhs.push_back(v);
    };
    auto e = [&](int i) { return Eigen::VectorXd::Unit(dim, i); };
    for (int i = 0; i < n; ++i) {
        add(e(i) - e(n), 0.0);
        add(-e(i) - e(n), 0.0);
    }
    for (int i = 0; i + 1 < n; ++i) {
        const double dx = x[i + 1] - x[i];
        add(e(i + 1) - e(i) - dx * e(n + 1), 0.0);
        if (monotone)
            add(e(i) - e(i + 1), 0.0);
        else
            add(e(i) - e(i + 1) - dx * e(n + 1), 0.0);
    }
    add(e(n) + e(n + 1), 1.0);
    add(-e(n), 0.0);
    add(-e(n + 1), 0.0);

    const int m = static_cast<int>(rows.size());
    double best = -INFINITY;
    std::vector<int> pick(dim);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == dim) {
            Eigen::MatrixXd A(dim, dim);
            Eigen::VectorXd b(dim);
            for (int k = 0; k < dim; ++k) {
                A.row(k) = rows[pick[k]].transpose();
                b(k) = rhs[pick[k]];
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
            if (lu.rank() < dim) return;
            Eigen::VectorXd v = lu.solve(b);
            for (int k = 0; k < m; ++k)
                if (rows[k].dot(v) > rhs[k] + 1e-10) return;
            double obj = 0;
            for (int i = 0; i < n; ++i) obj += c[i] * v(i);
            best = std::max(best, obj);
            return;
        }
        for (int k = start; k < m; ++k) {
            pick[depth] = k;
            rec(k + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

EmpiricalMeasure random_measure(Rng& rng, int n) {
    std::vector<Atom> a;
    double tot = 0;
    for (int i = 0; i < n; ++i) {
        a.push_back({-2 + 4 * uniform01(rng), uniform01(rng) + 0.05});
        tot += a.back().w;
    }
    for (auto& x : a) x.w /= tot;
    return make_measure(a);
}

}  // namespace

TEST_SUITE("distance") {
TEST_CASE("d1(delta_0, delta_t) = 2t/(t+2) under Lip + sup <= 1") {
    for (double t : {0.1, 0.5, 1.0, 2.0, 7.0}) {
        EmpiricalMeasure a = make_measure({{0.0, 1.0}}), b = make_measure({{t, 1.0}});
        const double lp = vertex_lp({0.0, t}, {-1.0, 1.0}, true);
        CHECK(lp == doctest::Approx(2 * t / (t + 2)).epsilon(1e-12));
        CHECK(d1_distance(a, b) == doctest::Approx(lp).epsilon(1e-9));
        CHECK(dudley_distance(a, b) == doctest::Approx(vertex_lp({0.0, t}, {-1.0, 1.0}, false)).epsilon(1e-9));
        CHECK(d1_distance(b, a) == doctest::Approx(d1_distance(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("distance of a measure to itself is zero") {
    Rng rng(1);
    EmpiricalMeasure m = random_measure(rng, 7);
    CHECK(d1_distance(m, m) == 0.0);
    EmpiricalMeasure z = make_measure({{0.0, 1.0}});
    CHECK(dudley_distance(z, z) == 0.0);
    CHECK_THROWS(d1_distance(EmpiricalMeasure{}, z));
}

TEST_CASE("chain LP matches vertex enumeration") {
    Rng rng(2);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + trial % 4;
        std::vector<double> x(n), c(n);
        double pos = -1;
        for (int i = 0; i < n; ++i) {
            pos += 0.05 + 1.5 * uniform01(rng);
            x[i] = pos;
            c[i] = -1 + 2 * uniform01(rng);
        }
        for (bool mono : {true, false})
            CHECK(chain_lp(x, c, mono) == doctest::Approx(vertex_lp(x, c, mono)).epsilon(1e-9));
    }
}

TEST_CASE("d1 <= Dudley distance") {
    Rng rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        EmpiricalMeasure a = random_measure(rng, 1 + trial % 9), b = random_measure(rng, 1 + trial % 5);
        CHECK(d1_distance(a, b) <= dudley_distance(a, b) + 1e-12);
    }
}

TEST_CASE("sub-probability measures are accepted") {
    EmpiricalMeasure a = make_measure({{0.0, 0.5}}), b = make_measure({{0.0, 0.25}, {1.0, 0.25}});
    CHECK(a.mass() == 0.5);
    CHECK(d1_distance(a, b) == doctest::Approx(std::max(vertex_lp({0.0, 1.0}, {-0.25, 0.25}, true),
                                                        vertex_lp({0.0, 1.0}, {0.25, -0.25}, true))));
    EmpiricalMeasure c = make_measure({{0.0, 0.3}});
    CHECK(d1_distance(a, c) == doctest::Approx(0.2));
}
}
