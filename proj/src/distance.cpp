#include <cmath>
#include <functional>
#include <iterator>
#include <map>
#include <stdexcept>

#include "spectra/ensemble.hpp"

namespace spectra {

namespace {

// Exact maximum of sum c_i f_i for a fixed sup bound b and slope bound l.
// The value function of the prefix is concave piecewise linear on [-b, b];
// it is kept as (slope, length) segments ordered left to right, with all
// slopes stored relative to a running offset so that adding c_i g is O(1).
double chain_fixed(const std::vector<double>& x, const std::vector<double>& c, bool monotone, double b,
                   double l) {
    if (b <= 0.0) return 0.0;
    std::map<double, double, std::greater<double>> seg;
    double off = 0.0, total = 2.0 * b;
    seg[c[0]] = 2.0 * b;
    double left = -b * c[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
        double h = l * (x[i] - x[i - 1]);
        if (h > 0) {
            double ins = monotone ? h : 2.0 * h;
            seg[-off] += ins;
            total += ins;
            if (!monotone) {
                double rem = h;
                while (rem > 0 && !seg.empty()) {
                    auto it = seg.begin();
                    double take = std::min(it->second, rem);
                    left += (it->first + off) * take;
                    it->second -= take;
                    total -= take;
                    rem -= take;
                    if (it->second <= 0) seg.erase(it);
                }
            }
            while (total > 2.0 * b && !seg.empty()) {
                auto it = std::prev(seg.end());
                double take = std::min(it->second, total - 2.0 * b);
                it->second -= take;
                total -= take;
                if (it->second <= 0) seg.erase(it);
            }
        }
        off += c[i];
        left -= b * c[i];
    }
    double val = left;
    for (const auto& [k, len] : seg) {
        double s = k + off;
        if (s <= 0) break;
        val += s * len;
    }
    return val;
}

std::pair<std::vector<double>, std::vector<double>> merged(const EmpiricalMeasure& mu,
                                                           const EmpiricalMeasure& nu) {
    if (mu.atoms.empty() || nu.atoms.empty()) throw std::invalid_argument("distance: empty measure");
    std::vector<double> x, c;
    std::size_t i = 0, j = 0;
    while (i < mu.atoms.size() || j < nu.atoms.size()) {
        double xi = i < mu.atoms.size() ? mu.atoms[i].x : INFINITY;
        double xj = j < nu.atoms.size() ? nu.atoms[j].x : INFINITY;
        double xm = std::min(xi, xj), v = 0.0;
        if (xi == xm) v -= mu.atoms[i++].w;
        if (xj == xm) v += nu.atoms[j++].w;
        x.push_back(xm);
        c.push_back(v);
    }
    return {x, c};
}

}  // namespace

double chain_lp(const std::vector<double>& x, const std::vector<double>& c, bool monotone) {
    if (x.empty() || x.size() != c.size()) throw std::invalid_argument("chain_lp: bad input");
    auto phi = [&](double b) { return chain_fixed(x, c, monotone, b, 1.0 - b); };
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = 0.0, hi = 1.0;
    double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    double f1 = phi(m1), f2 = phi(m2);
    for (int it = 0; it < 64; ++it) {
        if (f1 < f2) {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + g * (hi - lo);
            f2 = phi(m2);
        } else {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - g * (hi - lo);
            f1 = phi(m1);
        }
    }
    return std::max({f1, f2, phi(0.0), phi(1.0)});
}

double d1_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    auto [x, c] = merged(mu, nu);
    std::vector<double> neg(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) neg[i] = -c[i];
    return std::max(chain_lp(x, c, true), chain_lp(x, neg, true));
}

double dudley_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    auto [x, c] = merged(mu, nu);
    return chain_lp(x, c, false);
}

}  // namespace spectra
