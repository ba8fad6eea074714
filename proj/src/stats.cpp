#include "spectra/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spectra {

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = a.size(), nb = b.size();
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return d;
}

MeanErr mean_stderr(const std::vector<double>& v) {
    MeanErr r;
    if (v.empty()) return r;
    double s = 0.0;
    for (double x : v) s += x;
    r.mean = s / v.size();
    if (v.size() > 1) {
        double q = 0.0;
        for (double x : v) q += (x - r.mean) * (x - r.mean);
        r.stderr_ = std::sqrt(q / (v.size() - 1) / v.size());
    }
    return r;
}

}  // namespace spectra
