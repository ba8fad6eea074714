#pragma once

#include <limits>

#include "spectra/rng.hpp"

namespace spectra {

// Pareto magnitude P(|X| >= u) = (x_min/u)^alpha, sign + with probability theta.
struct HeavyTailLaw {
    double alpha = 1.0;
    double x_min = 1.0;
    double theta = 0.5;
};

struct TruncationRule {
    enum class Kind { none, at_B, at_kappa };
    Kind kind = Kind::none;
    double value = 0.0;  // B or kappa

    static TruncationRule none() { return {}; }
    static TruncationRule at_B(double B) { return {Kind::at_B, B}; }
    static TruncationRule at_kappa(double k) { return {Kind::at_kappa, k}; }
};

void validate(const HeavyTailLaw& law);

// x_min N^{1/alpha}
double a_n(const HeavyTailLaw& law, long long N);

// Cut-off on |x| implied by the rule at size N (infinity for none).
double truncation_threshold(const HeavyTailLaw& law, const TruncationRule& rule, long long N);

double sample_entry(const HeavyTailLaw& law, Rng& rng);

// E[|X|^zeta 1_{|X| < t}], zeta > alpha.
double truncated_moment(const HeavyTailLaw& law, double zeta, double t);

// E[X 1_{|X| <= t}]; infinite for t = inf and alpha <= 1.
double truncated_mean(const HeavyTailLaw& law, double t);

}  // namespace spectra
