#include "spectra/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace spectra {

namespace {

// E[|X|^zeta 1_{|X| < t}] for any zeta, including zeta <= alpha.
double partial_moment(const HeavyTailLaw& law, double zeta, double t) {
    if (t <= law.x_min) return 0.0;
    double a = law.alpha, xm = law.x_min;
    double d = zeta - a;
    if (std::abs(d) < 1e-14) return a * std::pow(xm, a) * std::log(t / xm);
    if (std::isinf(t)) {
        if (d > 0) return std::numeric_limits<double>::infinity();
        return -a * std::pow(xm, a) * std::pow(xm, d) / d;
    }
    return a * std::pow(xm, a) * (std::pow(t, d) - std::pow(xm, d)) / d;
}

}  // namespace

void validate(const HeavyTailLaw& law) {
    if (!(law.alpha > 0 && law.alpha < 2)) throw std::invalid_argument("law: alpha must lie in (0,2)");
    if (!(law.x_min > 0)) throw std::invalid_argument("law: x_min must be positive");
    if (!(law.theta >= 0 && law.theta <= 1)) throw std::invalid_argument("law: theta must lie in [0,1]");
}

double a_n(const HeavyTailLaw& law, long long N) {
    if (N < 1) throw std::invalid_argument("a_n: N must be >= 1");
    return law.x_min * std::pow(static_cast<double>(N), 1.0 / law.alpha);
}

double truncation_threshold(const HeavyTailLaw& law, const TruncationRule& rule, long long N) {
    switch (rule.kind) {
        case TruncationRule::Kind::none:
            return std::numeric_limits<double>::infinity();
        case TruncationRule::Kind::at_B:
            return rule.value * a_n(law, N);
        case TruncationRule::Kind::at_kappa:
            return std::pow(static_cast<double>(N), rule.value) * a_n(law, N);
    }
    return std::numeric_limits<double>::infinity();
}

double sample_entry(const HeavyTailLaw& law, Rng& rng) {
    double mag = law.x_min * std::pow(uniform01(rng), -1.0 / law.alpha);
    return uniform01(rng) < law.theta ? mag : -mag;
}

double truncated_moment(const HeavyTailLaw& law, double zeta, double t) {
    if (!(zeta > law.alpha)) throw std::invalid_argument("truncated_moment: need zeta > alpha");
    return partial_moment(law, zeta, t);
}

double truncated_mean(const HeavyTailLaw& law, double t) {
    if (law.theta == 0.5) return 0.0;
    return (2.0 * law.theta - 1.0) * partial_moment(law, 1.0, t);
}

}  // namespace spectra
