#pragma once

#include <vector>

namespace spectra {

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct MeanErr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

MeanErr mean_stderr(const std::vector<double>& v);

}  // namespace spectra
