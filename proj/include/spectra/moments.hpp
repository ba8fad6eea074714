#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "spectra/sampling.hpp"
#include "spectra/stats.hpp"

namespace spectra {

constexpr int kMaxMomentOrder = 6;

// Closed walk of length 2k on a tree skeleton with even edge multiplicities.
// Vertices are labeled in order of first visit; edge v joins v to its parent.
struct WalkShape {
    std::vector<int> vertices;        // 2k + 1 entries, starts and ends at 0
    std::vector<int> multiplicities;  // traversals of edge v (index v - 1)
    std::string code() const;
};

double c_m(double alpha, double B, double theta, int m);

// s = alpha/(2 - alpha) B^{2 - alpha}, the limit of N E[(A^B_ij)^2].
double moment_scale(double alpha, double B);

std::vector<WalkShape> enumerate_walks(int k);

// sum over shapes of prod_e coef(multiplicity_e)
double shape_sum(int k, const std::function<double(int)>& coef);

// Same sum computed over colored rooted plane trees with k+1 nodes: non-root
// nodes are grouped into classes of equal depth whose parents share a class;
// a class of size e contributes coef(2e).
double colored_tree_sum(int k, const std::function<double(int)>& coef);

// Number of colored trees per class-size multiset (sizes sorted decreasingly).
std::map<std::vector<int>, long long> colored_tree_counts(int k);

double limit_moment(double alpha, double B, double theta, int k);

struct MomentTable {
    double alpha = 1.0, B = 1.0, theta = 0.5;
    int k_max = 0;
    std::vector<double> m;  // m_{2k}, k = 1..k_max
    std::vector<std::vector<std::pair<std::string, double>>> shapes;  // per k: shape code, weight
};

MomentTable moment_table(double alpha, double B, double theta, int k_max);

// (1/N) tr (A^B)^p for p = 1..p_max, mean and standard error across trials.
// Trial t uses derive_seed(seed, t).
std::vector<MeanErr> mc_moments(const HeavyTailLaw& law, double B, int N, int p_max, int trials,
                                std::uint64_t seed, bool center = false, unsigned threads = 1);

MeanErr mc_moment(const HeavyTailLaw& law, double B, int N, int k, int trials, std::uint64_t seed,
                  bool center = false, unsigned threads = 1);

}  // namespace spectra
