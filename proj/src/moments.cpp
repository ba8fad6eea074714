#include "spectra/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spectra/ensemble.hpp"

namespace spectra {

namespace {

struct WalkSearch {
    int k;
    std::vector<int> parent{-1}, depth{0}, mult;
    std::vector<std::vector<int>> children{{}};
    std::vector<int> path{0};
    int odd = 0;
    std::vector<WalkShape>* out = nullptr;

    void traverse(int edge, int dir) {
        int& m = mult[edge - 1];
        m += dir;
        odd += (m % 2 != 0) ? 1 : -1;
    }

    void step(int u) {
        int done = static_cast<int>(path.size()) - 1;
        int rem = 2 * k - done;
        if (rem == 0) {
            if (u == 0 && odd == 0) out->push_back({path, mult});
            return;
        }
        if (depth[u] > rem || odd > rem) return;
        auto go = [&](int v, int edge) {
            traverse(edge, 1);
            path.push_back(v);
            step(v);
            path.pop_back();
            mult[edge - 1] -= 1;
            odd += (mult[edge - 1] % 2 != 0) ? 1 : -1;
        };
        if (u != 0) go(parent[u], u);
        for (int v : children[u]) go(v, v);
        int nv = static_cast<int>(parent.size());
        if (nv <= k) {
            parent.push_back(u);
            depth.push_back(depth[u] + 1);
            children.push_back({});
            children[u].push_back(nv);
            mult.push_back(0);
            go(nv, nv);
            mult.pop_back();
            children[u].pop_back();
            children.pop_back();
            depth.pop_back();
            parent.pop_back();
        }
    }
};

// Plane trees as parent arrays in preorder.
void plane_trees(int nodes, std::vector<int>& parent, std::vector<int>& depth, std::vector<int>& stack,
                 const std::function<void()>& emit) {
    if (static_cast<int>(parent.size()) == nodes) {
        emit();
        return;
    }
    // Attach the next preorder node to any vertex on the current rightmost path.
    for (std::size_t s = 0; s < stack.size(); ++s) {
        int par = stack[s];
        std::vector<int> saved(stack.begin() + s + 1, stack.end());
        int v = static_cast<int>(parent.size());
        parent.push_back(par);
        depth.push_back(depth[par] + 1);
        stack.resize(s + 1);
        stack.push_back(v);
        plane_trees(nodes, parent, depth, stack, emit);
        stack.pop_back();
        stack.insert(stack.end(), saved.begin(), saved.end());
        depth.pop_back();
        parent.pop_back();
    }
}

// Class assignments for nodes 1..n-1 (node 0 is the root, class 0).
void colorings(const std::vector<int>& parent, const std::vector<int>& depth, std::size_t v,
               std::vector<int>& cls, std::vector<int>& cls_depth, std::vector<int>& cls_parent,
               std::vector<int>& size, const std::function<void()>& emit) {
    if (v == parent.size()) {
        emit();
        return;
    }
    int pc = cls[parent[v]];
    for (std::size_t c = 1; c < size.size(); ++c) {
        if (cls_depth[c] == depth[v] && cls_parent[c] == pc) {
            cls[v] = static_cast<int>(c);
            ++size[c];
            colorings(parent, depth, v + 1, cls, cls_depth, cls_parent, size, emit);
            --size[c];
        }
    }
    cls[v] = static_cast<int>(size.size());
    size.push_back(1);
    cls_depth.push_back(depth[v]);
    cls_parent.push_back(pc);
    colorings(parent, depth, v + 1, cls, cls_depth, cls_parent, size, emit);
    cls_parent.pop_back();
    cls_depth.pop_back();
    size.pop_back();
}

void for_each_colored_tree(int k, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> parent{-1}, depth{0}, stack{0};
    plane_trees(k + 1, parent, depth, stack, [&] {
        std::vector<int> cls(parent.size(), 0), cls_depth{0}, cls_parent{-1}, size{1};
        colorings(parent, depth, 1, cls, cls_depth, cls_parent, size, [&] {
            std::vector<int> sizes(size.begin() + 1, size.end());
            fn(sizes);
        });
    });
}

void check_k(int k) {
    if (k < 1 || k > kMaxMomentOrder) throw std::invalid_argument("moment order k out of range");
}

}  // namespace

std::string WalkShape::code() const {
    std::string s;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (i) s += '-';
        s += std::to_string(vertices[i]);
    }
    return s;
}

double c_m(double alpha, double B, double theta, int m) {
    if (m < 1) throw std::invalid_argument("c_m: m must be >= 1");
    double v = (2.0 - alpha) / (m - alpha) * std::pow((2.0 - alpha) / alpha * std::pow(B, alpha), m / 2.0 - 1.0);
    return m % 2 == 0 ? v : (2.0 * theta - 1.0) * v;
}

double moment_scale(double alpha, double B) { return alpha / (2.0 - alpha) * std::pow(B, 2.0 - alpha); }

std::vector<WalkShape> enumerate_walks(int k) {
    check_k(k);
    std::vector<WalkShape> out;
    WalkSearch s;
    s.k = k;
    s.out = &out;
    s.step(0);
    return out;
}

double shape_sum(int k, const std::function<double(int)>& coef) {
    double sum = 0.0;
    for (const auto& w : enumerate_walks(k)) {
        double p = 1.0;
        for (int m : w.multiplicities) p *= coef(m);
        sum += p;
    }
    return sum;
}

double colored_tree_sum(int k, const std::function<double(int)>& coef) {
    check_k(k);
    double sum = 0.0;
    for_each_colored_tree(k, [&](const std::vector<int>& sizes) {
        double p = 1.0;
        for (int e : sizes) p *= coef(2 * e);
        sum += p;
    });
    return sum;
}

std::map<std::vector<int>, long long> colored_tree_counts(int k) {
    check_k(k);
    std::map<std::vector<int>, long long> counts;
    for_each_colored_tree(k, [&](const std::vector<int>& sizes) {
        std::vector<int> e = sizes;
        std::sort(e.rbegin(), e.rend());
        ++counts[e];
    });
    return counts;
}

double limit_moment(double alpha, double B, double theta, int k) {
    double s = moment_scale(alpha, B);
    return std::pow(s, k) * shape_sum(k, [&](int m) { return c_m(alpha, B, theta, m); });
}

MomentTable moment_table(double alpha, double B, double theta, int k_max) {
    check_k(k_max);
    MomentTable t;
    t.alpha = alpha;
    t.B = B;
    t.theta = theta;
    t.k_max = k_max;
    double s = moment_scale(alpha, B);
    for (int k = 1; k <= k_max; ++k) {
        std::vector<std::pair<std::string, double>> dec;
        double sum = 0.0;
        for (const auto& w : enumerate_walks(k)) {
            double p = std::pow(s, k);
            for (int m : w.multiplicities) p *= c_m(alpha, B, theta, m);
            dec.push_back({w.code(), p});
            sum += p;
        }
        t.m.push_back(sum);
        t.shapes.push_back(std::move(dec));
    }
    return t;
}

std::vector<MeanErr> mc_moments(const HeavyTailLaw& law, double B, int N, int p_max, int trials,
                                std::uint64_t seed, bool center, unsigned threads) {
    if (trials < 1) throw std::invalid_argument("mc_moments: trials must be >= 1");
    if (p_max < 1) throw std::invalid_argument("mc_moments: p_max must be >= 1");
    std::vector<std::vector<double>> per(p_max, std::vector<double>(trials));
    parallel_for(trials, threads, [&](std::size_t t) {
        Rng rng(derive_seed(seed, t));
        SpectralSample s = eigenvalues(build_matrix(law, TruncationRule::at_B(B), N, center, rng));
        for (int p = 1; p <= p_max; ++p) {
            double sum = 0.0;
            for (double l : s.eigenvalues) sum += std::pow(l, p);
            per[p - 1][t] = sum / N;
        }
    });
    std::vector<MeanErr> out;
    for (const auto& v : per) out.push_back(mean_stderr(v));
    return out;
}

MeanErr mc_moment(const HeavyTailLaw& law, double B, int N, int k, int trials, std::uint64_t seed,
                  bool center, unsigned threads) {
    return mc_moments(law, B, N, k, trials, seed, center, threads).back();
}

}  // namespace spectra
