#include <doctest.h>

#include <atomic>
#include <set>
#include <stdexcept>
#include <vector>

#include "spectra/rng.hpp"

using namespace spectra;

TEST_SUITE("rng") {
TEST_CASE("derived seeds are base xor hash(index)") {
    CHECK(derive_seed(0, 5) == mix64(5));
    CHECK(derive_seed(123, 7) == (123ULL ^ mix64(7)));
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, i));
    CHECK(seen.size() == 1000);
}

TEST_CASE("uniform01 stays inside the open interval") {
    Rng rng(1);
    double lo = 1, hi = 0;
    for (int i = 0; i < 100000; ++i) {
        double u = uniform01(rng);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
}

TEST_CASE("parallel_for visits each index once") {
    for (unsigned threads : {1u, 3u}) {
        std::vector<std::atomic<int>> hits(257);
        parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i]++; });
        for (auto& h : hits) CHECK(h.load() == 1);
    }
}

TEST_CASE("parallel_for rethrows worker exceptions") {
    CHECK_THROWS_AS(parallel_for(10, 2, [](std::size_t i) {
                        if (i == 7) throw std::runtime_error("boom");
                    }),
                    std::runtime_error);
}
}
