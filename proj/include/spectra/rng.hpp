#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace spectra {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used as the trial-index hash.
std::uint64_t mix64(std::uint64_t x);

// Seed of trial `index` under base seed `base`: base XOR mix64(index).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Uniform on the open interval (0,1), 53 random bits.
double uniform01(Rng& rng);

// Thread count from SPECTRA_THREADS, else 1.
unsigned default_threads();

// Runs fn(0..n-1) on up to `threads` workers. Each index runs exactly once;
// callers write into per-index slots so results do not depend on scheduling.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace spectra
