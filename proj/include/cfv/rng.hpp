#pragma once

#include <cstdint>
#include <random>

namespace cfv {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Independent stream for replicate `index` of a run seeded with `seed`.
Rng substream(std::uint64_t seed, std::uint64_t index);

double uniform01(Rng& rng);

// Number of trials up to and including the first success, p in (0,1].
std::int64_t geometric_trials(double p, Rng& rng);

// Number of marked items in `draws` draws without replacement from a population
// of `total` items of which `marked` are marked.
std::int64_t hypergeometric(std::int64_t total, std::int64_t marked, std::int64_t draws, Rng& rng);

}  // namespace cfv
