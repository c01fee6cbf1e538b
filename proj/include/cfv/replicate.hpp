#pragma once

#include <cstdint>
#include <vector>

#include "cfv/rng.hpp"

namespace cfv {

enum class Exec { serial, parallel };

// out[r] = f(substream(seed, r)). The result does not depend on exec or thread count.
template <class F>
std::vector<double> replicate(std::int64_t reps, std::uint64_t seed, Exec exec, F&& f) {
  std::vector<double> out(static_cast<std::size_t>(reps));
  bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic, 64) if (par)
  for (std::int64_t r = 0; r < reps; ++r) {
    Rng rng = substream(seed, static_cast<std::uint64_t>(r));
    out[static_cast<std::size_t>(r)] = f(rng);
  }
  return out;
}

}  // namespace cfv
