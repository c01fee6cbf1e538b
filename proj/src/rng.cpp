#include "cfv/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cfv {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng substream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t a = splitmix64(seed);
  std::uint64_t b = splitmix64(a ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

double uniform01(Rng& rng) {
  return std::generate_canonical<double, 53>(rng);
}

std::int64_t geometric_trials(double p, Rng& rng) {
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("geometric_trials: p must lie in (0,1]");
  if (p == 1.0) return 1;
  std::geometric_distribution<std::int64_t> g(p);
  return g(rng) + 1;
}

namespace {

double log_choose(double n, double k) {
  return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

}  // namespace

std::int64_t hypergeometric(std::int64_t total, std::int64_t marked, std::int64_t draws, Rng& rng) {
  if (total < 0 || marked < 0 || draws < 0 || marked > total || draws > total)
    throw std::invalid_argument("hypergeometric: bad parameters");
  std::int64_t lo = std::max<std::int64_t>(0, draws - (total - marked));
  std::int64_t hi = std::min(marked, draws);
  if (lo == hi) return lo;
  double n = static_cast<double>(total), k = static_cast<double>(marked), m = static_cast<double>(draws);
  std::int64_t mode = static_cast<std::int64_t>(std::floor((m + 1) * (k + 1) / (n + 2)));
  mode = std::clamp(mode, lo, hi);
  auto logpmf = [&](std::int64_t x) {
    double xd = static_cast<double>(x);
    return log_choose(k, xd) + log_choose(n - k, m - xd) - log_choose(n, m);
  };
  // inverse transform, searching outward from the mode
  double u = uniform01(rng);
  double p_mode = std::exp(logpmf(mode));
  double acc = p_mode;
  if (u <= acc) return mode;
  std::int64_t up = mode, down = mode;
  double p_up = p_mode, p_down = p_mode;
  while (up < hi || down > lo) {
    if (up < hi) {
      double x = static_cast<double>(up);
      p_up *= (k - x) * (m - x) / ((x + 1) * (n - k - m + x + 1));
      ++up;
      acc += p_up;
      if (u <= acc) return up;
    }
    if (down > lo) {
      double x = static_cast<double>(down);
      p_down *= x * (n - k - m + x) / ((k - x + 1) * (m - x + 1));
      --down;
      acc += p_down;
      if (u <= acc) return down;
    }
  }
  return mode;
}

}  // namespace cfv
