#pragma once

#include <cstdint>

namespace lskum {

// Pairwise reduction with a fixed tree shape: every interval splits at its
// midpoint down to single elements. The summation order therefore depends
// only on [lo, hi), never on partition count or thread schedule, which is
// what makes the solver's convergence norm bitwise reproducible.
template <class F>
double deterministic_reduce(std::int64_t lo, std::int64_t hi, F&& f) {
  if (hi - lo <= 0) return 0.0;
  if (hi - lo == 1) return f(lo);
  const std::int64_t mid = lo + (hi - lo) / 2;
  return deterministic_reduce(lo, mid, f) + deterministic_reduce(mid, hi, f);
}

}  // namespace lskum
